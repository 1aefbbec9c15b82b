#include "support_liouvillian.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace qzb::detail {

namespace {

struct SparseEntry
{
    int index;
    complex value;
};

using Adjacency = std::vector<std::vector<SparseEntry>>;

// rows[i] = {(k, A_ik)}, cols[k] = {(i, A_ik)}
void split(const SparseMatrix& m, Adjacency& rows, Adjacency& cols)
{
    rows.assign(std::size_t(m.rows()), {});
    cols.assign(std::size_t(m.cols()), {});
    for (int i = 0; i < m.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
            if (it.value() == complex(0.0)) {
                continue;
            }
            rows[std::size_t(it.row())].push_back({int(it.col()), it.value()});
            cols[std::size_t(it.col())].push_back({int(it.row()), it.value()});
        }
    }
}

} // namespace

SupportLiouvillian::SupportLiouvillian(const ZenoModel& model,
                                       const std::vector<Entry>& initial)
  : m_dim(model.space().dim())
{
    const std::int64_t dim = m_dim;
    const complex i_unit(0.0, 1.0);

    // Effective generator K = -iH - 1/2 sum_c g_c L^dag L.
    SparseMatrix k = (-i_unit) * model.sparse_hamiltonian();
    for (const auto& ch : model.channels()) {
        k -= (0.5 * ch.rate) * ch.op_dag_op;
    }
    k.prune(complex(0.0));

    Adjacency k_rows, k_cols;
    split(k, k_rows, k_cols);

    std::vector<double> rates;
    std::vector<Adjacency> l_rows(model.channels().size());
    std::vector<Adjacency> l_cols(model.channels().size());
    for (std::size_t c = 0; c < model.channels().size(); ++c) {
        const auto& ch = model.channels()[c];
#ifdef QZB_MUTATE_DISSIPATOR_SIGN
        rates.push_back(-ch.rate);
#else
        rates.push_back(ch.rate);
#endif
        split(ch.op, l_rows[c], l_cols[c]);
    }

    // Closure of the initial pattern (plus its transpose) under the
    // generator's coupling graph.
    std::unordered_map<std::int64_t, int> seen;
    std::vector<std::pair<int, int>> found;
    std::deque<std::pair<int, int>> queue;
    const auto visit = [&](int r, int c) {
        const std::int64_t key = std::int64_t(c) * dim + r;
        if (seen.emplace(key, int(found.size())).second) {
            found.emplace_back(r, c);
            queue.emplace_back(r, c);
        }
    };
    for (const auto& e : initial) {
        if (e.row < 0 || e.row >= m_dim || e.col < 0 || e.col >= m_dim) {
            throw std::out_of_range("initial entry outside the space");
        }
        if (e.value != complex(0.0)) {
            visit(e.row, e.col);
            visit(e.col, e.row);
        }
    }
    while (!queue.empty()) {
        const auto [r, c] = queue.front();
        queue.pop_front();
        for (const auto& e : k_cols[std::size_t(r)]) {
            visit(e.index, c);
        }
        for (const auto& e : k_cols[std::size_t(c)]) {
            visit(r, e.index);
        }
        for (std::size_t ch = 0; ch < l_cols.size(); ++ch) {
            for (const auto& er : l_cols[ch][std::size_t(r)]) {
                for (const auto& ec : l_cols[ch][std::size_t(c)]) {
                    visit(er.index, ec.index);
                }
            }
        }
    }

    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second < y.second : x.first < y.first;
    });

    const std::size_t n = found.size();
    m_rows.resize(n);
    m_cols.resize(n);
    m_index.reserve(n);
    for (std::size_t p = 0; p < n; ++p) {
        m_rows[p] = found[p].first;
        m_cols[p] = found[p].second;
        m_index.emplace(std::int64_t(m_cols[p]) * dim + m_rows[p], int(p));
        if (m_rows[p] == m_cols[p]) {
            m_diagonal.emplace_back(int(p), m_rows[p]);
        }
    }
    m_transpose.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        m_transpose[p] = position(m_cols[p], m_rows[p]);
    }

    // Rows of the restricted operator: every source of (i, j) that lies in
    // the support. Sources outside it hold zero forever.
    m_row_ptr.reserve(n + 1);
    m_row_ptr.push_back(0);
    const auto emit = [&](int src_row, int src_col, complex coeff) {
        const int pos = position(src_row, src_col);
        if (pos >= 0 && coeff != complex(0.0)) {
            m_col_idx.push_back(pos);
            m_values.push_back(coeff);
        }
    };
    for (std::size_t p = 0; p < n; ++p) {
        const int i = m_rows[p];
        const int j = m_cols[p];
        for (const auto& e : k_rows[std::size_t(i)]) {
            emit(e.index, j, e.value);
        }
        for (const auto& e : k_rows[std::size_t(j)]) {
            emit(i, e.index, std::conj(e.value));
        }
        for (std::size_t ch = 0; ch < l_rows.size(); ++ch) {
            for (const auto& er : l_rows[ch][std::size_t(i)]) {
                for (const auto& ec : l_rows[ch][std::size_t(j)]) {
                    emit(er.index, ec.index,
                         rates[ch] * er.value * std::conj(ec.value));
                }
            }
        }
        m_row_ptr.push_back(std::int64_t(m_col_idx.size()));
    }
}

int SupportLiouvillian::position(int row, int col) const
{
    const auto it = m_index.find(std::int64_t(col) * m_dim + row);
    return it == m_index.end() ? -1 : it->second;
}

Vector SupportLiouvillian::gather(const std::vector<Entry>& entries) const
{
    Vector v = Vector::Zero(size());
    for (const auto& e : entries) {
        const int pos = position(e.row, e.col);
        if (pos < 0) {
            if (e.value != complex(0.0)) {
                throw std::invalid_argument("entry outside the support");
            }
            continue;
        }
        v(pos) = e.value;
    }
    return v;
}

Matrix SupportLiouvillian::scatter(const Vector& values) const
{
    Matrix m = Matrix::Zero(m_dim, m_dim);
    for (int p = 0; p < size(); ++p) {
        m(row(p), col(p)) = values(p);
    }
    return m;
}

void SupportLiouvillian::apply(const Vector& values, Vector& out) const
{
    out.resize(size());
    const complex* x = values.data();
    for (std::size_t p = 0; p + 1 < m_row_ptr.size(); ++p) {
        complex acc(0.0);
        for (std::int64_t q = m_row_ptr[p]; q < m_row_ptr[p + 1]; ++q) {
            acc += m_values[std::size_t(q)] * x[m_col_idx[std::size_t(q)]];
        }
        out(Eigen::Index(p)) = acc;
    }
}

} // namespace qzb::detail
