#include "qzb/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qzb/errors.hpp"

namespace qzb {

namespace {

using Triplet = Eigen::Triplet<complex>;

void require_rate(double value, const char* name)
{
    if (!std::isfinite(value) || value < 0.0) {
        throw std::invalid_argument(std::string(name) +
                                    " must be finite and non-negative");
    }
}

SparseMatrix from_triplets(int dim, const std::vector<Triplet>& triplets)
{
    SparseMatrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

SparseMatrix sparse_pair_hamiltonian(const TwoModeSpace& space, double omega)
{
    std::vector<Triplet> t;
    for (int n_a = 0; n_a + 1 < space.dim_a(); ++n_a) {
        for (int n_b = 0; n_b + 1 < space.dim_b(); ++n_b) {
            const double v =
                omega * std::sqrt(double(n_a + 1) * double(n_b + 1));
            const int lo = space.index(n_a, n_b);
            const int hi = space.index(n_a + 1, n_b + 1);
            t.emplace_back(hi, lo, v);
            t.emplace_back(lo, hi, v);
        }
    }
    return from_triplets(space.dim(), t);
}

JumpChannel sparse_tpa_channel(const TwoModeSpace& space, Mode mode,
                               double rate)
{
    std::vector<Triplet> l;
    std::vector<Triplet> ldl;
    for (int i = 0; i < space.dim(); ++i) {
        const int n = space.photons(i, mode);
        const double pairs = double(n) * double(n - 1);
        if (n >= 2) {
            const int target = mode == Mode::signal
                                   ? space.index(space.n_a(i) - 2, space.n_b(i))
                                   : space.index(space.n_a(i), space.n_b(i) - 2);
            l.emplace_back(target, i, std::sqrt(pairs));
            ldl.emplace_back(i, i, pairs);
        }
    }
    return {rate, from_triplets(space.dim(), l),
            from_triplets(space.dim(), ldl)};
}

} // namespace

Operator pair_hamiltonian(const TwoModeSpace& space, double omega)
{
    const Operator a = annihilation(space, Mode::signal);
    const Operator b = annihilation(space, Mode::idler);
    const Operator ab = compose(a, b);
    return scale(add(adjoint(ab), ab), omega);
}

ZenoModel::ZenoModel(TwoModeSpace space, double omega, double gamma_a,
                     double gamma_b,
                     const std::vector<std::pair<double, Operator>>& extra)
  : m_space(space), m_omega(omega), m_gamma_a(gamma_a), m_gamma_b(gamma_b)
{
    require_rate(omega, "omega");
    require_rate(gamma_a, "gamma_a");
    require_rate(gamma_b, "gamma_b");

    m_h = sparse_pair_hamiltonian(space, omega);
    if (gamma_a > 0.0) {
        m_channels.push_back(sparse_tpa_channel(space, Mode::signal, gamma_a));
    }
    if (gamma_b > 0.0) {
        m_channels.push_back(sparse_tpa_channel(space, Mode::idler, gamma_b));
    }
    for (const auto& [rate, op] : extra) {
        require_rate(rate, "extra channel rate");
        if (!(op.space() == space)) {
            throw std::invalid_argument("extra channel on a different space");
        }
        ++m_extra_count;
        if (rate > 0.0) {
            SparseMatrix l = op.matrix().sparseView();
            SparseMatrix ldl = (op.matrix().adjoint() * op.matrix()).sparseView();
            m_channels.push_back({rate, std::move(l), std::move(ldl)});
        }
    }
}

Operator ZenoModel::hamiltonian() const
{
    return {m_space, Matrix(m_h)};
}

ZenoModel ZenoModel::with_space(const TwoModeSpace& space) const
{
    if (m_extra_count > 0) {
        throw std::logic_error(
            "cannot re-truncate a model with extra jump channels");
    }
    return {space, m_omega, m_gamma_a, m_gamma_b};
}

Matrix lindblad_rhs(const ZenoModel& model, const DensityMatrix& rho)
{
    if (!(rho.space() == model.space())) {
        throw std::invalid_argument("density matrix and model spaces differ");
    }
    const Matrix& r = rho.matrix();
    const Matrix h(model.sparse_hamiltonian());
    const complex i_unit(0.0, 1.0);

    Matrix out = i_unit * (r * h - h * r);
    for (const auto& ch : model.channels()) {
        const Matrix l(ch.op);
        const Matrix ldl(ch.op_dag_op);
        out += (0.5 * ch.rate) *
               (2.0 * l * r * l.adjoint() - ldl * r - r * ldl);
    }
    return out;
}

Matrix liouvillian_matrix(const ZenoModel& model)
{
    const long n = model.space().dim();
    if (n * n > max_liouvillian_rows) {
        throw DimensionGuard("Liouvillian would have " + std::to_string(n * n) +
                             " rows (limit " +
                             std::to_string(max_liouvillian_rows) + ")");
    }

    // vec(A X B) = (B^T kron A) vec(X) for column stacking.
    const auto kron = [](const Matrix& x, const Matrix& y) {
        Matrix k(x.rows() * y.rows(), x.cols() * y.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                k.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) =
                    x(i, j) * y;
            }
        }
        return k;
    };

    const Matrix id = Matrix::Identity(n, n);
    const Matrix h(model.sparse_hamiltonian());
    const complex i_unit(0.0, 1.0);

    Matrix m = -i_unit * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& ch : model.channels()) {
        const Matrix l(ch.op);
        const Matrix ldl(ch.op_dag_op);
        m += ch.rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) -
                        0.5 * kron(ldl.transpose(), id));
    }
    return m;
}

Vector vectorize(const Matrix& m)
{
    return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v, int dim)
{
    if (v.size() != Eigen::Index(dim) * dim) {
        throw std::invalid_argument("vector length is not dim^2");
    }
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

} // namespace qzb
