#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qzb/model.hpp"

namespace qzb::detail {

/**
 * The Lindblad generator restricted to the density-matrix entries that can
 * become nonzero starting from a given initial pattern.
 *
 * Writing K = -iH - (1/2) sum_c g_c L_c^dag L_c, the generator is
 *
 *     drho_ij = sum_k K_ik rho_kj + sum_l conj(K_jl) rho_il
 *             + sum_c g_c sum_kl L_c,ik conj(L_c,jl) rho_kl
 *
 * Entry (k, l) feeds (i, l), (k, j) and (i, j) through these three terms; the
 * support is the closure of the initial pattern under that relation. Entries
 * outside it are zero for all xi. The restricted operator is stored in CSR
 * form over the support, ordered column-major like Eigen's storage.
 */
class SupportLiouvillian
{
public:
    struct Entry
    {
        int row;
        int col;
        complex value;
    };

    /// `initial` lists the nonzero entries of the starting density matrix.
    SupportLiouvillian(const ZenoModel& model, const std::vector<Entry>& initial);

    int size() const noexcept { return int(m_rows.size()); }
    int dim() const noexcept { return m_dim; }

    int row(int pos) const { return m_rows[std::size_t(pos)]; }
    int col(int pos) const { return m_cols[std::size_t(pos)]; }
    /// Position of (col, row); -1 when the transpose is outside the support.
    int transpose(int pos) const { return m_transpose[std::size_t(pos)]; }

    /// Positions of diagonal entries together with their basis index.
    const std::vector<std::pair<int, int>>& diagonal() const noexcept
    {
        return m_diagonal;
    }

    /// Position of (row, col) or -1.
    int position(int row, int col) const;

    /// Throws std::invalid_argument if an entry lies outside the support.
    Vector gather(const std::vector<Entry>& entries) const;
    Matrix scatter(const Vector& values) const;

    /// out = L values
    void apply(const Vector& values, Vector& out) const;

private:
    int m_dim;
    std::vector<int> m_rows;
    std::vector<int> m_cols;
    std::vector<int> m_transpose;
    std::unordered_map<std::int64_t, int> m_index;
    std::vector<std::pair<int, int>> m_diagonal;

    std::vector<std::int64_t> m_row_ptr;
    std::vector<int> m_col_idx;
    std::vector<complex> m_values;
};

} // namespace qzb::detail
