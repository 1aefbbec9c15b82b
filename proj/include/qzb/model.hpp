#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "qzb/density_matrix.hpp"
#include "qzb/fock.hpp"

namespace qzb {

using SparseMatrix = Eigen::SparseMatrix<complex, Eigen::RowMajor>;

/// One dissipative channel rate * D[L], with
/// D[L]rho = L rho L^dag - (L^dag L rho + rho L^dag L) / 2.
struct JumpChannel
{
    double rate;
    SparseMatrix op;          // L
    SparseMatrix op_dag_op;   // L^dag L, precomposed
};

/**
 * Pair generation with two-photon absorption on both modes.
 *
 *     H        = omega (a^dag b^dag + a b)          (hbar = 1)
 *     drho/dxi = -i[H, rho] + gamma_a D[a^2] rho + gamma_b D[b^2] rho
 *
 * Rates are in units of inverse xi. The model keeps its operators in sparse
 * form so that large truncations stay cheap to hold; dense copies are built
 * on request. Extra channels (e.g. linear loss) can be appended; the
 * scenarios leave that list empty.
 */
class ZenoModel
{
public:
    /// Throws std::invalid_argument for negative or non-finite parameters.
    ZenoModel(TwoModeSpace space, double omega, double gamma_a, double gamma_b,
              const std::vector<std::pair<double, Operator>>& extra_channels =
                  {});

    const TwoModeSpace& space() const noexcept { return m_space; }
    double omega() const noexcept { return m_omega; }
    double gamma_a() const noexcept { return m_gamma_a; }
    double gamma_b() const noexcept { return m_gamma_b; }
    double gamma() const noexcept { return m_gamma_a + m_gamma_b; }

    const SparseMatrix& sparse_hamiltonian() const noexcept { return m_h; }
    /// Dense copy of H.
    Operator hamiltonian() const;

    /// Channels with nonzero rate: signal TPA, idler TPA, then extras.
    const std::vector<JumpChannel>& channels() const noexcept
    {
        return m_channels;
    }

    bool has_extra_channels() const noexcept { return m_extra_count > 0; }

    /// Same parameters on another truncation. Throws std::logic_error when
    /// extra channels are present (their operators are tied to the space).
    ZenoModel with_space(const TwoModeSpace& space) const;

private:
    TwoModeSpace m_space;
    double m_omega;
    double m_gamma_a;
    double m_gamma_b;
    SparseMatrix m_h;
    std::vector<JumpChannel> m_channels;
    int m_extra_count = 0;
};

/// omega (a^dag b^dag + a b) from the dense ladder operators.
Operator pair_hamiltonian(const TwoModeSpace& space, double omega);

/// drho/dxi evaluated with dense matrix products. Throws
/// std::invalid_argument when rho lives on a different space.
Matrix lindblad_rhs(const ZenoModel& model, const DensityMatrix& rho);

/// Largest number of superoperator rows liouvillian_matrix will build.
inline constexpr int max_liouvillian_rows = 10000;

/// Dense superoperator M with vec(drho/dxi) = M vec(rho), where vec stacks
/// columns. Throws DimensionGuard when dim^2 > max_liouvillian_rows.
Matrix liouvillian_matrix(const ZenoModel& model);

/// Column-stacking vectorisation and its inverse.
Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, int dim);

} // namespace qzb
