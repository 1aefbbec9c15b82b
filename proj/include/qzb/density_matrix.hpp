#pragma once

#include "qzb/fock.hpp"

namespace qzb {

/// Density matrix of the two-mode system. Validates shape on construction;
/// physicality (Hermiticity, trace, positivity) is reported by the query
/// methods rather than enforced.
class DensityMatrix
{
public:
    DensityMatrix(TwoModeSpace space, Matrix matrix);

    /// Pure state |psi><psi|, normalised.
    static DensityMatrix pure(const TwoModeSpace& space, const Vector& ket);

    const TwoModeSpace& space() const noexcept { return m_space; }
    const Matrix& matrix() const noexcept { return m_matrix; }

    complex operator()(int row, int col) const { return m_matrix(row, col); }

    double population(int n_a, int n_b) const
    {
        return m_matrix(m_space.index(n_a, n_b), m_space.index(n_a, n_b))
            .real();
    }

    complex trace() const { return m_matrix.trace(); }
    double purity() const;

    /// max |rho_ij - conj(rho_ji)|
    double hermiticity_deviation() const;

    /// Smallest eigenvalue of the Hermitian part. Works block by block over
    /// the connected components of the nonzero pattern, which is exact for
    /// any matrix and much cheaper for the sector-structured states produced
    /// by the dynamics.
    double min_eigenvalue() const;

private:
    TwoModeSpace m_space;
    Matrix m_matrix;
};

DensityMatrix vacuum_state(const TwoModeSpace& space);

} // namespace qzb
