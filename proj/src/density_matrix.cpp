#include "qzb/density_matrix.hpp"

#include <stdexcept>
#include <tuple>
#include <vector>

#include "block_eigen.hpp"

namespace qzb {

DensityMatrix::DensityMatrix(TwoModeSpace space, Matrix matrix)
  : m_space(space), m_matrix(std::move(matrix))
{
    if (m_matrix.rows() != space.dim() || m_matrix.cols() != space.dim()) {
        throw std::invalid_argument("density matrix shape does not match space");
    }
}

DensityMatrix DensityMatrix::pure(const TwoModeSpace& space, const Vector& ket)
{
    if (ket.size() != space.dim()) {
        throw std::invalid_argument("ket size does not match space");
    }
    const double norm = ket.norm();
    if (norm == 0.0) {
        throw std::invalid_argument("cannot normalise the zero vector");
    }
    const Vector psi = ket / norm;
    return {space, psi * psi.adjoint()};
}

double DensityMatrix::purity() const
{
    // Tr(rho^2) = sum_ij rho_ij rho_ji
    return (m_matrix.cwiseProduct(m_matrix.transpose())).sum().real();
}

double DensityMatrix::hermiticity_deviation() const
{
    return (m_matrix - m_matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const
{
    std::vector<std::tuple<int, int, complex>> entries;
    for (int c = 0; c < m_space.dim(); ++c) {
        for (int r = 0; r < m_space.dim(); ++r) {
            if (m_matrix(r, c) != complex(0.0)) {
                entries.emplace_back(r, c, m_matrix(r, c));
            }
        }
    }
    return detail::min_eigenvalue_by_blocks(m_space.dim(), entries);
}

DensityMatrix vacuum_state(const TwoModeSpace& space)
{
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    m(0, 0) = 1.0;
    return {space, std::move(m)};
}

} // namespace qzb
