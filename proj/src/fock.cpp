#include "qzb/fock.hpp"

#include "qzb/format.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qzb {

TwoModeSpace::TwoModeSpace(int dim_a, int dim_b) : m_dim_a(dim_a), m_dim_b(dim_b)
{
    if (dim_a < 2 || dim_b < 2) {
        throw std::invalid_argument("Fock cutoffs must be >= 2, got (" +
                                    std::to_string(dim_a) + ", " +
                                    std::to_string(dim_b) + ")");
    }
}

TwoModeSpace make_space(int dim_a, int dim_b) { return {dim_a, dim_b}; }

Operator::Operator(TwoModeSpace space, Matrix matrix)
  : m_space(space), m_matrix(std::move(matrix))
{
    if (m_matrix.rows() != space.dim() || m_matrix.cols() != space.dim()) {
        throw std::invalid_argument("operator shape does not match space");
    }
}

Vector Operator::apply(const Vector& ket) const
{
    if (ket.size() != m_space.dim()) {
        throw std::invalid_argument("ket size does not match space");
    }
    return m_matrix * ket;
}

Operator annihilation(const TwoModeSpace& space, Mode mode)
{
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int n_a = 0; n_a < space.dim_a(); ++n_a) {
        for (int n_b = 0; n_b < space.dim_b(); ++n_b) {
            const int n = space.photons(space.index(n_a, n_b), mode);
            if (n == 0) {
                continue;
            }
            const int target = mode == Mode::signal ? space.index(n_a - 1, n_b)
                                                    : space.index(n_a, n_b - 1);
            m(target, space.index(n_a, n_b)) = std::sqrt(double(n));
        }
    }
    return {space, std::move(m)};
}

Operator creation(const TwoModeSpace& space, Mode mode)
{
    return adjoint(annihilation(space, mode));
}

Operator embed_number(const TwoModeSpace& space, Mode mode)
{
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int i = 0; i < space.dim(); ++i) {
        m(i, i) = double(space.photons(i, mode));
    }
    return {space, std::move(m)};
}

Operator identity(const TwoModeSpace& space)
{
    return {space, Matrix::Identity(space.dim(), space.dim())};
}

Operator adjoint(const Operator& op)
{
    return {op.space(), op.matrix().adjoint()};
}

namespace {
void require_same_space(const Operator& lhs, const Operator& rhs)
{
    if (!(lhs.space() == rhs.space())) {
        throw std::invalid_argument("operators act on different spaces");
    }
}
} // namespace

Operator compose(const Operator& lhs, const Operator& rhs)
{
    require_same_space(lhs, rhs);
    return {lhs.space(), lhs.matrix() * rhs.matrix()};
}

Operator add(const Operator& lhs, const Operator& rhs)
{
    require_same_space(lhs, rhs);
    return {lhs.space(), lhs.matrix() + rhs.matrix()};
}

Operator scale(const Operator& op, complex factor)
{
    return {op.space(), factor * op.matrix()};
}

Operator commutator(const Operator& lhs, const Operator& rhs)
{
    require_same_space(lhs, rhs);
    return {lhs.space(),
            lhs.matrix() * rhs.matrix() - rhs.matrix() * lhs.matrix()};
}

Vector basis_ket(const TwoModeSpace& space, int n_a, int n_b)
{
    if (n_a < 0 || n_a >= space.dim_a() || n_b < 0 || n_b >= space.dim_b()) {
        throw std::out_of_range("basis state outside truncated space");
    }
    Vector v = Vector::Zero(space.dim());
    v(space.index(n_a, n_b)) = 1.0;
    return v;
}

void write_csv(std::ostream& os, const Operator& op)
{
    os << "row,col,re,im\n";
    const Matrix& m = op.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (m(r, c) != complex(0.0)) {
                os << r << ',' << c << ',' << format_double(m(r, c).real())
                   << ',' << format_double(m(r, c).imag()) << '\n';
            }
        }
    }
}

} // namespace qzb
