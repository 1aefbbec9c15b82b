#pragma once

#include <complex>
#include <iosfwd>

#include <Eigen/Dense>

namespace qzb {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Mode { signal, idler };

/**
 * Truncated tensor-product Fock space of the signal (a) and idler (b) modes.
 *
 * Mode a keeps the number states |0>..|dim_a-1>, mode b keeps |0>..|dim_b-1>.
 * Basis vectors are ordered with the idler index running fastest:
 *
 *     index(n_a, n_b) = n_a * dim_b + n_b
 *
 * This ordering is part of the external contract (CSV dumps, vectorised
 * density matrices) and must not change.
 */
class TwoModeSpace
{
public:
    /// Throws std::invalid_argument if either cutoff is below 2.
    TwoModeSpace(int dim_a, int dim_b);

    int dim_a() const noexcept { return m_dim_a; }
    int dim_b() const noexcept { return m_dim_b; }
    int dim() const noexcept { return m_dim_a * m_dim_b; }

    int cutoff(Mode mode) const noexcept
    {
        return mode == Mode::signal ? m_dim_a : m_dim_b;
    }

    int index(int n_a, int n_b) const noexcept { return n_a * m_dim_b + n_b; }
    int n_a(int index) const noexcept { return index / m_dim_b; }
    int n_b(int index) const noexcept { return index % m_dim_b; }

    int photons(int index, Mode mode) const noexcept
    {
        return mode == Mode::signal ? n_a(index) : n_b(index);
    }

    bool operator==(const TwoModeSpace&) const = default;

private:
    int m_dim_a;
    int m_dim_b;
};

TwoModeSpace make_space(int dim_a, int dim_b);

/// Dense operator on a TwoModeSpace. Immutable once built.
class Operator
{
public:
    /// Throws std::invalid_argument if the matrix is not dim x dim.
    Operator(TwoModeSpace space, Matrix matrix);

    const TwoModeSpace& space() const noexcept { return m_space; }
    const Matrix& matrix() const noexcept { return m_matrix; }

    complex operator()(int row, int col) const { return m_matrix(row, col); }

    Vector apply(const Vector& ket) const;

private:
    TwoModeSpace m_space;
    Matrix m_matrix;
};

/// Hard-truncated lowering operator: <n-1|a|n> = sqrt(n) for n < cutoff.
Operator annihilation(const TwoModeSpace& space, Mode mode);
Operator creation(const TwoModeSpace& space, Mode mode);
Operator embed_number(const TwoModeSpace& space, Mode mode);
Operator identity(const TwoModeSpace& space);

Operator adjoint(const Operator& op);
/// Matrix product lhs * rhs. Throws std::invalid_argument on space mismatch.
Operator compose(const Operator& lhs, const Operator& rhs);
Operator add(const Operator& lhs, const Operator& rhs);
Operator scale(const Operator& op, complex factor);
Operator commutator(const Operator& lhs, const Operator& rhs);

/// Unit vector |n_a, n_b>.
Vector basis_ket(const TwoModeSpace& space, int n_a, int n_b);

/// Writes `row,col,re,im` with one line per nonzero element.
void write_csv(std::ostream& os, const Operator& op);

} // namespace qzb
