#include "doctest.h"

#include <sstream>

#include "qzb/density_matrix.hpp"
#include "qzb/fock.hpp"

using namespace qzb;

TEST_CASE("space dimensions and ordering")
{
    CHECK(TwoModeSpace(2, 2).dim() == 4);
    CHECK(TwoModeSpace(9, 9).dim() == 81);
    const TwoModeSpace s(3, 5);
    CHECK(s.index(2, 4) == 14);
    CHECK(s.index(2, 4) == s.dim() - 1);
    for (int i = 0; i < s.dim(); ++i) {
        CHECK(s.index(s.n_a(i), s.n_b(i)) == i);
    }
    CHECK_THROWS_AS(TwoModeSpace(1, 4), std::invalid_argument);
    CHECK_THROWS_AS(TwoModeSpace(4, 0), std::invalid_argument);
}

TEST_CASE("ladder operators on basis kets")
{
    const TwoModeSpace s(4, 4);
    const Operator a = annihilation(s, Mode::signal);

    const Vector down = a.apply(basis_ket(s, 1, 0));
    CHECK(down.isApprox(basis_ket(s, 0, 0)));

    for (int nb = 0; nb < 4; ++nb) {
        CHECK(a.apply(basis_ket(s, 0, nb)).norm() == 0.0);
    }

    const Operator a2 = compose(a, a);
    const Vector v = a2.apply(basis_ket(s, 2, 2));
    CHECK(std::abs(v(s.index(0, 2)) - std::sqrt(2.0)) < 1e-15);
    CHECK((v - std::sqrt(2.0) * basis_ket(s, 0, 2)).norm() < 1e-15);

    CHECK(adjoint(a).apply(basis_ket(s, 0, 0)).isApprox(basis_ket(s, 1, 0)));
    CHECK(creation(s, Mode::signal).matrix() == adjoint(a).matrix());

    const Operator n = embed_number(s, Mode::signal);
    for (int k = 0; k < 4; ++k) {
        CHECK(n(s.index(3, k), s.index(3, k)) == complex(3.0));
    }

    const Operator tpa = compose(adjoint(a2), a2);
    for (int na = 0; na < 4; ++na) {
        const int i = s.index(na, 1);
        CHECK(std::abs(tpa(i, i) - complex(na * (na - 1))) < 1e-13);
    }
}

TEST_CASE("commutator identities")
{
    for (auto [da, db] : {std::pair{3, 3}, std::pair{5, 4}, std::pair{2, 7}}) {
        const TwoModeSpace s(da, db);
        for (Mode m : {Mode::signal, Mode::idler}) {
            const Operator a = annihilation(s, m);
            const Operator c = commutator(a, adjoint(a));
            for (int i = 0; i < s.dim(); ++i) {
                for (int j = 0; j < s.dim(); ++j) {
                    const bool interior = s.photons(i, m) < s.cutoff(m) - 1;
                    const complex expected = (i == j && interior) ? 1.0 : 0.0;
                    if (s.photons(i, m) == s.cutoff(m) - 1 && i == j) {
                        // Boundary level: 1 - cutoff from the missing state.
                        CHECK(std::abs(c(i, j) - complex(1.0 - s.cutoff(m))) < 1e-12);
                    } else {
                        CHECK(std::abs(c(i, j) - expected) < 1e-12);
                    }
                }
            }
            CHECK(adjoint(adjoint(a)).matrix() == a.matrix());
            CHECK(adjoint(a).matrix() == a.matrix().adjoint());
        }
        const Operator ab = commutator(annihilation(s, Mode::signal),
                                       annihilation(s, Mode::idler));
        CHECK(ab.matrix().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("operator algebra rejects mismatched spaces")
{
    const Operator x = identity(TwoModeSpace(2, 3));
    const Operator y = identity(TwoModeSpace(3, 2));
    CHECK_THROWS_AS(compose(x, y), std::invalid_argument);
    CHECK_THROWS_AS(add(x, y), std::invalid_argument);
    CHECK_THROWS_AS(Operator(TwoModeSpace(2, 2), Matrix::Zero(3, 3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(basis_ket(TwoModeSpace(2, 2), 2, 0), std::out_of_range);
    CHECK(scale(x, 2.0).matrix() == 2.0 * x.matrix());
}

TEST_CASE("vacuum state")
{
    const DensityMatrix v = vacuum_state(TwoModeSpace(2, 2));
    CHECK(v.matrix()(0, 0) == complex(1.0));
    CHECK(v.matrix().cwiseAbs().sum() == 1.0);
    CHECK(v.trace() == complex(1.0));
    CHECK(v.purity() == doctest::Approx(1.0));
    CHECK(v.min_eigenvalue() >= 0.0);
}

TEST_CASE("operator csv dump lists nonzero entries")
{
    std::ostringstream os;
    write_csv(os, annihilation(TwoModeSpace(2, 2), Mode::idler));
    CHECK(os.str() == "row,col,re,im\n0,1,1,0\n2,3,1,0\n");
}
