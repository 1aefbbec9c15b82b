#include "doctest.h"

#include "qzb/errors.hpp"
#include "qzb/model.hpp"
#include "reference.hpp"
#include "support_liouvillian.hpp"

using namespace qzb;

namespace {

std::vector<detail::SupportLiouvillian::Entry> all_entries(const Matrix& m)
{
    std::vector<detail::SupportLiouvillian::Entry> out;
    for (int c = 0; c < m.cols(); ++c) {
        for (int r = 0; r < m.rows(); ++r) {
            out.push_back({r, c, m(r, c)});
        }
    }
    return out;
}

} // namespace

TEST_CASE("hamiltonian matrix elements")
{
    const TwoModeSpace s(4, 4);
    const double omega = 0.7;
    const ZenoModel model(s, omega, 0.0, 0.0);
    const Operator h = model.hamiltonian();
    CHECK(h(s.index(1, 1), s.index(0, 0)) == complex(omega));
    CHECK(std::abs(h(s.index(2, 2), s.index(1, 1)) - 2.0 * omega) < 1e-15);
    CHECK((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h.matrix() - ref::ladder_pair_hamiltonian(s, omega))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK((pair_hamiltonian(s, omega).matrix() - h.matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK(ZenoModel(s, 0.0, 1.0, 0.0).hamiltonian().matrix().isZero(0.0));
}

TEST_CASE("model parameter validation")
{
    const TwoModeSpace s(3, 3);
    CHECK_THROWS_AS(ZenoModel(s, -1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ZenoModel(s, 1.0, -0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ZenoModel(s, 1.0, 0.0, NAN), std::invalid_argument);
    const ZenoModel m(s, 1.0, 2.0, 3.0);
    CHECK(m.gamma() == 5.0);
    CHECK(m.channels().size() == 2);
    CHECK(ZenoModel(s, 1.0, 2.0, 0.0).channels().size() == 1);
}

TEST_CASE("rhs on the vacuum")
{
    const TwoModeSpace s(3, 3);
    const double omega = 1.3;
    const ZenoModel model(s, omega, 4.0, 2.0);
    const Matrix d = lindblad_rhs(model, vacuum_state(s));
    const int i00 = s.index(0, 0);
    const int i11 = s.index(1, 1);
    CHECK(std::abs(d(i11, i00) - complex(0.0, -omega)) < 1e-15);
    CHECK(std::abs(d(i00, i11) - complex(0.0, omega)) < 1e-15);
    Matrix rest = d;
    rest(i11, i00) = rest(i00, i11) = 0.0;
    CHECK(rest.cwiseAbs().maxCoeff() == 0.0);

    const ZenoModel closed(s, omega, 0.0, 0.0);
    const Matrix h = closed.hamiltonian().matrix();
    const Matrix vac = vacuum_state(s).matrix();
    const Matrix commutator_term = complex(0.0, -1.0) * (h * vac - vac * h);
    CHECK((lindblad_rhs(closed, vacuum_state(s)) - commutator_term)
              .cwiseAbs()
              .maxCoeff() < 1e-15);
}

TEST_CASE("two-photon absorption from |2,2>")
{
    const TwoModeSpace s(3, 3);
    const double ga = 0.8;
    const ZenoModel model(s, 0.0, ga, 0.0);
    const DensityMatrix rho = DensityMatrix::pure(s, basis_ket(s, 2, 2));
    const Matrix d = lindblad_rhs(model, rho);
    CHECK(d(s.index(0, 2), s.index(0, 2)).real() == doctest::Approx(2.0 * ga));
    CHECK(d(s.index(2, 2), s.index(2, 2)).real() == doctest::Approx(-2.0 * ga));
}

TEST_CASE("liouvillian agrees with rhs")
{
    CHECK(liouvillian_matrix(ZenoModel(TwoModeSpace(2, 3), 0.0, 0.0, 0.0))
              .isZero(0.0));
    for (auto [da, db] : {std::pair{3, 3}, std::pair{2, 4}, std::pair{4, 3}}) {
        const TwoModeSpace s(da, db);
        const ZenoModel model(s, 0.9, 2.5, 1.1);
        const Matrix m = liouvillian_matrix(model);
        const DensityMatrix vac = vacuum_state(s);
        CHECK((unvectorize(m * vectorize(vac.matrix()), s.dim()) -
               lindblad_rhs(model, vac))
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
        for (unsigned seed = 1; seed <= 3; ++seed) {
            const Matrix rho = ref::random_density(s, seed);
            const Matrix want = ref::rhs(s, 0.9, 2.5, 1.1, rho);
            const Matrix got_dense = lindblad_rhs(model, {s, rho});
            const Matrix got_m = unvectorize(m * vectorize(rho), s.dim());
            CHECK((got_dense - want).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((got_m - want).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(std::abs(got_m.trace()) < 1e-12 * s.dim());
            CHECK((got_dense - got_dense.adjoint()).cwiseAbs().maxCoeff() <
                  1e-12);
        }
    }
}

TEST_CASE("support-restricted generator matches the dense rhs")
{
    const TwoModeSpace s(4, 3);
    const ZenoModel model(s, 1.1, 3.0, 0.4);
    const Matrix rho = ref::random_density(s, 7);
    const detail::SupportLiouvillian op(model, all_entries(rho));
    CHECK(op.size() == s.dim() * s.dim());
    Vector out;
    op.apply(op.gather(all_entries(rho)), out);
    CHECK((op.scatter(out) - ref::rhs(s, 1.1, 3.0, 0.4, rho))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("support of the vacuum keeps the ladder selection rules")
{
    const TwoModeSpace s(6, 6);
    const detail::SupportLiouvillian op(ZenoModel(s, 1.0, 3.0, 0.0),
                                        {{0, 0, complex(1.0)}});
    for (int p = 0; p < op.size(); ++p) {
        for (int idx : {op.row(p), op.col(p)}) {
            const int na = s.n_a(idx);
            const int nb = s.n_b(idx);
            CHECK((nb - na) % 2 == 0);
            CHECK(na <= nb);
        }
    }
    CHECK(op.size() < s.dim() * s.dim());
}

TEST_CASE("dense liouvillian size guard")
{
    CHECK_THROWS_AS(liouvillian_matrix(ZenoModel(TwoModeSpace(11, 11), 1.0,
                                                 0.0, 0.0)),
                    DimensionGuard);
}

TEST_CASE("with_space keeps parameters")
{
    const ZenoModel m(TwoModeSpace(3, 3), 0.5, 2.0, 1.0);
    const ZenoModel n = m.with_space(TwoModeSpace(5, 6));
    CHECK(n.space() == TwoModeSpace(5, 6));
    CHECK(n.omega() == 0.5);
    CHECK(n.gamma_a() == 2.0);
    CHECK(n.gamma_b() == 1.0);
}
