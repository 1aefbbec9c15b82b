#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qzb/errors.hpp"
#include "qzb/integrator.hpp"
#include "qzb/oracles.hpp"

using namespace qzb;

TEST_CASE("squeezed vacuum closed form")
{
    const auto zero = tmsv_distribution(0.0, 4);
    CHECK(zero[0] == 1.0);
    CHECK(zero[1] == 0.0);

    // Extended-precision evaluation of tanh^{2n}(r) / cosh^2(r) at r = 0.5.
    const auto p = tmsv_distribution(0.5, 3);
    CHECK(p[0] == doctest::Approx(0.78644773296592741015).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.16794769627868074324).epsilon(1e-15));
    CHECK(p[2] == doctest::Approx(0.03586561128346214946).epsilon(1e-15));
    CHECK(p[3] == doctest::Approx(0.0076591825981461558888).epsilon(1e-15));

    CHECK(tmsv_distribution(0.9, 1)[1] ==
          doctest::Approx(0.2498288445606770772).epsilon(1e-14));
    CHECK(tmsv_p_multi(0.7) ==
          doctest::Approx(std::pow(std::tanh(0.7), 4)).epsilon(1e-15));

    // Peak single-pair probability: 1/4 at sinh^2 r = 1.
    const double r_star = std::log(1.0 + std::sqrt(2.0));
    CHECK(tmsv_distribution(r_star, 1)[1] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(tmsv_distribution(-0.1, 2), std::invalid_argument);
}

TEST_CASE("adiabatic elimination closed form")
{
    CHECK(adiabatic_p1(1.0, std::numbers::pi / 2) == doctest::Approx(1.0));
    CHECK(adiabatic_p2(1.0, 30.0, std::numbers::pi / 2) ==
          doctest::Approx(4.0 / 900.0));
    CHECK(adiabatic_p1(1.0, 0.0) == 0.0);
    CHECK(adiabatic_p2(1.0, 3.0, 0.0) == 0.0);
    CHECK_THROWS_AS(adiabatic_p2(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("jump unraveling without absorption is deterministic")
{
    const TwoModeSpace s(32, 32);
    const ZenoModel model(s, 1.0, 0.0, 0.0);
    McOptions o;
    o.trajectory_count = 5;
    const McResult mc = mc_evolve(model, std::vector<double>{0.4, 0.8}, o);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto exact = tmsv_distribution(mc.xi[k], 4);
        for (std::size_t n = 0; n <= 4; ++n) {
            CHECK(std::abs(mc.stats[k].at(n) - exact[n]) < 1e-10);
        }
        CHECK(mc.p1_stderr[k] < 1e-8);
    }
}

TEST_CASE("jump unraveling agrees with the master equation")
{
    const std::vector<double> thetas{0.5, 1.0, 1.4};
    const ZenoModel seed(TwoModeSpace(8, 8), 1.0, 10.0, 0.0);
    const TruncatedRun me = auto_truncate(seed, thetas, {});
    McOptions o;
    o.trajectory_count = 4000;
    const McResult mc = mc_evolve(seed.with_space(me.space), thetas, o);
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const PairStatistics& exact = me.trajectory.stats[k + 1];
        for (std::size_t n = 0; n < exact.p.size(); ++n) {
            if (exact.at(n) > 1e-3) {
                CHECK(std::abs(mc.stats[k].at(n) - exact.at(n)) <=
                      4 * mc.p_stderr[k][n]);
            }
        }
    }
    CHECK(std::abs(mc.stats[2].p1 - 0.6) <= 3 * mc.p1_stderr[2] + 1e-3);
}

TEST_CASE("seeded jump records are reproducible")
{
    const ZenoModel model(TwoModeSpace(6, 12), 1.0, 10.0, 0.0);
    McOptions o;
    o.trajectory_count = 1;
    o.record_jumps = 1;
    o.rng_seed = 7;
    const McResult a = mc_evolve(model, 3.0, o);
    const McResult b = mc_evolve(model, 3.0, o);
    REQUIRE(a.jump_records.size() == 1);
    CHECK(a.jump_records == b.jump_records);
    CHECK(a.rng_algorithm == mc_rng_algorithm());
    std::ostringstream x, y;
    write_mc_csv(x, a, 1.0);
    write_mc_csv(y, b, 1.0);
    CHECK(x.str() == y.str());

    // Frozen from the first verified run.
    REQUIRE(a.jump_records[0].size() == 2);
    CHECK(a.jump_records[0][0].channel == 0);
    CHECK(a.jump_records[0][0].xi == doctest::Approx(1.240133621).epsilon(1e-9));
    CHECK(a.jump_records[0][1].channel == 0);
    CHECK(a.jump_records[0][1].xi == doctest::Approx(2.37378468699).epsilon(1e-9));
}

TEST_CASE("worker count does not change the estimate")
{
    const ZenoModel model(TwoModeSpace(6, 12), 1.0, 3.0, 0.0);
    McOptions o;
    o.trajectory_count = 300;
    o.worker_count = 1;
    std::ostringstream one, four;
    write_mc_csv(one, mc_evolve(model, std::vector<double>{0.5, 1.0}, o), 1.0);
    o.worker_count = 4;
    write_mc_csv(four, mc_evolve(model, std::vector<double>{0.5, 1.0}, o), 1.0);
    CHECK(one.str() == four.str());
}

TEST_CASE("too coarse a step is refused")
{
    const ZenoModel model(TwoModeSpace(6, 6), 1.0, 50.0, 0.0);
    McOptions o;
    o.trajectory_count = 10;
    o.step = 0.5;
    try {
        mc_evolve(model, 2.0, o);
        FAIL("expected mc_step");
    } catch (const ConfigError& e) {
        CHECK(e.tag() == "mc_step");
    }
    o.step = 0.0;
    CHECK_THROWS_AS(mc_evolve(model, 1.0, o), ConfigError);
}
