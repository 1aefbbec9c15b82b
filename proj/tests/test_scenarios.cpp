#include "doctest.h"

#include <cmath>
#include <sstream>

#include "qzb/errors.hpp"
#include "qzb/scenarios.hpp"

using namespace qzb;

namespace {

std::string csv(const SweepResult& r)
{
    std::ostringstream os;
    write_sweep_csv(os, r);
    return os.str();
}

} // namespace

TEST_CASE("sweep output does not depend on the worker count")
{
    SweepSpec spec = figure2_spec(21);
    spec.worker_count = 1;
    const std::string one = csv(run_sweep(spec));
    spec.worker_count = 8;
    CHECK(csv(run_sweep(spec)) == one);
}

TEST_CASE("sweep rows are ordered by g then theta")
{
    SweepSpec spec;
    spec.g_values = {10.0, 0.0, 3.0};
    spec.theta_grid = {0.2, 0.4};
    spec.worker_count = 3;
    const SweepResult r = run_sweep(spec);
    REQUIRE(r.rows.size() == 6);
    const double want[][2] = {{0, 0.2}, {0, 0.4}, {3, 0.2},
                              {3, 0.4}, {10, 0.2}, {10, 0.4}};
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(r.rows[k].g == want[k][0]);
        CHECK(r.rows[k].theta == want[k][1]);
        CHECK(r.rows[k].error.empty());
    }
}

TEST_CASE("invalid sweeps are rejected")
{
    SweepSpec spec;
    spec.theta_grid = {};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
    spec.theta_grid = {0.5, 0.4};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
    spec.theta_grid = {-0.1};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
    spec.theta_grid = {0.5};
    spec.g_values = {};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
}

TEST_CASE("a leaking row is tagged and the others survive")
{
    SweepSpec spec;
    spec.g_values = {0.0};
    spec.theta_grid = {0.01, 0.02, 3.0};
    spec.auto_truncate = false;
    spec.truncation = {4, 4, 4};
    const SweepResult r = run_sweep(spec);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].error.empty());
    CHECK(r.rows[1].error.empty());
    CHECK(r.rows[2].error == "truncation_leak");
    CHECK(r.rows[1].stats.p1 > 0.0);
    const std::string text = csv(r);
    CHECK(text.find("error=truncation_leak") != std::string::npos);
    CHECK(sweep_csv_row(r.rows[2]) == "0,3,3,,,,,,,,,4,4,error=truncation_leak");
}

TEST_CASE("blockade ordering at theta 1.2")
{
    SweepSpec spec;
    spec.g_values = {0.0, 3.0, 10.0, 30.0};
    spec.theta_grid = {1.2};
    spec.truncation.ceiling = 256;
    const SweepResult r = run_sweep(spec);
    for (std::size_t k = 1; k < r.rows.size(); ++k) {
        CHECK(r.rows[k].stats.p_multi < r.rows[k - 1].stats.p_multi);
    }
}

TEST_CASE("weak pump: multi-pair weight over P1 squared is cosh^4 theta")
{
    SweepSpec spec = figure2_spec(201);
    spec.g_values = {0.0};
    std::vector<double> grid;
    for (int k = 1; k <= 30; ++k) {
        grid.push_back(0.01 * k);
    }
    spec.theta_grid = grid;
    const SweepResult r = run_sweep(spec);
    for (const auto& row : r.rows) {
        const double p1 = row.stats.p1;
        const double ratio = row.stats.p_multi / (p1 * p1);
        CHECK(ratio == doctest::Approx(std::pow(std::cosh(row.theta), 4))
                           .epsilon(1e-5));
        if (row.theta <= 0.26) {
            CHECK(std::abs(row.stats.p_multi - p1 * p1) <= 0.15 * p1 * p1);
        }
    }
}

TEST_CASE("design point without pump stays in the vacuum")
{
    const DesignPointResult r = design_point({0.0, 5.0, 11.0, true});
    CHECK(r.p1() == 0.0);
    CHECK(r.p2() == 0.0);
    CHECK(r.stats.at(0) == 1.0);
}

TEST_CASE("design point equals the dimensionless run")
{
    IntegratorOptions tight;
    tight.rel_tol = 1e-12;
    tight.abs_tol = 1e-15;
    tight.trace_tolerance = 1e-7;
    for (const DesignPoint dp : {DesignPoint{0.1, 2.0, 10.0, true},
                                 DesignPoint{0.1, 10.0, 11.0, true},
                                 DesignPoint{0.3, 1.0, 2.0, false}}) {
        const DesignPointResult r = design_point(dp, tight);
        // Same physics integrated directly in GHz / ns.
        const double omega = dp.effective_omega();
        const ZenoModel physical(TwoModeSpace(r.dim_a, r.dim_b), omega,
                                 dp.gamma_ghz, 0.0);
        const Trajectory t = evolve(physical, vacuum_state(physical.space()),
                                    std::vector<double>{dp.tau_ns}, tight);
        const PairStatistics& direct = t.stats.back();
        CHECK(r.g == doctest::Approx(dp.gamma_ghz / omega));
        CHECK(r.theta == doctest::Approx(omega * dp.tau_ns));
        for (std::size_t n = 0; n < direct.p.size(); ++n) {
            CHECK(std::abs(direct.at(n) - r.stats.at(n)) <= 1e-10);
        }
        CHECK(std::abs(direct.p_multi - r.stats.p_multi) <= 1e-10);
    }
    CHECK_THROWS_AS(design_point({-0.1, 1.0, 1.0, true}), ConfigError);
}

TEST_CASE("peak single-pair probability without absorption")
{
    const auto table = peak_p1_vs_gamma({0.0});
    REQUIRE(table.size() == 1);
    CHECK(std::abs(table[0].p1_max - 0.25) < 1e-4);
    CHECK(std::abs(table[0].theta_star - std::log(1.0 + std::sqrt(2.0))) < 1e-3);
    CHECK_THROWS_AS(peak_p1_vs_gamma({}), ConfigError);
}
