#include "check_suite.hpp"

#include <cmath>
#include <limits>

#include "qzb/errors.hpp"
#include "qzb/format.hpp"
#include "qzb/integrator.hpp"
#include "qzb/oracles.hpp"

namespace qzb::tools {

namespace {

std::string label(double g, double theta)
{
    return "g=" + format_double(g) + " theta=" + format_double(theta);
}

CheckResult failed(const char* suite, const std::string& name,
                   const std::exception_ptr& failure, double tolerance)
{
    std::string tag = "no_result";
    try {
        if (failure) {
            std::rethrow_exception(failure);
        }
    } catch (const SimulationError& e) {
        tag = e.tag();
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {suite, name + " error=" + tag, nan, nan,
            std::numeric_limits<double>::infinity(), tolerance, false};
}

void tmsv_suite(std::vector<CheckResult>& out)
{
    IntegratorOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-12;
    const std::vector<double> thetas{0.3, 0.9, 1.5};
    const ZenoModel model(TwoModeSpace(8, 8), 1.0, 0.0, 0.0);
    const TruncatedRun run = auto_truncate(model, thetas, opts, {8, 8, 256});
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const auto exact = tmsv_distribution(thetas[k], 5);
        const PairStatistics& st = run.trajectory.stats[k + 1];
        double worst = 0.0;
        std::size_t worst_n = 0;
        for (std::size_t n = 0; n < exact.size(); ++n) {
            const double d = std::abs(st.at(n) - exact[n]);
            if (d > worst) {
                worst = d;
                worst_n = n;
            }
        }
        out.push_back({"tmsv",
                       label(0.0, thetas[k]) + " P" + std::to_string(worst_n),
                       st.at(worst_n), exact[worst_n], worst, 1e-7,
                       worst <= 1e-7});
    }
}

void expm_suite(std::vector<CheckResult>& out)
{
    IntegratorOptions opts;
    opts.boundary_tolerance = std::numeric_limits<double>::infinity();
    const std::vector<std::pair<int, int>> spaces{{3, 3}, {4, 9}, {6, 6}};
    const double thetas[] = {0.5, 1.5};
    for (const auto& [da, db] : spaces) {
        const TwoModeSpace space(da, db);
        for (double g : {0.0, 3.0, 30.0}) {
            const ZenoModel model(space, 1.0, g, 0.0);
            const DensityMatrix rho0 = vacuum_state(space);
            const std::string name =
                std::to_string(da) + "x" + std::to_string(db) + " ";
            const EvolveOutcome run = try_evolve(model, rho0, thetas, opts);
            for (std::size_t k = 0; k < 2; ++k) {
                const DensityMatrix ref =
                    matrix_exponential_reference(model, rho0, thetas[k]);
                if (k + 1 >= run.trajectory.states.size()) {
                    out.push_back(failed("expm", name + label(g, thetas[k]),
                                         run.failure, 1e-7));
                    continue;
                }
                const Matrix& got = run.trajectory.states[k + 1].matrix();
                Eigen::Index r = 0, c = 0;
                const double worst =
                    (got - ref.matrix()).cwiseAbs().maxCoeff(&r, &c);
                out.push_back({"expm", name + label(g, thetas[k]),
                               std::abs(got(r, c)), std::abs(ref.matrix()(r, c)),
                               worst, 1e-7, worst <= 1e-7});
            }
        }
    }
}

void mc_suite(std::vector<CheckResult>& out, int workers)
{
    const std::vector<double> thetas{0.5, 1.0, 1.5};
    IntegratorOptions opts;
    opts.store_states = false;
    McOptions mc;
    mc.worker_count = workers;
    for (double g : {3.0, 10.0, 30.0}) {
        const ZenoModel seed(TwoModeSpace(8, 8), 1.0, g, 0.0);
        const TruncatedRun me = auto_truncate(seed, thetas, opts);
        const McResult est = mc_evolve(seed.with_space(me.space), thetas, mc);
        for (std::size_t k = 0; k < thetas.size(); ++k) {
            const PairStatistics& exact = me.trajectory.stats[k + 1];
            const auto compare = [&](const char* what, double observed,
                                     double expected, double stderr_) {
                const double diff = std::abs(observed - expected);
                const double z = stderr_ > 0.0
                                     ? diff / stderr_
                                     : (diff == 0.0 ? 0.0
                                                    : std::numeric_limits<
                                                          double>::infinity());
                out.push_back({"mc", label(g, thetas[k]) + " " + what,
                               observed, expected, z, 4.0, z <= 4.0});
            };
            compare("P1", est.stats[k].p1, exact.p1, est.p1_stderr[k]);
            compare("P_multi", est.stats[k].p_multi, exact.p_multi,
                    est.p_multi_stderr[k]);
        }
    }
}

} // namespace

std::vector<CheckResult> run_checks(CheckLevel level, int workers)
{
    std::vector<CheckResult> out;
    tmsv_suite(out);
    expm_suite(out);
    if (level == CheckLevel::full) {
        mc_suite(out, workers);
    }
    return out;
}

} // namespace qzb::tools
