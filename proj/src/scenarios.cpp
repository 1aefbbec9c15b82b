#include "qzb/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "qzb/errors.hpp"
#include "qzb/format.hpp"
#include "qzb/model.hpp"

namespace qzb {

namespace {

std::string tag_of(const std::exception_ptr& failure)
{
    try {
        std::rethrow_exception(failure);
    } catch (const SimulationError& e) {
        return e.tag();
    } catch (const std::exception&) {
        return "internal_error";
    }
}

struct PanelOutcome
{
    TwoModeSpace space{2, 2};
    EvolveOutcome outcome;
};

PanelOutcome run_panel(const SweepSpec& spec, double g)
{
    const TwoModeSpace start(spec.truncation.initial_dim_a,
                             spec.truncation.initial_dim_b);
    const ZenoModel model(start, 1.0, g, spec.gamma_b_ratio * g);
    IntegratorOptions opts = spec.integrator;
    opts.convention = spec.convention;
    opts.store_states = false;
    if (spec.auto_truncate) {
        TruncatedOutcome t =
            try_auto_truncate(model, spec.theta_grid, opts, spec.truncation);
        return {t.space, std::move(t.outcome)};
    }
    return {start, try_evolve(model, vacuum_state(start), spec.theta_grid,
                              opts)};
}

std::vector<SweepRow> panel_rows(const SweepSpec& spec, double g)
{
    std::vector<SweepRow> rows(spec.theta_grid.size());
    PanelOutcome out;
    std::string failure_tag;
    try {
        out = run_panel(spec, g);
        if (!out.outcome.ok()) {
            failure_tag = tag_of(out.outcome.failure);
        }
    } catch (...) {
        failure_tag = tag_of(std::current_exception());
    }
    const Trajectory& traj = out.outcome.trajectory;
    // The trajectory always opens with xi = 0.
    const std::size_t offset = spec.theta_grid.front() == 0.0 ? 0 : 1;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        SweepRow& row = rows[k];
        row.g = g;
        row.theta = spec.theta_grid[k];
        row.dim_a = out.space.dim_a();
        row.dim_b = out.space.dim_b();
        const std::size_t idx = k + offset;
        if (idx < traj.size()) {
            row.stats = traj.stats[idx];
            row.other_stats = traj.other_stats[idx];
            row.diagnostics = traj.diagnostics[idx];
        } else {
            row.error = failure_tag.empty() ? "internal_error" : failure_tag;
        }
    }
    return rows;
}

} // namespace

void SweepSpec::validate() const
{
    if (g_values.empty()) {
        throw ConfigError("g list is empty", "invalid_grid");
    }
    for (double g : g_values) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw ConfigError("g values must be finite and >= 0",
                              "invalid_grid");
        }
    }
    if (theta_grid.empty()) {
        throw ConfigError("theta grid is empty", "invalid_grid");
    }
    for (std::size_t k = 0; k < theta_grid.size(); ++k) {
        if (!(theta_grid[k] >= 0.0) || !std::isfinite(theta_grid[k]) ||
            (k > 0 && !(theta_grid[k] > theta_grid[k - 1]))) {
            throw ConfigError("theta grid must be finite, >= 0 and strictly "
                              "increasing",
                              "invalid_grid");
        }
    }
    if (!(gamma_b_ratio >= 0.0) || !std::isfinite(gamma_b_ratio)) {
        throw ConfigError("gamma_b_ratio must be finite and >= 0",
                          "invalid_options");
    }
    if (worker_count < 1) {
        throw ConfigError("worker_count must be >= 1", "invalid_options");
    }
    if (truncation.initial_dim_a < 2 || truncation.initial_dim_b < 2 ||
        truncation.ceiling <
            std::max(truncation.initial_dim_a, truncation.initial_dim_b)) {
        throw ConfigError("invalid truncation policy", "invalid_options");
    }
    integrator.validate();
}

SweepResult run_sweep(const SweepSpec& spec)
{
    spec.validate();
    std::vector<double> gs = spec.g_values;
    std::stable_sort(gs.begin(), gs.end());

    std::vector<std::vector<SweepRow>> parts(gs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t k = next++; k < gs.size(); k = next++) {
            parts[k] = panel_rows(spec, gs[k]);
        }
    };
    const std::size_t workers =
        std::min<std::size_t>(std::size_t(spec.worker_count), gs.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    SweepResult result;
    for (auto& part : parts) {
        for (auto& row : part) {
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

SweepSpec figure2_spec(int grid_points)
{
    SweepSpec spec;
    spec.g_values = {0.0, 3.0, 10.0, 30.0};
    spec.theta_grid = uniform_grid(0.0, 2.0, grid_points);
    spec.gamma_b_ratio = 0.0;
    spec.truncation = {8, 8, 256};
    return spec;
}

SweepResult figure2_sweep(const SweepSpec& spec)
{
    return run_sweep(spec);
}

std::vector<SweepRow> panel(const SweepResult& result, double g)
{
    std::vector<SweepRow> rows;
    for (const auto& row : result.rows) {
        if (row.g == g) {
            rows.push_back(row);
        }
    }
    return rows;
}

std::string sweep_csv_header()
{
    return "g," + trajectory_csv_header() + ",dim_a,dim_b,error";
}

std::string sweep_csv_row(const SweepRow& row, bool other_convention)
{
    std::string line = format_double(row.g) + ',';
    if (row.error.empty()) {
        line += trajectory_csv_row(row.theta, 1.0,
                                   other_convention ? row.other_stats
                                                    : row.stats,
                                   row.diagnostics);
    } else {
        line += format_double(row.theta) + ',' + format_double(row.theta) +
                ",,,,,,,,";
    }
    line += ',' + std::to_string(row.dim_a) + ',' + std::to_string(row.dim_b);
    line += ',';
    if (!row.error.empty()) {
        line += "error=" + row.error;
    }
    return line;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result,
                     bool other_convention)
{
    os << sweep_csv_header() << '\n';
    for (const auto& row : result.rows) {
        os << sweep_csv_row(row, other_convention) << '\n';
    }
}

// Design points ----------------------------------------------------------------

void DesignPoint::validate() const
{
    for (double v : {omega_ghz, gamma_ghz, tau_ns}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("design point values must be finite and >= 0",
                              "invalid_options");
        }
    }
}

double DesignPoint::effective_omega() const
{
    return cp_scheme ? std::sqrt(2.0) * omega_ghz : omega_ghz;
}

DesignPointResult design_point(const DesignPoint& dp,
                               const IntegratorOptions& options,
                               const TruncationPolicy& policy)
{
    dp.validate();
    DesignPointResult r;
    r.point = dp;
    r.effective_omega = dp.effective_omega();
    r.theta = r.effective_omega * dp.tau_ns;

    const TwoModeSpace start(policy.initial_dim_a, policy.initial_dim_b);
    double coordinate = 0.0;
    ZenoModel model(start, 0.0, dp.gamma_ghz, 0.0);
    if (r.effective_omega > 0.0) {
        r.g = dp.gamma_ghz / r.effective_omega;
        model = ZenoModel(start, 1.0, r.g, 0.0);
        coordinate = r.theta;
    } else {
        coordinate = dp.tau_ns;
    }

    IntegratorOptions opts = options;
    opts.store_states = false;
    const double points[] = {coordinate};
    const TruncatedRun run = auto_truncate(model, points, opts, policy);
    const Trajectory& traj = run.trajectory;
    const std::size_t last = traj.size() - 1;
    r.stats = traj.stats[last];
    r.other_stats = traj.other_stats[last];
    r.diagnostics = traj.diagnostics[last];
    r.dim_a = run.space.dim_a();
    r.dim_b = run.space.dim_b();
    return r;
}

std::string design_point_csv_header()
{
    return "omega_ghz,gamma_ghz,tau_ns,cp,omega_eff,g,theta,convention,P0,P1,"
           "P2,P3,P_multi,trace_deficit,min_eigval,boundary_pop,dim_a,dim_b";
}

std::string design_point_csv_row(const DesignPointResult& r)
{
    std::string line = format_double(r.point.omega_ghz) + ',' +
                       format_double(r.point.gamma_ghz) + ',' +
                       format_double(r.point.tau_ns) + ',' +
                       (r.point.cp_scheme ? "1" : "0") + ',' +
                       format_double(r.effective_omega) + ',' +
                       format_double(r.g) + ',' + format_double(r.theta) + ',' +
                       std::string(to_string(r.stats.convention));
    for (std::size_t n = 0; n < 4; ++n) {
        line += ',' + format_double(r.stats.at(n));
    }
    line += ',' + format_double(r.stats.p_multi);
    line += ',' + format_double(r.diagnostics.trace_deficit);
    line += ',' + format_double(r.diagnostics.min_eigenvalue);
    line += ',' + format_double(r.diagnostics.boundary_population);
    line += ',' + std::to_string(r.dim_a) + ',' + std::to_string(r.dim_b);
    return line;
}

// Peak search ------------------------------------------------------------------

namespace {

struct PeakProbe
{
    const PeakSearch& search;
    ZenoModel model;

    PairStatistics at(double theta) const
    {
        IntegratorOptions opts = search.integrator;
        opts.convention = search.convention;
        opts.store_states = false;
        const double points[] = {theta};
        const TruncatedRun run =
            auto_truncate(model, points, opts, search.truncation);
        return run.trajectory.stats.back();
    }
};

} // namespace

std::vector<PeakRow> peak_p1_vs_gamma(const std::vector<double>& g_values,
                                      const PeakSearch& search)
{
    if (g_values.empty()) {
        throw ConfigError("g grid is empty", "invalid_grid");
    }
    if (search.coarse_points < 3 || !(search.theta_max > 0.0) ||
        !(search.theta_tolerance > 0.0)) {
        throw ConfigError("invalid peak search settings", "invalid_options");
    }
    const TwoModeSpace start(search.truncation.initial_dim_a,
                             search.truncation.initial_dim_b);
    std::vector<PeakRow> table;
    for (double g : g_values) {
        const PeakProbe probe{search, ZenoModel(start, 1.0, g, 0.0)};

        IntegratorOptions opts = search.integrator;
        opts.convention = search.convention;
        opts.store_states = false;
        const auto grid = uniform_grid(0.0, search.theta_max,
                                       search.coarse_points);
        const TruncatedRun coarse =
            auto_truncate(probe.model, grid, opts, search.truncation);
        const auto& stats = coarse.trajectory.stats;
        std::size_t best = 0;
        for (std::size_t k = 1; k < stats.size(); ++k) {
            if (stats[k].p1 > stats[best].p1) {
                best = k;
            }
        }

        double lo = grid[best == 0 ? 0 : best - 1];
        double hi = grid[std::min(best + 1, grid.size() - 1)];
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        PairStatistics s1 = probe.at(x1);
        PairStatistics s2 = probe.at(x2);
        while (hi - lo > search.theta_tolerance) {
            if (s1.p1 < s2.p1) {
                lo = x1;
                x1 = x2;
                s1 = s2;
                x2 = lo + inv_phi * (hi - lo);
                s2 = probe.at(x2);
            } else {
                hi = x2;
                x2 = x1;
                s2 = s1;
                x1 = hi - inv_phi * (hi - lo);
                s1 = probe.at(x1);
            }
        }

        PeakRow row{g, grid[best], stats[best].p1, stats[best].p_multi};
        for (const auto& [x, s] : {std::pair{x1, s1}, std::pair{x2, s2}}) {
            if (s.p1 > row.p1_max) {
                row = {g, x, s.p1, s.p_multi};
            }
        }
        table.push_back(row);
    }
    return table;
}

} // namespace qzb
