// qzb: command-line front end for the Zeno-blockade pair-source simulator.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "check_suite.hpp"
#include "qzb/config.hpp"
#include "qzb/errors.hpp"
#include "qzb/format.hpp"

#ifndef QZB_VERSION
#define QZB_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace qzb;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

fs::path output_dir()
{
    const char* env = std::getenv("QZB_OUTPUT_DIR");
    return env && *env ? fs::path(env) : fs::current_path();
}

fs::path resolve(const std::string& name, const std::string& fallback)
{
    const fs::path p(name.empty() ? fallback : name);
    return p.is_absolute() ? p : output_dir() / p;
}

void ensure_parent(const fs::path& file)
{
    if (file.has_parent_path()) {
        fs::create_directories(file.parent_path());
    }
}

std::ofstream open_output(const fs::path& file)
{
    ensure_parent(file);
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + file.string(), "io_error");
    }
    return out;
}

fs::path sidecar_for(const fs::path& file)
{
    return fs::path(file.string() + ".meta.json");
}

class Manifest
{
public:
    explicit Manifest(std::string subcommand)
      : m_start(std::chrono::steady_clock::now())
    {
        m_doc["code_version"] = QZB_VERSION;
        m_doc["subcommand"] = std::move(subcommand);
    }

    Json& operator[](const char* key) { return m_doc[key]; }
    void add_output(const fs::path& p) { m_doc["outputs"].push_back(p.string()); }

    void write(const fs::path& where, int status)
    {
        m_doc["exit_status"] = status;
        m_doc["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          m_start)
                .count();
        std::ofstream out = open_output(where);
        out << m_doc.dump(2) << '\n';
    }

private:
    Json m_doc;
    std::chrono::steady_clock::time_point m_start;
};

// Emits `line` to stdout and to the file.
void emit(std::ostream& file, const std::string& line, bool echo)
{
    file << line << '\n';
    if (echo) {
        std::cout << line << '\n';
    }
}

Json rng_none()
{
    return Json{{"algorithm", nullptr}, {"seed", nullptr}};
}

// fig2 ----------------------------------------------------------------------------

struct Fig2Args
{
    std::string out;
    int grid = 201;
    std::string conventions = "selected";
    std::string convention = "joint-diagonal";
    std::string config;
    int workers = 1;
};

int cmd_fig2(const Fig2Args& a)
{
    SweepSpec spec = figure2_spec(a.grid);
    spec.convention = parse_convention(a.convention);
    if (!a.config.empty()) {
        spec = sweep_spec_from_json(load_config(a.config), spec);
    }
    spec.worker_count = a.workers;
    spec.integrator.convention = spec.convention;
    if (a.conventions != "selected" && a.conventions != "both") {
        throw ConfigError("--conventions must be 'selected' or 'both'",
                          "invalid_options");
    }
    const fs::path dir = resolve(a.out, ".");
    fs::create_directories(dir);

    Manifest manifest("fig2");
    manifest["options"] = to_json(spec);
    manifest["rng"] = rng_none();

    const SweepResult result = figure2_sweep(spec);
    int status = exit_ok;
    for (double g : spec.g_values) {
        const auto rows = panel(result, g);
        const std::string stem = "fig2_g" + format_double(g);
        const auto write = [&](const fs::path& file, bool other) {
            std::ofstream out = open_output(file);
            out << sweep_csv_header() << '\n';
            for (const auto& row : rows) {
                out << sweep_csv_row(row, other) << '\n';
            }
            manifest.add_output(file);
        };
        write(dir / (stem + ".csv"), false);
        if (a.conventions == "both") {
            const PairConvention alt =
                spec.convention == PairConvention::joint_diagonal
                    ? PairConvention::idler_marginal
                    : PairConvention::joint_diagonal;
            write(dir / (stem + "_" + std::string(to_string(alt)) + ".csv"),
                  true);
        }
        for (const auto& row : rows) {
            if (!row.error.empty()) {
                std::cerr << "error=" << row.error << " panel=" << stem
                          << " theta=" << format_double(row.theta) << '\n';
                status = exit_numerical;
                break;
            }
        }
        std::cout << (dir / (stem + ".csv")).string() << '\n';
    }
    manifest.write(dir / "fig2.meta.json", status);
    return status;
}

// design-point ----------------------------------------------------------------------

struct DesignArgs
{
    double omega = 0.1;
    double gamma = 2.0;
    double tau = 10.0;
    bool no_cp = false;
    std::string convention = "joint-diagonal";
    std::string out;
};

int cmd_design_point(const DesignArgs& a)
{
    DesignPoint dp{a.omega, a.gamma, a.tau, !a.no_cp};
    IntegratorOptions opts;
    opts.convention = parse_convention(a.convention);
    const TruncationPolicy policy{8, 8, 256};

    const fs::path file = resolve(a.out, "design_point.csv");
    Manifest manifest("design-point");
    manifest["options"] = Json{{"design_point", to_json(dp)},
                               {"integrator", to_json(opts)},
                               {"truncation", to_json(policy)}};
    manifest["rng"] = rng_none();

    DesignPointResult r;
    try {
        r = design_point(dp, opts, policy);
    } catch (const ConfigError&) {
        throw;
    } catch (const SimulationError& e) {
        manifest["failure"] = Json{{"tag", e.tag()}, {"message", e.what()}};
        manifest.write(sidecar_for(file), exit_numerical);
        throw;
    }
    std::ofstream out = open_output(file);
    emit(out, design_point_csv_header(), true);
    emit(out, design_point_csv_row(r), true);
    manifest.add_output(file);
    manifest.write(sidecar_for(file), exit_ok);
    return exit_ok;
}

// evolve ---------------------------------------------------------------------------

struct EvolveArgs
{
    double g = -1.0;
    double theta = -1.0;
    double omega = -1.0;
    double gamma = -1.0;
    double tau = -1.0;
    double gamma_b_ratio = 0.0;
    int samples = 21;
    int cutoff = 0;   // 0: automatic truncation
    std::string convention = "joint-diagonal";
    std::string out;
};

int cmd_evolve(const EvolveArgs& a)
{
    const bool dimensionless = a.g >= 0.0 || a.theta >= 0.0;
    const bool physical = a.omega >= 0.0 || a.gamma >= 0.0 || a.tau >= 0.0;
    if (dimensionless == physical) {
        throw ConfigError("give either --g and --theta, or --omega, --gamma "
                          "and --tau",
                          "invalid_options");
    }
    double omega = 1.0, gamma = a.g, length = a.theta;
    if (physical) {
        omega = a.omega;
        gamma = a.gamma;
        length = a.tau;
    }
    if (!(omega >= 0.0) || !(gamma >= 0.0) || !(length > 0.0)) {
        throw ConfigError("evolve needs non-negative rates and a positive "
                          "length",
                          "invalid_options");
    }
    IntegratorOptions opts;
    opts.sample_count = a.samples;
    opts.convention = parse_convention(a.convention);
    opts.store_states = false;
    const TruncationPolicy policy{8, 8, 256};

    const fs::path file = resolve(a.out, "evolve.csv");
    Manifest manifest("evolve");
    manifest["options"] =
        Json{{"units", physical ? "GHz/ns" : "dimensionless"},
             {"omega", omega},
             {"gamma_a", gamma},
             {"gamma_b", a.gamma_b_ratio * gamma},
             {"length", length},
             {"cutoff", a.cutoff},
             {"integrator", to_json(opts)},
             {"truncation", to_json(policy)}};
    manifest["rng"] = rng_none();

    const auto grid = uniform_grid(0.0, length, opts.sample_count);
    Trajectory traj;
    try {
        if (a.cutoff > 0) {
            const TwoModeSpace space(a.cutoff, a.cutoff);
            const ZenoModel model(space, omega, gamma, a.gamma_b_ratio * gamma);
            traj = evolve(model, vacuum_state(space), grid, opts);
        } else {
            const ZenoModel model(TwoModeSpace(policy.initial_dim_a,
                                               policy.initial_dim_b),
                                  omega, gamma, a.gamma_b_ratio * gamma);
            traj = auto_truncate(model, grid, opts, policy).trajectory;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const SimulationError& e) {
        manifest["failure"] = Json{{"tag", e.tag()}, {"message", e.what()}};
        manifest.write(sidecar_for(file), exit_numerical);
        throw;
    }
    manifest["space"] = Json{{"dim_a", traj.space.dim_a()},
                             {"dim_b", traj.space.dim_b()}};
    std::ofstream out = open_output(file);
    emit(out, trajectory_csv_header(), true);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        emit(out,
             trajectory_csv_row(traj.xi[k], traj.omega, traj.stats[k],
                                traj.diagnostics[k]),
             true);
    }
    manifest.add_output(file);
    manifest.write(sidecar_for(file), exit_ok);
    return exit_ok;
}

// sweep ----------------------------------------------------------------------------

struct SweepArgs
{
    std::string config;
    int workers = 0;   // 0: take the config value
    std::string out;
};

int cmd_sweep(const SweepArgs& a)
{
    SweepSpec spec = figure2_spec();
    spec = sweep_spec_from_json(load_config(a.config), spec);
    if (a.workers > 0) {
        spec.worker_count = a.workers;
    }
    if (!a.out.empty()) {
        spec.output_path = a.out;
    }
    const fs::path file = resolve(spec.output_path, "sweep.csv");

    Manifest manifest("sweep");
    // worker_count does not change the output, so it stays out of the
    // resolved options that reproduce the file.
    Json resolved = to_json(spec);
    resolved.erase("workers");
    manifest["options"] = resolved;
    manifest["workers"] = spec.worker_count;
    manifest["rng"] = rng_none();

    const SweepResult result = run_sweep(spec);
    std::ofstream out = open_output(file);
    write_sweep_csv(out, result);
    manifest.add_output(file);

    int status = exit_ok;
    for (const auto& row : result.rows) {
        if (!row.error.empty()) {
            std::cerr << "error=" << row.error << " g=" << format_double(row.g)
                      << " theta=" << format_double(row.theta) << '\n';
            status = exit_numerical;
            break;
        }
    }
    manifest.write(sidecar_for(file), status);
    std::cout << file.string() << '\n';
    return status;
}

// mc -------------------------------------------------------------------------------

struct McArgs
{
    double g = 10.0;
    double theta = 1.0;
    int samples = 2;
    McOptions options;
    std::string out;
};

int cmd_mc(McArgs a)
{
    a.options.validate();
    if (!(a.g >= 0.0) || !(a.theta > 0.0) || a.samples < 1) {
        throw ConfigError("mc needs g >= 0, theta > 0, samples >= 1",
                          "invalid_options");
    }
    std::vector<double> points;
    for (int k = 1; k <= a.samples; ++k) {
        points.push_back(a.theta * k / a.samples);
    }
    IntegratorOptions opts;
    opts.store_states = false;
    const TruncationPolicy policy{8, 8, 256};

    const fs::path file = resolve(a.out, "mc.csv");
    Manifest manifest("mc");
    Json resolved = to_json(a.options);
    resolved.erase("workers");
    manifest["options"] = Json{{"g", a.g},
                               {"theta", a.theta},
                               {"samples", a.samples},
                               {"mc", resolved},
                               {"truncation", to_json(policy)}};
    manifest["rng"] = Json{{"algorithm", mc_rng_algorithm()},
                           {"seed", a.options.rng_seed}};

    // The master-equation run picks a leak-free space for the trajectories.
    const ZenoModel seed(TwoModeSpace(policy.initial_dim_a, policy.initial_dim_b),
                         1.0, a.g, 0.0);
    const TruncatedRun me = auto_truncate(seed, points, opts, policy);
    const McResult est = mc_evolve(seed.with_space(me.space), points, a.options);
    manifest["space"] = Json{{"dim_a", me.space.dim_a()},
                             {"dim_b", me.space.dim_b()}};

    std::ofstream out = open_output(file);
    std::ostringstream body;
    write_mc_csv(body, est, 1.0);
    out << body.str();
    std::cout << body.str();
    manifest.add_output(file);
    manifest.write(sidecar_for(file), exit_ok);
    return exit_ok;
}

// check ----------------------------------------------------------------------------

int cmd_check(const std::string& level_text, int workers, const std::string& o)
{
    tools::CheckLevel level;
    if (level_text == "fast") {
        level = tools::CheckLevel::fast;
    } else if (level_text == "full") {
        level = tools::CheckLevel::full;
    } else {
        throw ConfigError("--level must be fast or full", "invalid_options");
    }
    const fs::path file = resolve(o, "check.csv");
    Manifest manifest("check");
    manifest["options"] = Json{{"level", level_text}};
    manifest["rng"] = level == tools::CheckLevel::full
                          ? Json{{"algorithm", mc_rng_algorithm()},
                                 {"seed", McOptions{}.rng_seed}}
                          : rng_none();

    const auto results = tools::run_checks(level, workers);
    std::ofstream out = open_output(file);
    emit(out, "suite,case,observed,expected,deviation,tolerance,status", true);
    const tools::CheckResult* worst = nullptr;
    for (const auto& r : results) {
        emit(out,
             r.suite + ',' + r.name + ',' + format_double(r.observed) + ',' +
                 format_double(r.expected) + ',' + format_double(r.deviation) +
                 ',' + format_double(r.tolerance) + ',' +
                 (r.pass ? "pass" : "FAIL"),
             true);
        if (!r.pass && (!worst || r.deviation / r.tolerance >
                                      worst->deviation / worst->tolerance)) {
            worst = &r;
        }
    }
    manifest.add_output(file);
    const int status = worst ? exit_check_failed : exit_ok;
    manifest.write(sidecar_for(file), status);
    if (worst) {
        std::cerr << "check failed: worst offender " << worst->suite << ' '
                  << worst->name << " observed=" << format_double(worst->observed)
                  << " expected=" << format_double(worst->expected)
                  << " deviation=" << format_double(worst->deviation)
                  << " tolerance=" << format_double(worst->tolerance) << '\n';
    } else {
        std::cout << results.size() << " checks passed\n";
    }
    return status;
}

int default_workers()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : int(n);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Zeno-blockade photon-pair source simulator"};
    app.set_version_flag("--version", QZB_VERSION);
    app.require_subcommand(1);

    Fig2Args fig2;
    fig2.workers = default_workers();
    auto* c_fig2 = app.add_subcommand("fig2", "pair statistics versus theta "
                                              "for g = 0, 3, 10, 30");
    c_fig2->add_option("--out", fig2.out, "output directory");
    c_fig2->add_option("--grid", fig2.grid, "theta points on [0, 2]");
    c_fig2->add_option("--conventions", fig2.conventions,
                       "'selected' or 'both'");
    c_fig2->add_option("--convention", fig2.convention,
                       "joint-diagonal or idler-marginal");
    c_fig2->add_option("--config", fig2.config, "JSON sweep overrides");
    c_fig2->add_option("--workers", fig2.workers);

    DesignArgs dp;
    auto* c_dp = app.add_subcommand("design-point",
                                    "physical-unit run (GHz, ns)");
    c_dp->add_option("--omega", dp.omega, "pump coupling [GHz]")->required();
    c_dp->add_option("--gamma", dp.gamma, "TPA rate [GHz]")->required();
    c_dp->add_option("--tau", dp.tau, "interaction time [ns]")->required();
    c_dp->add_flag("--no-cp", dp.no_cp,
                   "use omega directly instead of sqrt(2) * omega");
    c_dp->add_option("--convention", dp.convention);
    c_dp->add_option("--out", dp.out, "CSV file");

    EvolveArgs ev;
    auto* c_ev = app.add_subcommand("evolve", "single trajectory from vacuum");
    c_ev->add_option("--g", ev.g, "gamma / omega (dimensionless mode)");
    c_ev->add_option("--theta", ev.theta, "omega * xi (dimensionless mode)");
    c_ev->add_option("--omega", ev.omega, "pump coupling [GHz]");
    c_ev->add_option("--gamma", ev.gamma, "signal TPA rate [GHz]");
    c_ev->add_option("--tau", ev.tau, "interaction time [ns]");
    c_ev->add_option("--gamma-b-ratio", ev.gamma_b_ratio,
                     "idler TPA rate as a fraction of the signal rate");
    c_ev->add_option("--samples", ev.samples);
    c_ev->add_option("--cutoff", ev.cutoff,
                     "fixed Fock cutoff per mode (0: automatic)");
    c_ev->add_option("--convention", ev.convention);
    c_ev->add_option("--out", ev.out, "CSV file");

    SweepArgs sw;
    sw.workers = 0;
    auto* c_sw = app.add_subcommand("sweep", "sweep from a JSON config");
    c_sw->add_option("--config", sw.config)->required();
    c_sw->add_option("--workers", sw.workers);
    c_sw->add_option("--out", sw.out, "CSV file");

    McArgs mc;
    mc.options.worker_count = default_workers();
    auto* c_mc = app.add_subcommand("mc", "quantum-jump Monte Carlo");
    c_mc->add_option("--g", mc.g);
    c_mc->add_option("--theta", mc.theta);
    c_mc->add_option("--samples", mc.samples, "equally spaced points in (0, theta]");
    c_mc->add_option("--trajectories", mc.options.trajectory_count);
    c_mc->add_option("--seed", mc.options.rng_seed);
    c_mc->add_option("--step", mc.options.step);
    c_mc->add_option("--workers", mc.options.worker_count);
    c_mc->add_option("--out", mc.out, "CSV file");

    std::string level = "fast";
    std::string check_out;
    int check_workers = default_workers();
    auto* c_check = app.add_subcommand("check", "oracle equivalence suite");
    c_check->add_option("--level", level, "fast or full");
    c_check->add_option("--workers", check_workers);
    c_check->add_option("--out", check_out, "CSV report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "error=config_parse\n";
        return exit_config;
    }

    try {
        if (*c_fig2) {
            return cmd_fig2(fig2);
        }
        if (*c_dp) {
            return cmd_design_point(dp);
        }
        if (*c_ev) {
            return cmd_evolve(ev);
        }
        if (*c_sw) {
            return cmd_sweep(sw);
        }
        if (*c_mc) {
            return cmd_mc(mc);
        }
        return cmd_check(level, check_workers, check_out);
    } catch (const ConfigError& e) {
        std::cerr << "error=" << e.tag() << " message=\"" << e.what() << "\"\n";
        return exit_config;
    } catch (const SimulationError& e) {
        std::cerr << "error=" << e.tag() << " message=\"" << e.what() << "\"\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error=internal_error message=\"" << e.what() << "\"\n";
        return exit_numerical;
    }
}
