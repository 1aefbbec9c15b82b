#include "qzb/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "qzb/errors.hpp"

namespace qzb {

namespace {

void expect_object(const Json& j, std::string_view what,
                   std::initializer_list<std::string_view> keys)
{
    if (!j.is_object()) {
        throw ConfigError(std::string(what) + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto k : keys) {
            known = known || key == k;
        }
        if (!known) {
            throw ConfigError("unknown key '" + key + "' in " +
                              std::string(what));
        }
    }
}

template <class T>
void read(const Json& j, const char* key, T& out)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " +
                          e.what());
    }
}

// null stands for +infinity, which JSON cannot spell.
void read_unbounded(const Json& j, const char* key, double& out)
{
    if (j.contains(key) && j.at(key).is_null()) {
        out = std::numeric_limits<double>::infinity();
        return;
    }
    read(j, key, out);
}

Json unbounded(double v)
{
    return std::isinf(v) ? Json(nullptr) : Json(v);
}

PairConvention read_convention(const Json& j, const char* key,
                               PairConvention fallback)
{
    std::string text;
    read(j, key, text);
    return text.empty() ? fallback : parse_convention(text);
}

} // namespace

Json parse_config(std::string_view text)
{
    try {
        // `//` and `/* */` comments are allowed so example configs can be
        // annotated.
        return Json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

Json load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

Json to_json(const IntegratorOptions& o)
{
    return Json{{"rel_tol", o.rel_tol},
                {"abs_tol", o.abs_tol},
                {"max_step", unbounded(o.max_step)},
                {"sample_count", o.sample_count},
                {"boundary_tolerance", o.boundary_tolerance},
                {"positivity_check_every", o.positivity_check_every},
                {"trace_tolerance", o.trace_tolerance},
                {"positivity_tolerance", o.positivity_tolerance},
                {"max_steps", o.max_steps},
                {"convention", std::string(to_string(o.convention))}};
}

Json to_json(const TruncationPolicy& p)
{
    return Json{{"initial_dim_a", p.initial_dim_a},
                {"initial_dim_b", p.initial_dim_b},
                {"ceiling", p.ceiling}};
}

Json to_json(const SweepSpec& s)
{
    return Json{{"g", s.g_values},
                {"theta", s.theta_grid},
                {"gamma_b_ratio", s.gamma_b_ratio},
                {"convention", std::string(to_string(s.convention))},
                {"auto_truncate", s.auto_truncate},
                {"truncation", to_json(s.truncation)},
                {"integrator", to_json(s.integrator)},
                {"workers", s.worker_count},
                {"output", s.output_path}};
}

Json to_json(const DesignPoint& d)
{
    return Json{{"omega_ghz", d.omega_ghz},
                {"gamma_ghz", d.gamma_ghz},
                {"tau_ns", d.tau_ns},
                {"cp_scheme", d.cp_scheme}};
}

Json to_json(const McOptions& o)
{
    return Json{{"trajectory_count", o.trajectory_count},
                {"rng_seed", o.rng_seed},
                {"step", o.step},
                {"workers", o.worker_count},
                {"record_jumps", o.record_jumps},
                {"convention", std::string(to_string(o.convention))}};
}

Json to_json(const PeakSearch& s)
{
    return Json{{"theta_max", s.theta_max},
                {"coarse_points", s.coarse_points},
                {"theta_tolerance", s.theta_tolerance},
                {"convention", std::string(to_string(s.convention))},
                {"integrator", to_json(s.integrator)},
                {"truncation", to_json(s.truncation)}};
}

IntegratorOptions integrator_options_from_json(const Json& j,
                                               IntegratorOptions o)
{
    expect_object(j, "integrator",
                  {"rel_tol", "abs_tol", "max_step", "sample_count",
                   "boundary_tolerance", "positivity_check_every",
                   "trace_tolerance", "positivity_tolerance", "max_steps",
                   "convention"});
    read(j, "rel_tol", o.rel_tol);
    read(j, "abs_tol", o.abs_tol);
    read_unbounded(j, "max_step", o.max_step);
    read(j, "sample_count", o.sample_count);
    read(j, "boundary_tolerance", o.boundary_tolerance);
    read(j, "positivity_check_every", o.positivity_check_every);
    read(j, "trace_tolerance", o.trace_tolerance);
    read(j, "positivity_tolerance", o.positivity_tolerance);
    read(j, "max_steps", o.max_steps);
    o.convention = read_convention(j, "convention", o.convention);
    return o;
}

TruncationPolicy truncation_policy_from_json(const Json& j, TruncationPolicy p)
{
    expect_object(j, "truncation", {"initial_dim_a", "initial_dim_b", "ceiling"});
    read(j, "initial_dim_a", p.initial_dim_a);
    read(j, "initial_dim_b", p.initial_dim_b);
    read(j, "ceiling", p.ceiling);
    return p;
}

SweepSpec sweep_spec_from_json(const Json& j, SweepSpec s)
{
    expect_object(j, "sweep config",
                  {"g", "theta", "gamma_b_ratio", "convention",
                   "auto_truncate", "truncation", "integrator", "workers",
                   "output"});
    read(j, "g", s.g_values);
    if (j.contains("theta")) {
        const Json& t = j.at("theta");
        if (t.is_object()) {
            expect_object(t, "theta", {"start", "stop", "count"});
            double start = 0.0;
            double stop = 0.0;
            int count = 0;
            read(t, "start", start);
            read(t, "stop", stop);
            read(t, "count", count);
            s.theta_grid = uniform_grid(start, stop, count);
        } else {
            read(j, "theta", s.theta_grid);
        }
    }
    read(j, "gamma_b_ratio", s.gamma_b_ratio);
    s.convention = read_convention(j, "convention", s.convention);
    read(j, "auto_truncate", s.auto_truncate);
    if (j.contains("truncation")) {
        s.truncation = truncation_policy_from_json(j.at("truncation"),
                                                   s.truncation);
    }
    if (j.contains("integrator")) {
        s.integrator = integrator_options_from_json(j.at("integrator"),
                                                    s.integrator);
    }
    read(j, "workers", s.worker_count);
    read(j, "output", s.output_path);
    s.integrator.convention = s.convention;
    return s;
}

DesignPoint design_point_from_json(const Json& j, DesignPoint d)
{
    expect_object(j, "design point",
                  {"omega_ghz", "gamma_ghz", "tau_ns", "cp_scheme"});
    read(j, "omega_ghz", d.omega_ghz);
    read(j, "gamma_ghz", d.gamma_ghz);
    read(j, "tau_ns", d.tau_ns);
    read(j, "cp_scheme", d.cp_scheme);
    return d;
}

McOptions mc_options_from_json(const Json& j, McOptions o)
{
    expect_object(j, "mc",
                  {"trajectory_count", "rng_seed", "step", "workers",
                   "record_jumps", "convention"});
    read(j, "trajectory_count", o.trajectory_count);
    read(j, "rng_seed", o.rng_seed);
    read(j, "step", o.step);
    read(j, "workers", o.worker_count);
    read(j, "record_jumps", o.record_jumps);
    o.convention = read_convention(j, "convention", o.convention);
    return o;
}

} // namespace qzb
