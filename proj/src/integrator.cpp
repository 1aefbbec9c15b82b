#include "qzb/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include <unsupported/Eigen/MatrixFunctions>

#include "block_eigen.hpp"
#include "qzb/errors.hpp"
#include "qzb/format.hpp"
#include "support_liouvillian.hpp"

namespace qzb {

namespace {

using detail::SupportLiouvillian;

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI step-size control constants (Hairer, Norsett & Wanner).
constexpr double safety = 0.9;
constexpr double beta = 0.04;
constexpr double expo1 = 0.2 - beta * 0.75;
constexpr double fac_min = 0.2;
constexpr double fac_max = 10.0;

class Stepper
{
public:
    Stepper(const SupportLiouvillian& op, const IntegratorOptions& options)
      : m_op(op), m_opt(options)
    {
    }

    double error_norm(const Vector& err, const Vector& y0,
                      const Vector& y1) const
    {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double sc = m_opt.abs_tol +
                              m_opt.rel_tol *
                                  std::max(std::abs(y0(i)), std::abs(y1(i)));
            const double r = std::abs(err(i)) / sc;
            sum += r * r;
        }
        return err.size() == 0 ? 0.0 : std::sqrt(sum / double(err.size()));
    }

    double initial_step(const Vector& y, const Vector& f) const
    {
        double d0 = 0.0, d1 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = m_opt.abs_tol + m_opt.rel_tol * std::abs(y(i));
            d0 += std::norm(y(i)) / (sc * sc);
            d1 += std::norm(f(i)) / (sc * sc);
        }
        d0 = std::sqrt(d0 / double(y.size()));
        d1 = std::sqrt(d1 / double(y.size()));
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, m_opt.max_step);

        Vector y1 = y + h0 * f;
        Vector f1;
        m_op.apply(y1, f1);
        Vector df = f1 - f;
        const double d2 = error_norm(df, y, y) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                        : std::pow(0.01 / dmax, 0.2);
        return std::min({100.0 * h0, h1, m_opt.max_step});
    }

    /// One trial step of size h from (y, k1). Fills y_new, k7 and returns
    /// the scaled error.
    double attempt(const Vector& y, const Vector& k1, double h, Vector& y_new,
                   Vector& k7)
    {
        m_tmp = y + h * a21 * k1;
        m_op.apply(m_tmp, m_k2);
        m_tmp = y + h * (a31 * k1 + a32 * m_k2);
        m_op.apply(m_tmp, m_k3);
        m_tmp = y + h * (a41 * k1 + a42 * m_k2 + a43 * m_k3);
        m_op.apply(m_tmp, m_k4);
        m_tmp = y + h * (a51 * k1 + a52 * m_k2 + a53 * m_k3 + a54 * m_k4);
        m_op.apply(m_tmp, m_k5);
        m_tmp = y + h * (a61 * k1 + a62 * m_k2 + a63 * m_k3 + a64 * m_k4 +
                         a65 * m_k5);
        m_op.apply(m_tmp, m_k6);
        y_new = y + h * (a71 * k1 + a73 * m_k3 + a74 * m_k4 + a75 * m_k5 +
                         a76 * m_k6);
        m_op.apply(y_new, k7);
        m_tmp = h * (e1 * k1 + e3 * m_k3 + e4 * m_k4 + e5 * m_k5 + e6 * m_k6 +
                     e7 * k7);
        return error_norm(m_tmp, y, y_new);
    }

private:
    const SupportLiouvillian& m_op;
    const IntegratorOptions& m_opt;
    Vector m_tmp, m_k2, m_k3, m_k4, m_k5, m_k6;
};

struct Monitor
{
    std::vector<int> top_signal;   // support positions with n_a = dim_a - 1
    std::vector<int> top_idler;

    Monitor(const SupportLiouvillian& op, const TwoModeSpace& space)
    {
        for (const auto& [pos, index] : op.diagonal()) {
            if (space.n_a(index) == space.dim_a() - 1) {
                top_signal.push_back(pos);
            }
            if (space.n_b(index) == space.dim_b() - 1) {
                top_idler.push_back(pos);
            }
        }
    }

    static double sum(const Vector& y, const std::vector<int>& positions)
    {
        double s = 0.0;
        for (int p : positions) {
            s += y(p).real();
        }
        return s;
    }
};

double min_eigenvalue(const SupportLiouvillian& op, const Vector& y)
{
    std::vector<std::tuple<int, int, complex>> entries;
    entries.reserve(std::size_t(op.size()));
    for (int p = 0; p < op.size(); ++p) {
        if (y(p) != complex(0.0)) {
            entries.emplace_back(op.row(p), op.col(p), y(p));
        }
    }
    return detail::min_eigenvalue_by_blocks(op.dim(), entries);
}

std::string describe(double xi)
{
    return "at xi = " + format_double(xi);
}

PairConvention other(PairConvention c)
{
    return c == PairConvention::joint_diagonal ? PairConvention::idler_marginal
                                               : PairConvention::joint_diagonal;
}

EvolveOutcome evolve_entries(const ZenoModel& model,
                             const std::vector<SupportLiouvillian::Entry>& rho0,
                             std::span<const double> sample_points,
                             const IntegratorOptions& options)
{
    options.validate();
    for (std::size_t k = 0; k < sample_points.size(); ++k) {
        if (!(sample_points[k] >= 0.0) || !std::isfinite(sample_points[k]) ||
            (k > 0 && !(sample_points[k] > sample_points[k - 1]))) {
            throw ConfigError("sample points must be finite, non-negative and "
                              "strictly increasing",
                              "invalid_grid");
        }
    }

    std::vector<double> grid;
    grid.push_back(0.0);
    for (double x : sample_points) {
        if (x > 0.0) {
            grid.push_back(x);
        }
    }

    const TwoModeSpace& space = model.space();
    const SupportLiouvillian op(model, rho0);
    const Monitor monitor(op, space);
    Stepper stepper(op, options);
    const bool keep_states =
        options.store_states && space.dim() <= options.max_stored_dim;

    EvolveOutcome result;
    Trajectory& traj = result.trajectory;
    traj.space = space;
    traj.omega = model.omega();
    traj.convention = options.convention;

    Vector y = op.gather(rho0);
    std::vector<double> populations(std::size_t(space.dim()), 0.0);

    const auto check_positivity = [&](double xi, double& lowest) {
        lowest = min_eigenvalue(op, y);
        if (lowest < -options.positivity_tolerance) {
            throw NonPhysicalState("minimum eigenvalue " + format_double(lowest) +
                                   " " + describe(xi));
        }
    };

    const auto record_sample = [&](double xi) {
        SampleDiagnostics diag;
        double herm = 0.0;
        for (int p = 0; p < op.size(); ++p) {
            const int t = op.transpose(p);
            const complex partner = t >= 0 ? std::conj(y(t)) : complex(0.0);
            herm = std::max(herm, std::abs(y(p) - partner));
        }
        for (int p = 0; p < op.size(); ++p) {
            const int t = op.transpose(p);
            if (t > p) {
                const complex avg = 0.5 * (y(p) + std::conj(y(t)));
                y(p) = avg;
                y(t) = std::conj(avg);
            } else if (t == p) {
                y(p) = y(p).real();
            }
        }
        diag.hermiticity_deviation = herm;

        std::fill(populations.begin(), populations.end(), 0.0);
        complex trace(0.0);
        for (const auto& [pos, index] : op.diagonal()) {
            populations[std::size_t(index)] = y(pos).real();
            trace += y(pos);
        }
        diag.trace_deficit = std::abs(trace - 1.0);
        for (int i = 0; i < space.dim(); ++i) {
            const double w = std::abs(populations[std::size_t(i)]);
            if ((space.n_a(i) + space.n_b(i)) % 2 != 0) {
                diag.odd_parity_population += w;
            }
            if (space.n_a(i) > space.n_b(i)) {
                diag.signal_excess_population += w;
            }
        }
        diag.boundary_signal = Monitor::sum(y, monitor.top_signal);
        diag.boundary_idler = Monitor::sum(y, monitor.top_idler);
        diag.boundary_population =
            std::max(diag.boundary_signal, diag.boundary_idler);

        if (diag.trace_deficit > options.trace_tolerance) {
            throw NonPhysicalState("trace deficit " +
                                   format_double(diag.trace_deficit) + " " +
                                   describe(xi));
        }
        check_positivity(xi, diag.min_eigenvalue);

        traj.xi.push_back(xi);
        traj.stats.push_back(
            pair_distribution(space, populations, options.convention));
        traj.other_stats.push_back(
            pair_distribution(space, populations, other(options.convention)));
        traj.diagnostics.push_back(diag);
        if (keep_states) {
            traj.states.emplace_back(space, op.scatter(y));
        }
    };

    const auto check_boundary = [&](double xi) {
        const double sig = Monitor::sum(y, monitor.top_signal);
        const double idl = Monitor::sum(y, monitor.top_idler);
        const bool bad_sig = sig > options.boundary_tolerance;
        const bool bad_idl = idl > options.boundary_tolerance;
        if (bad_sig || bad_idl) {
            throw TruncationLeak("boundary population " +
                                     format_double(std::max(sig, idl)) + " " +
                                     describe(xi) + " on a " +
                                     std::to_string(space.dim_a()) + "x" +
                                     std::to_string(space.dim_b()) + " space",
                                 bad_sig, bad_idl, xi);
        }
    };

    try {
        check_boundary(0.0);
        record_sample(0.0);

        Vector k1, k7, y_new;
        op.apply(y, k1);
        double t = 0.0;
        double h = grid.size() > 1 ? stepper.initial_step(y, k1) : 0.0;
        double err_old = 1e-4;
        bool last_rejected = false;

        for (std::size_t next = 1; next < grid.size(); ++next) {
            const double target = grid[next];
            while (t < target) {
                if (traj.steps + traj.rejected_steps >= options.max_steps) {
                    throw StepFailure("step budget exhausted " + describe(t));
                }
                const double remaining = target - t;
                bool clamp = false;
                double step = std::min(h, options.max_step);
                if (step >= remaining) {
                    step = remaining;
                    clamp = true;
                }
                if (step <= 1e-14 * std::max(1.0, std::abs(t))) {
                    throw StepFailure("step size underflow " + describe(t));
                }

                const double err = stepper.attempt(y, k1, step, y_new, k7);
                if (!std::isfinite(err)) {
                    ++traj.rejected_steps;
                    h = 0.1 * step;
                    last_rejected = true;
                    continue;
                }

                const double fac11 = std::pow(err, expo1);
                double fac = fac11 / std::pow(err_old, beta);
                fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
                const double h_proposed = step / fac;

                if (err <= 1.0) {
                    err_old = std::max(err, 1e-4);
                    t = clamp ? target : t + step;
                    y.swap(y_new);
                    k1.swap(k7);
                    ++traj.steps;
                    const double h_before = h;
                    h = last_rejected ? std::min(h_proposed, step) : h_proposed;
                    if (clamp && !last_rejected) {
                        // A step shortened to land on a sample point says
                        // nothing about the admissible step size.
                        h = std::max(h, h_before);
                    }
                    last_rejected = false;

                    check_boundary(t);
                    if (options.positivity_check_every > 0 &&
                        traj.steps % options.positivity_check_every == 0) {
                        double lowest = 0.0;
                        check_positivity(t, lowest);
                    }
                } else {
                    ++traj.rejected_steps;
                    h = step / std::min(1.0 / fac_min, fac11 / safety);
                    last_rejected = true;
                }
            }
            record_sample(target);
            op.apply(y, k1);   // symmetrisation invalidates the FSAL stage
        }
    } catch (const SimulationError&) {
        result.failure = std::current_exception();
    }
    return result;
}

std::vector<SupportLiouvillian::Entry> entries_of(const DensityMatrix& rho)
{
    std::vector<SupportLiouvillian::Entry> entries;
    const Matrix& m = rho.matrix();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (m(r, c) != complex(0.0)) {
                entries.push_back({int(r), int(c), m(r, c)});
            }
        }
    }
    return entries;
}

} // namespace

void IntegratorOptions::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0) ||
        !(boundary_tolerance > 0.0) || !(trace_tolerance > 0.0) ||
        !(positivity_tolerance > 0.0)) {
        throw ConfigError("integrator tolerances must be positive",
                          "invalid_options");
    }
    if (sample_count < 2) {
        throw ConfigError("sample_count must be >= 2", "invalid_options");
    }
    if (positivity_check_every < 0 || max_steps <= 0) {
        throw ConfigError("invalid step limits", "invalid_options");
    }
}

PairStatistics Trajectory::statistics(std::size_t sample,
                                      PairConvention c) const
{
    return c == convention ? stats.at(sample) : other_stats.at(sample);
}

EvolveOutcome try_evolve(const ZenoModel& model, const DensityMatrix& rho0,
                         std::span<const double> sample_points,
                         const IntegratorOptions& options)
{
    if (!(rho0.space() == model.space())) {
        throw std::invalid_argument("initial state and model spaces differ");
    }
    return evolve_entries(model, entries_of(rho0), sample_points, options);
}

Trajectory evolve(const ZenoModel& model, const DensityMatrix& rho0,
                  std::span<const double> sample_points,
                  const IntegratorOptions& options)
{
    EvolveOutcome out = try_evolve(model, rho0, sample_points, options);
    if (!out.ok()) {
        std::rethrow_exception(out.failure);
    }
    return std::move(out.trajectory);
}

Trajectory evolve(const ZenoModel& model, const DensityMatrix& rho0,
                  double xi_final, const IntegratorOptions& options)
{
    if (!(xi_final > 0.0)) {
        throw ConfigError("xi_final must be positive", "invalid_grid");
    }
    options.validate();
    const auto grid = uniform_grid(0.0, xi_final, options.sample_count);
    return evolve(model, rho0, grid, options);
}

std::vector<double> uniform_grid(double start, double stop, int count)
{
    if (count < 2 || !(stop > start)) {
        throw ConfigError("grid needs count >= 2 and stop > start",
                          "invalid_grid");
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        grid[std::size_t(k)] =
            k + 1 == count ? stop
                           : start + (stop - start) * double(k) / (count - 1);
    }
    return grid;
}

TruncatedOutcome try_auto_truncate(const ZenoModel& model,
                                   std::span<const double> sample_points,
                                   const IntegratorOptions& options,
                                   const TruncationPolicy& policy)
{
    if (policy.initial_dim_a < 2 || policy.initial_dim_b < 2 ||
        policy.ceiling < std::max(policy.initial_dim_a, policy.initial_dim_b)) {
        throw ConfigError("invalid truncation policy", "invalid_options");
    }
    TwoModeSpace space(policy.initial_dim_a, policy.initial_dim_b);
    const std::vector<SupportLiouvillian::Entry> vacuum{{0, 0, 1.0}};

    while (true) {
        const ZenoModel trial = model.with_space(space);
        TruncatedOutcome out{space,
                             evolve_entries(trial, vacuum, sample_points,
                                            options)};
        if (out.outcome.ok()) {
            return out;
        }
        try {
            std::rethrow_exception(out.outcome.failure);
        } catch (const TruncationLeak& leak) {
            int dim_a = space.dim_a();
            int dim_b = space.dim_b();
            bool grown = false;
            if (leak.signal_violated() && dim_a < policy.ceiling) {
                dim_a = std::min(2 * dim_a, policy.ceiling);
                grown = true;
            }
            if (leak.idler_violated() && dim_b < policy.ceiling) {
                dim_b = std::min(2 * dim_b, policy.ceiling);
                grown = true;
            }
            if (!grown) {
                out.outcome.failure = std::make_exception_ptr(CutoffCeiling(
                    std::string(leak.what()) + "; cutoff ceiling " +
                    std::to_string(policy.ceiling) + " reached"));
                return out;
            }
            space = TwoModeSpace(dim_a, dim_b);
        } catch (const SimulationError&) {
            return out;
        }
    }
}

TruncatedRun auto_truncate(const ZenoModel& model,
                           std::span<const double> sample_points,
                           const IntegratorOptions& options,
                           const TruncationPolicy& policy)
{
    TruncatedOutcome out =
        try_auto_truncate(model, sample_points, options, policy);
    if (!out.outcome.ok()) {
        std::rethrow_exception(out.outcome.failure);
    }
    return {out.space, std::move(out.outcome.trajectory)};
}

TruncatedRun auto_truncate(const ZenoModel& model, double xi_final,
                           const IntegratorOptions& options,
                           const TruncationPolicy& policy)
{
    if (!(xi_final > 0.0)) {
        throw ConfigError("xi_final must be positive", "invalid_grid");
    }
    options.validate();
    const auto grid = uniform_grid(0.0, xi_final, options.sample_count);
    return auto_truncate(model, grid, options, policy);
}

DensityMatrix matrix_exponential_reference(const ZenoModel& model,
                                           const DensityMatrix& rho0,
                                           double xi)
{
    if (xi == 0.0) {
        return rho0;
    }
    // exp(xi M) v = exp(xi M_RR) v_R when R contains the support of v and is
    // closed under the coupling pattern of M.
    const Matrix m = liouvillian_matrix(model);
    const Vector v = vectorize(rho0.matrix());
    const Eigen::Index n = v.size();
    std::vector<char> reached(std::size_t(n), 0);
    std::vector<Eigen::Index> order;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (v(k) != complex(0.0)) {
            reached[std::size_t(k)] = 1;
            order.push_back(k);
        }
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
        const Eigen::Index src = order[head];
        for (Eigen::Index dst = 0; dst < n; ++dst) {
            if (!reached[std::size_t(dst)] && m(dst, src) != complex(0.0)) {
                reached[std::size_t(dst)] = 1;
                order.push_back(dst);
            }
        }
    }
    std::sort(order.begin(), order.end());
    const Eigen::Index r = Eigen::Index(order.size());
    Matrix block(r, r);
    Vector v_r(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        v_r(i) = v(order[std::size_t(i)]);
        for (Eigen::Index j = 0; j < r; ++j) {
            block(i, j) = xi * m(order[std::size_t(i)], order[std::size_t(j)]);
        }
    }
    const Vector w_r = block.exp() * v_r;
    Vector w = Vector::Zero(n);
    for (Eigen::Index i = 0; i < r; ++i) {
        w(order[std::size_t(i)]) = w_r(i);
    }
    return {model.space(), unvectorize(w, model.space().dim())};
}

PropagatorReference::PropagatorReference(const ZenoModel& model, double step)
  : m_space(model.space()), m_step(step)
{
    const Matrix generator = step * liouvillian_matrix(model);
    m_propagator = generator.exp();
}

DensityMatrix PropagatorReference::advance(const DensityMatrix& rho,
                                           int count) const
{
    if (!(rho.space() == m_space)) {
        throw std::invalid_argument("state and propagator spaces differ");
    }
    Vector v = vectorize(rho.matrix());
    for (int k = 0; k < count; ++k) {
        v = m_propagator * v;
    }
    return {m_space, unvectorize(v, m_space.dim())};
}

std::string trajectory_csv_header()
{
    return "xi,theta,P0,P1,P2,P3,P_multi,trace_deficit,min_eigval,boundary_pop";
}

std::string trajectory_csv_row(double xi, double omega,
                               const PairStatistics& stats,
                               const SampleDiagnostics& diag)
{
    std::string row = format_double(xi) + ',' + format_double(omega * xi);
    for (std::size_t n = 0; n < 4; ++n) {
        row += ',' + format_double(stats.at(n));
    }
    row += ',' + format_double(stats.p_multi);
    row += ',' + format_double(diag.trace_deficit);
    row += ',' + format_double(diag.min_eigenvalue);
    row += ',' + format_double(diag.boundary_population);
    return row;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory)
{
    os << trajectory_csv_header() << '\n';
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        os << trajectory_csv_row(trajectory.xi[k], trajectory.omega,
                                 trajectory.stats[k],
                                 trajectory.diagnostics[k])
           << '\n';
    }
}

} // namespace qzb
