#include "qzb/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "qzb/errors.hpp"
#include "qzb/format.hpp"
#include "qzb/integrator.hpp"

namespace qzb {

std::vector<double> tmsv_distribution(double r, int n_max)
{
    if (!(r >= 0.0) || n_max < 0) {
        throw std::invalid_argument("tmsv_distribution needs r >= 0, n_max >= 0");
    }
    const double t2 = std::tanh(r) * std::tanh(r);
    const double c2 = std::cosh(r) * std::cosh(r);
    std::vector<double> p(std::size_t(n_max) + 1);
    double weight = 1.0 / c2;
    for (auto& x : p) {
        x = weight;
        weight *= t2;
    }
    return p;
}

double tmsv_p_multi(double r)
{
    const double t = std::tanh(r);
    return t * t * t * t;
}

double adiabatic_p1(double omega, double length)
{
    const double s = std::sin(omega * length);
    return s * s;
}

double adiabatic_p2(double omega, double gamma, double length)
{
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("adiabatic_p2 needs gamma > 0");
    }
    const double ratio = 2.0 * omega / gamma;
    return ratio * ratio * adiabatic_p1(omega, length);
}

void McOptions::validate() const
{
    if (trajectory_count < 1) {
        throw ConfigError("trajectory_count must be >= 1", "invalid_options");
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ConfigError("MC step must be positive", "invalid_options");
    }
    if (worker_count < 1 || record_jumps < 0) {
        throw ConfigError("invalid MC worker/record settings", "invalid_options");
    }
}

std::string mc_rng_algorithm()
{
    return "mt19937_64/splitmix64-per-trajectory";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform in (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& engine)
{
    return (double(engine() >> 11) + 0.5) * 0x1.0p-53;
}

/// exp(A t) v by Taylor series with enough sub-steps that each has
/// ||A h||_1 <= 1/2; the series is summed to round-off.
class ExpAction
{
public:
    explicit ExpAction(SparseMatrix generator) : m_a(std::move(generator))
    {
        // Column-sum norm.
        Eigen::VectorXd col = Eigen::VectorXd::Zero(m_a.cols());
        for (int i = 0; i < m_a.outerSize(); ++i) {
            for (SparseMatrix::InnerIterator it(m_a, i); it; ++it) {
                col(it.col()) += std::abs(it.value());
            }
        }
        m_norm = col.size() ? col.maxCoeff() : 0.0;
    }

    const SparseMatrix& generator() const noexcept { return m_a; }

    Vector apply(Vector v, double t) const
    {
        if (t <= 0.0 || m_norm == 0.0) {
            return v;
        }
        const int substeps = std::max(1, int(std::ceil(2.0 * m_norm * t)));
        const double h = t / substeps;
        Vector term, sum;
        for (int s = 0; s < substeps; ++s) {
            term = v;
            sum = v;
            for (int k = 1; k < 60; ++k) {
                term = (h / k) * (m_a * term);
                sum += term;
                if (term.norm() <= 1e-17 * sum.norm()) {
                    break;
                }
            }
            v = sum;
        }
        return v;
    }

private:
    SparseMatrix m_a;
    double m_norm = 0.0;
};

// Neumaier summation.
class Accumulator
{
public:
    void add(double x)
    {
        const double t = m_sum + x;
        if (std::abs(m_sum) >= std::abs(x)) {
            m_c += (m_sum - t) + x;
        } else {
            m_c += (x - t) + m_sum;
        }
        m_sum = t;
    }
    double value() const { return m_sum + m_c; }

private:
    double m_sum = 0.0;
    double m_c = 0.0;
};

struct McContext
{
    const ZenoModel& model;
    const McOptions& options;
    std::vector<double> samples;       // sorted, > 0 except possibly first 0
    ExpAction drift;                   // exp(-i H_eff t)
    SparseMatrix one_step;             // exp(-i H_eff dt)
    std::size_t width;                 // values stored per sample
};

SparseMatrix propagator_columns(const ExpAction& drift, int dim, double dt)
{
    std::vector<Eigen::Triplet<complex>> t;
    for (int j = 0; j < dim; ++j) {
        Vector e = Vector::Zero(dim);
        e(j) = 1.0;
        const Vector col = drift.apply(e, dt);
        for (int i = 0; i < dim; ++i) {
            if (col(i) != complex(0.0)) {
                t.emplace_back(i, j, col(i));
            }
        }
    }
    SparseMatrix u(dim, dim);
    u.setFromTriplets(t.begin(), t.end());
    u.makeCompressed();
    return u;
}

/// Runs one trajectory, writing width values per sample into `out`:
/// P_0..P_{L-1} followed by the top-level (boundary) population.
void run_trajectory(const McContext& ctx, long index, double* out,
                    std::vector<JumpEvent>* jumps)
{
    const TwoModeSpace& space = ctx.model.space();
    const auto& channels = ctx.model.channels();
    std::mt19937_64 engine(splitmix64(ctx.options.rng_seed ^
                                      splitmix64(std::uint64_t(index))));

    Vector psi = Vector::Zero(space.dim());
    psi(0) = 1.0;
    double threshold = open_uniform(engine);
    double t = 0.0;
    std::vector<double> pops(std::size_t(space.dim()));
    const double dt = ctx.options.step;

    const auto jump = [&](double at) {
        std::vector<double> weights(channels.size());
        double total = 0.0;
        std::vector<Vector> candidates(channels.size());
        for (std::size_t c = 0; c < channels.size(); ++c) {
            candidates[c] = channels[c].op * psi;
            weights[c] = channels[c].rate * candidates[c].squaredNorm();
            total += weights[c];
        }
        if (!(total > 0.0)) {
            // Norm decayed through numerical round-off only; no channel can
            // fire from this state.
            threshold = open_uniform(engine) * psi.squaredNorm();
            return;
        }
        double pick = open_uniform(engine) * total;
        std::size_t chosen = 0;
        for (; chosen + 1 < channels.size(); ++chosen) {
            if (pick < weights[chosen]) {
                break;
            }
            pick -= weights[chosen];
        }
        psi = candidates[chosen] / candidates[chosen].norm();
        threshold = open_uniform(engine);
        if (jumps) {
            jumps->push_back({at, int(chosen)});
        }
    };

    // Advances psi by `length`, firing every jump inside the interval.
    const auto advance = [&](double length) {
        double remaining = length;
        while (remaining > 0.0) {
            const bool full = remaining >= dt;
            const double h = full ? dt : remaining;
            const double n0 = psi.squaredNorm();
            Vector next = full ? Vector(ctx.one_step * psi)
                               : ctx.drift.apply(psi, h);
            const double n1 = next.squaredNorm();
            if (n1 < 0.9 * n0) {
                throw ConfigError("norm dropped by more than 10% in one MC "
                                  "step; reduce the step",
                                  "mc_step");
            }
            if (n1 > threshold) {
                psi.swap(next);
                t += h;
                remaining -= h;
                continue;
            }
            // Linear interpolation of the squared norm within the step.
            const double frac = (n0 - threshold) / (n0 - n1);
            const double tau = std::clamp(frac, 0.0, 1.0) * h;
            psi = ctx.drift.apply(psi, tau);
            t += tau;
            remaining -= tau;
            jump(t);
        }
    };

    const std::size_t n_probs = ctx.width - 1;
    for (std::size_t s = 0; s < ctx.samples.size(); ++s) {
        advance(ctx.samples[s] - t);
        const double norm2 = psi.squaredNorm();
        for (int i = 0; i < space.dim(); ++i) {
            pops[std::size_t(i)] = std::norm(psi(i)) / norm2;
        }
        const PairStatistics st =
            pair_distribution(space, pops, ctx.options.convention);
        double* row = out + s * ctx.width;
        for (std::size_t n = 0; n < n_probs; ++n) {
            row[n] = st.at(n);
        }
        row[n_probs] = std::max(
            boundary_population(space, pops, Mode::signal),
            boundary_population(space, pops, Mode::idler));
    }
}

} // namespace

McResult mc_evolve(const ZenoModel& model,
                   std::span<const double> sample_points,
                   const McOptions& options)
{
    options.validate();
    if (sample_points.empty()) {
        throw ConfigError("MC needs at least one sample point", "invalid_grid");
    }
    for (std::size_t k = 0; k < sample_points.size(); ++k) {
        if (!(sample_points[k] >= 0.0) ||
            (k > 0 && !(sample_points[k] > sample_points[k - 1]))) {
            throw ConfigError("MC sample points must be non-negative and "
                              "strictly increasing",
                              "invalid_grid");
        }
    }

    const TwoModeSpace& space = model.space();
    const complex i_unit(0.0, 1.0);
    SparseMatrix generator = (-i_unit) * model.sparse_hamiltonian();
    for (const auto& ch : model.channels()) {
        generator -= (0.5 * ch.rate) * ch.op_dag_op;
    }
    generator.prune(complex(0.0));

    ExpAction drift(generator);
    SparseMatrix one_step = propagator_columns(drift, space.dim(), options.step);

    const PairStatistics probe =
        pair_distribution(space, std::vector<double>(std::size_t(space.dim())),
                          options.convention);
    const std::size_t n_probs = probe.p.size();

    McContext ctx{model,
                  options,
                  {sample_points.begin(), sample_points.end()},
                  std::move(drift),
                  std::move(one_step),
                  n_probs + 1};

    const long count = options.trajectory_count;
    const std::size_t per_traj = ctx.samples.size() * ctx.width;
    std::vector<double> values(std::size_t(count) * per_traj);
    std::vector<std::vector<JumpEvent>> records(
        std::size_t(std::min<long>(options.record_jumps, count)));

    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    const auto worker = [&]() {
        try {
            for (long k = next++; k < count; k = next++) {
                std::vector<JumpEvent>* rec =
                    k < long(records.size()) ? &records[std::size_t(k)] : nullptr;
                run_trajectory(ctx, k, values.data() + std::size_t(k) * per_traj,
                               rec);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_lock);
            if (!failure) {
                failure = std::current_exception();
            }
            next = count;
        }
    };
    const int workers =
        int(std::min<long>(options.worker_count, std::max<long>(1, count)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    McResult result;
    result.xi = ctx.samples;
    result.trajectory_count = count;
    result.rng_seed = options.rng_seed;
    result.rng_algorithm = mc_rng_algorithm();
    result.jump_records = std::move(records);

    const double n = double(count);
    for (std::size_t s = 0; s < ctx.samples.size(); ++s) {
        std::vector<Accumulator> sum(ctx.width), sum_sq(ctx.width);
        Accumulator multi, multi_sq;
        for (long k = 0; k < count; ++k) {
            const double* row = values.data() + std::size_t(k) * per_traj +
                                s * ctx.width;
            double m = 0.0;
            for (std::size_t j = 0; j < ctx.width; ++j) {
                sum[j].add(row[j]);
                sum_sq[j].add(row[j] * row[j]);
            }
            for (std::size_t j = 2; j < n_probs; ++j) {
                m += row[j];
            }
            multi.add(m);
            multi_sq.add(m * m);
        }
        const auto stderr_of = [&](double s1, double s2) {
            if (count < 2) {
                return 0.0;
            }
            const double mean = s1 / n;
            const double var = std::max(0.0, (s2 / n - mean * mean)) * n /
                               (n - 1.0);
            return std::sqrt(var / n);
        };

        PairStatistics st;
        st.convention = options.convention;
        st.p.resize(n_probs);
        std::vector<double> errs(n_probs);
        for (std::size_t j = 0; j < n_probs; ++j) {
            st.p[j] = sum[j].value() / n;
            errs[j] = stderr_of(sum[j].value(), sum_sq[j].value());
        }
        st.p1 = st.at(1);
        st.p_multi = multi.value() / n;
        if (options.convention == PairConvention::joint_diagonal) {
            st.leaked = std::max(0.0, 1.0 - st.total() -
                                          sum[n_probs].value() / n);
        }

        result.p1_stderr.push_back(n_probs > 1 ? errs[1] : 0.0);
        result.p_multi_stderr.push_back(
            stderr_of(multi.value(), multi_sq.value()));
        result.p_stderr.push_back(std::move(errs));
        result.boundary_population.push_back(sum[n_probs].value() / n);
        result.stats.push_back(std::move(st));
    }
    return result;
}

McResult mc_evolve(const ZenoModel& model, double xi_final,
                   const McOptions& options)
{
    const double points[] = {xi_final};
    return mc_evolve(model, points, options);
}

std::string mc_csv_header()
{
    return trajectory_csv_header() +
           ",P1_stderr,Pmulti_stderr,n_traj,rng_algo,rng_seed";
}

void write_mc_csv(std::ostream& os, const McResult& result, double omega)
{
    os << mc_csv_header() << '\n';
    for (std::size_t s = 0; s < result.xi.size(); ++s) {
        SampleDiagnostics diag;
        diag.trace_deficit = 0.0;
        diag.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        diag.boundary_population = result.boundary_population[s];
        os << trajectory_csv_row(result.xi[s], omega, result.stats[s], diag)
           << ',' << format_double(result.p1_stderr[s]) << ','
           << format_double(result.p_multi_stderr[s]) << ','
           << result.trajectory_count << ',' << result.rng_algorithm << ','
           << result.rng_seed << '\n';
    }
}

} // namespace qzb
