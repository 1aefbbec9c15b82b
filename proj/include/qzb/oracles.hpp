#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qzb/model.hpp"
#include "qzb/observables.hpp"

namespace qzb {

// Closed-form references ---------------------------------------------------

/// Pair distribution of the two-mode squeezed vacuum,
/// P_n = tanh^{2n}(r) / cosh^2(r), for n = 0..n_max.
std::vector<double> tmsv_distribution(double r, int n_max);

/// sum_{n>=2} P_n of the two-mode squeezed vacuum = tanh^4(r).
double tmsv_p_multi(double r);

/// sin^2(omega L)
double adiabatic_p1(double omega, double length);

/// (2 omega / gamma)^2 sin^2(omega L). Throws std::invalid_argument for
/// gamma <= 0.
double adiabatic_p2(double omega, double gamma, double length);

// Quantum-jump Monte Carlo ---------------------------------------------------

struct McOptions
{
    long trajectory_count = 20000;
    std::uint64_t rng_seed = 20110101;
    /// Fixed step for tracking the decaying norm.
    double step = 0.005;
    int worker_count = 1;
    /// Number of leading trajectories whose jump records are kept.
    int record_jumps = 0;
    PairConvention convention = PairConvention::joint_diagonal;

    void validate() const;
};

struct JumpEvent
{
    double xi;
    int channel;   // index into ZenoModel::channels()

    bool operator==(const JumpEvent&) const = default;
};

struct McResult
{
    std::vector<double> xi;
    std::vector<PairStatistics> stats;                 // ensemble means
    std::vector<std::vector<double>> p_stderr;         // per sample, per n
    std::vector<double> p1_stderr;
    std::vector<double> p_multi_stderr;
    std::vector<double> boundary_population;           // ensemble mean
    long trajectory_count = 0;
    std::uint64_t rng_seed = 0;
    std::string rng_algorithm;
    std::vector<std::vector<JumpEvent>> jump_records;
};

/// Name of the random-number scheme, recorded in every McResult.
std::string mc_rng_algorithm();

/**
 * Unravels the master equation into pure-state trajectories starting from
 * the vacuum. Between jumps the unnormalised state evolves under
 * H_eff = H - (i/2) sum_c g_c L_c^dag L_c; a jump happens when the squared
 * norm falls below a uniform random threshold, located by fixed-step
 * tracking and linear interpolation inside the step. Per-trajectory
 * expectation values are averaged in trajectory order so the result does not
 * depend on worker_count.
 *
 * Throws ConfigError (tag `mc_step`) if the norm drops by more than 10% in a
 * single step.
 */
McResult mc_evolve(const ZenoModel& model,
                   std::span<const double> sample_points,
                   const McOptions& options);

McResult mc_evolve(const ZenoModel& model, double xi_final,
                   const McOptions& options);

/// Trajectory CSV columns followed by
/// P1_stderr,Pmulti_stderr,n_traj,rng_algo,rng_seed.
void write_mc_csv(std::ostream& os, const McResult& result, double omega);
std::string mc_csv_header();

} // namespace qzb
