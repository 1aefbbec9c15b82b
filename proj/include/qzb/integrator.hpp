#pragma once

#include <exception>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qzb/density_matrix.hpp"
#include "qzb/model.hpp"
#include "qzb/observables.hpp"

namespace qzb {

struct IntegratorOptions
{
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    double max_step = std::numeric_limits<double>::infinity();
    /// Uniform output grid size for the evolve(model, rho0, xi_final, ...)
    /// overload, including both end points.
    int sample_count = 2;
    /// Largest population allowed in the top Fock level of either mode.
    double boundary_tolerance = 1e-8;
    /// 0: eigenvalue check at sample points only; k > 0: also every k
    /// accepted steps.
    int positivity_check_every = 0;
    double trace_tolerance = 1e-7;
    double positivity_tolerance = 1e-8;
    long max_steps = 20'000'000;
    /// Keep a dense DensityMatrix per sample point. Ignored for spaces larger
    /// than max_stored_dim; statistics and diagnostics are always kept.
    bool store_states = true;
    int max_stored_dim = 2048;
    PairConvention convention = PairConvention::joint_diagonal;

    /// Throws ConfigError on non-positive tolerances or sample_count < 2.
    void validate() const;
};

struct SampleDiagnostics
{
    double trace_deficit = 0.0;
    double min_eigenvalue = 0.0;
    double boundary_population = 0.0;   // max of the two modes
    double boundary_signal = 0.0;
    double boundary_idler = 0.0;
    /// max |rho_ij - conj(rho_ji)| before symmetrisation at this sample.
    double hermiticity_deviation = 0.0;
    /// Weight on basis states with n_a + n_b odd, and with n_a > n_b.
    double odd_parity_population = 0.0;
    double signal_excess_population = 0.0;
};

struct Trajectory
{
    TwoModeSpace space{2, 2};
    double omega = 0.0;
    PairConvention convention = PairConvention::joint_diagonal;
    std::vector<double> xi;
    std::vector<PairStatistics> stats;               // in `convention`
    std::vector<PairStatistics> other_stats;         // the other convention
    std::vector<SampleDiagnostics> diagnostics;
    std::vector<DensityMatrix> states;               // only with store_states
    long steps = 0;
    long rejected_steps = 0;

    std::size_t size() const noexcept { return xi.size(); }
    PairStatistics statistics(std::size_t sample, PairConvention c) const;
};

struct EvolveOutcome
{
    /// Every sample point reached before a failure (or all of them).
    Trajectory trajectory;
    /// Null on success.
    std::exception_ptr failure;

    bool ok() const noexcept { return !failure; }
};

/// Integrates the master equation with an adaptive Dormand-Prince 5(4)
/// scheme and PI step control. Samples are taken at the given points, which
/// must be non-negative and strictly increasing; xi = 0 is always recorded
/// first. The state is propagated only on the entries reachable from the
/// nonzero pattern of rho0, which is exact because all other entries stay
/// identically zero.
EvolveOutcome try_evolve(const ZenoModel& model, const DensityMatrix& rho0,
                         std::span<const double> sample_points,
                         const IntegratorOptions& options);

/// As try_evolve but throws TruncationLeak, NonPhysicalState or StepFailure.
Trajectory evolve(const ZenoModel& model, const DensityMatrix& rho0,
                  std::span<const double> sample_points,
                  const IntegratorOptions& options);

/// Uniform grid of options.sample_count points on [0, xi_final].
Trajectory evolve(const ZenoModel& model, const DensityMatrix& rho0,
                  double xi_final, const IntegratorOptions& options);

std::vector<double> uniform_grid(double start, double stop, int count);

struct TruncationPolicy
{
    int initial_dim_a = 8;
    int initial_dim_b = 8;
    int ceiling = 64;
};

struct TruncatedOutcome
{
    TwoModeSpace space{2, 2};
    EvolveOutcome outcome;
};

/// Evolves the vacuum, doubling whichever cutoff leaked until the run is
/// leak-free. On reaching the ceiling the outcome carries CutoffCeiling
/// together with the samples reached on the largest space.
TruncatedOutcome try_auto_truncate(const ZenoModel& model,
                                   std::span<const double> sample_points,
                                   const IntegratorOptions& options,
                                   const TruncationPolicy& policy = {});

struct TruncatedRun
{
    TwoModeSpace space{2, 2};
    Trajectory trajectory;
};

TruncatedRun auto_truncate(const ZenoModel& model,
                           std::span<const double> sample_points,
                           const IntegratorOptions& options,
                           const TruncationPolicy& policy = {});

TruncatedRun auto_truncate(const ZenoModel& model, double xi_final,
                           const IntegratorOptions& options,
                           const TruncationPolicy& policy = {});

/// exp(xi M) applied to vec(rho0) by Pade scaling-and-squaring on the dense
/// Kronecker-built Liouvillian, restricted to the block reachable from
/// vec(rho0) through M's nonzero pattern. Reference only.
DensityMatrix matrix_exponential_reference(const ZenoModel& model,
                                           const DensityMatrix& rho0,
                                           double xi);

/// Precomputed exp(step M) for repeated application on a fixed grid.
class PropagatorReference
{
public:
    PropagatorReference(const ZenoModel& model, double step);

    double step() const noexcept { return m_step; }
    /// rho after `count` applications of the one-step propagator.
    DensityMatrix advance(const DensityMatrix& rho, int count = 1) const;

private:
    TwoModeSpace m_space;
    double m_step;
    Matrix m_propagator;
};

/// CSV columns: xi,theta,P0,P1,P2,P3,P_multi,trace_deficit,min_eigval,
/// boundary_pop. theta = omega * xi.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
std::string trajectory_csv_header();
std::string trajectory_csv_row(double xi, double omega,
                               const PairStatistics& stats,
                               const SampleDiagnostics& diag);

} // namespace qzb
