#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qzb/integrator.hpp"
#include "qzb/observables.hpp"

namespace qzb {

/// A family of dimensionless runs: Omega = 1, gamma_a = g, gamma_b = ratio * g,
/// sampled at theta = Omega * xi.
struct SweepSpec
{
    std::vector<double> g_values{0.0, 3.0, 10.0, 30.0};
    std::vector<double> theta_grid;
    double gamma_b_ratio = 0.0;
    PairConvention convention = PairConvention::joint_diagonal;
    IntegratorOptions integrator;
    /// When false every run uses the policy's initial cutoffs and a leak is
    /// reported as a row error.
    bool auto_truncate = true;
    TruncationPolicy truncation;
    int worker_count = 1;
    std::string output_path;

    /// Throws ConfigError (`invalid_grid` / `invalid_options`).
    void validate() const;
};

struct SweepRow
{
    double g = 0.0;
    double theta = 0.0;
    PairStatistics stats;
    PairStatistics other_stats;
    SampleDiagnostics diagnostics;
    int dim_a = 0;
    int dim_b = 0;
    /// Empty on success, otherwise the SimulationError tag.
    std::string error;
};

struct SweepResult
{
    /// Sorted by g, then theta.
    std::vector<SweepRow> rows;
};

/// One task per g value, each integrating once across the whole theta grid.
/// Rows at and after a failure carry the failure's tag; other g values are
/// unaffected. The output does not depend on worker_count.
SweepResult run_sweep(const SweepSpec& spec);

/// g = {0, 3, 10, 30}, gamma_b = 0, theta on a uniform grid over [0, 2].
SweepSpec figure2_spec(int grid_points = 201);

SweepResult figure2_sweep(const SweepSpec& spec);

/// Columns: g,xi,theta,P0,P1,P2,P3,P_multi,trace_deficit,min_eigval,
/// boundary_pop,dim_a,dim_b,error. Failed rows have empty numeric fields.
void write_sweep_csv(std::ostream& os, const SweepResult& result,
                     bool other_convention = false);
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row, bool other_convention = false);

/// Rows for a single g value.
std::vector<SweepRow> panel(const SweepResult& result, double g);

// Physical-unit design points --------------------------------------------------

struct DesignPoint
{
    double omega_ghz = 0.1;
    double gamma_ghz = 2.0;
    double tau_ns = 10.0;
    /// Counter-propagating scheme: effective coupling sqrt(2) * omega.
    bool cp_scheme = true;

    /// Throws ConfigError for negative or non-finite values.
    void validate() const;
    double effective_omega() const;
};

struct DesignPointResult
{
    DesignPoint point;
    double effective_omega = 0.0;
    double g = 0.0;        // gamma / effective_omega, 0 when omega is 0
    double theta = 0.0;    // effective_omega * tau
    PairStatistics stats;
    PairStatistics other_stats;
    SampleDiagnostics diagnostics;
    int dim_a = 0;
    int dim_b = 0;

    double p1() const { return stats.p1; }
    double p2() const { return stats.at(2); }
};

/// Runs the two-mode model at (effective omega, gamma_a = gamma, gamma_b = 0)
/// for time tau. The run is made in dimensionless units (Omega = 1,
/// g = gamma / Omega_eff, up to theta = Omega_eff * tau); with Omega = 0 the
/// state stays in the vacuum.
DesignPointResult design_point(const DesignPoint& dp,
                               const IntegratorOptions& options = {},
                               const TruncationPolicy& policy = {});

std::string design_point_csv_header();
std::string design_point_csv_row(const DesignPointResult& r);

// Peak single-pair probability -------------------------------------------------

struct PeakRow
{
    double g = 0.0;
    double theta_star = 0.0;
    double p1_max = 0.0;
    double p_multi = 0.0;   // at theta_star
};

struct PeakSearch
{
    double theta_max = 2.0;
    int coarse_points = 61;
    double theta_tolerance = 1e-6;
    PairConvention convention = PairConvention::joint_diagonal;
    IntegratorOptions integrator;
    TruncationPolicy truncation{8, 8, 256};
};

/// Coarse scan of P1(theta) followed by golden-section refinement around the
/// best grid point.
std::vector<PeakRow> peak_p1_vs_gamma(const std::vector<double>& g_values,
                                      const PeakSearch& search = {});

} // namespace qzb
