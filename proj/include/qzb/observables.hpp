#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qzb/density_matrix.hpp"

namespace qzb {

/**
 * How "probability of n pairs" is read off the two-mode state.
 *
 * joint_diagonal: P_n = <n,n|rho|n,n>; weight on n_a != n_b is reported
 *                 separately as `leaked`.
 * idler_marginal: P_n = sum_{n_a} <n_a,n|rho|n_a,n>; the idler is lossless
 *                 when gamma_b = 0 so it counts every pair ever created.
 */
enum class PairConvention { joint_diagonal, idler_marginal };

std::string_view to_string(PairConvention convention);
/// Accepts "joint-diagonal" / "idler-marginal". Throws ConfigError.
PairConvention parse_convention(std::string_view text);

struct PairStatistics
{
    PairConvention convention = PairConvention::joint_diagonal;
    /// P_0 .. P_max. The highest Fock level of each mode is excluded and
    /// accounted for by the boundary diagnostic instead.
    std::vector<double> p;
    double p1 = 0.0;
    double p_multi = 0.0;   // sum_{n >= 2} p[n]
    double leaked = 0.0;    // joint_diagonal only: weight off the n_a = n_b line

    double at(std::size_t n) const { return n < p.size() ? p[n] : 0.0; }
    double total() const;
    double mean_pairs() const;
};

/// `populations` is the diagonal of rho in the documented basis ordering.
PairStatistics pair_distribution(const TwoModeSpace& space,
                                 std::span<const double> populations,
                                 PairConvention convention);

PairStatistics pair_distribution(const DensityMatrix& rho,
                                 PairConvention convention);

struct AntibunchingMetrics
{
    double ratio_to_p1_squared;
    /// P_{n>1} of a two-mode squeezed vacuum with the same mean pair number,
    /// divided by the observed P_{n>1}.
    double suppression_vs_tmsv;
};

/// Empty when p1 == 0. Both metrics are 0 when p_multi == 0.
std::optional<AntibunchingMetrics> antibunching_metrics(
    const PairStatistics& stats);

/// Total population in the highest retained level of `mode`.
double boundary_population(const TwoModeSpace& space,
                           std::span<const double> populations, Mode mode);

} // namespace qzb
