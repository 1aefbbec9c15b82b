#include "qzb/observables.hpp"

#include <algorithm>
#include <stdexcept>

#include "qzb/errors.hpp"

namespace qzb {

std::string_view to_string(PairConvention convention)
{
    switch (convention) {
    case PairConvention::joint_diagonal:
        return "joint-diagonal";
    case PairConvention::idler_marginal:
        return "idler-marginal";
    }
    return "unknown";
}

PairConvention parse_convention(std::string_view text)
{
    if (text == "joint-diagonal") {
        return PairConvention::joint_diagonal;
    }
    if (text == "idler-marginal") {
        return PairConvention::idler_marginal;
    }
    throw ConfigError("unknown pair convention '" + std::string(text) + "'");
}

double PairStatistics::total() const
{
    double sum = 0.0;
    for (double x : p) {
        sum += x;
    }
    return sum;
}

double PairStatistics::mean_pairs() const
{
    double sum = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        sum += double(n) * p[n];
    }
    return sum;
}

PairStatistics pair_distribution(const TwoModeSpace& space,
                                 std::span<const double> populations,
                                 PairConvention convention)
{
    if (populations.size() != std::size_t(space.dim())) {
        throw std::invalid_argument("population vector does not match space");
    }

    PairStatistics stats;
    stats.convention = convention;

    if (convention == PairConvention::idler_marginal) {
        stats.p.assign(std::size_t(space.dim_b() - 1), 0.0);
        for (int n_a = 0; n_a < space.dim_a(); ++n_a) {
            for (int n = 0; n + 1 < space.dim_b(); ++n) {
                stats.p[std::size_t(n)] +=
                    populations[std::size_t(space.index(n_a, n))];
            }
        }
    } else {
        const int top = std::min(space.dim_a(), space.dim_b()) - 1;
        stats.p.assign(std::size_t(top), 0.0);
        for (int n = 0; n < top; ++n) {
            stats.p[std::size_t(n)] = populations[std::size_t(space.index(n, n))];
        }
        for (int i = 0; i < space.dim(); ++i) {
            if (space.n_a(i) != space.n_b(i)) {
                stats.leaked += populations[std::size_t(i)];
            }
        }
    }

    stats.p1 = stats.at(1);
    for (std::size_t n = 2; n < stats.p.size(); ++n) {
        stats.p_multi += stats.p[n];
    }
    return stats;
}

PairStatistics pair_distribution(const DensityMatrix& rho,
                                 PairConvention convention)
{
    const Eigen::VectorXd diag = rho.matrix().diagonal().real();
    return pair_distribution(rho.space(),
                             std::span<const double>(diag.data(),
                                                     std::size_t(diag.size())),
                             convention);
}

std::optional<AntibunchingMetrics> antibunching_metrics(
    const PairStatistics& stats)
{
    if (stats.p1 == 0.0) {
        return std::nullopt;
    }
    if (stats.p_multi == 0.0) {
        return AntibunchingMetrics{0.0, 0.0};
    }
    // Thermal pair statistics with mean m: P_{n>1} = (m / (1 + m))^2.
    const double m = stats.mean_pairs();
    const double x = m / (1.0 + m);
    return AntibunchingMetrics{stats.p_multi / (stats.p1 * stats.p1),
                               x * x / stats.p_multi};
}

double boundary_population(const TwoModeSpace& space,
                           std::span<const double> populations, Mode mode)
{
    const int top = space.cutoff(mode) - 1;
    double sum = 0.0;
    for (int i = 0; i < space.dim(); ++i) {
        if (space.photons(i, mode) == top) {
            sum += populations[std::size_t(i)];
        }
    }
    return sum;
}

} // namespace qzb
