#pragma once

#include <vector>

#include "cyber/core/portfolio.hpp"
#include "cyber/core/random.hpp"
#include "cyber/netepidemic/spread.hpp"
#include "cyber/severity/distribution.hpp"

namespace cyber::netepidemic {

/// c(x) = a + b * x^p for x > 0 and 0 at x = 0.
struct CostCurve {
    double a = 0.0;
    double b = 0.0;
    double p = 1.0;

    static CostCurve zero() { return {}; }
    static CostCurve linear(double slope, double intercept = 0.0) { return {intercept, slope, 1.0}; }
    double operator()(double x) const;
};

void validate(const CostCurve& c);

/// One infection spell of a node. Spells still open at the horizon end there
/// with truncated set.
struct Episode {
    std::size_t node = 0;
    double start = 0.0;
    double end = 0.0;
    bool truncated = false;

    double length() const { return end - start; }
};

/// Reconstructs infection spells from a log; nodes infected at time zero open
/// a spell at 0. Throws on a recovery without a preceding infection.
std::vector<Episode> infection_episodes(const SpreadRun& run);

/// Y_{i,j} = L_{i,j} 1{node i infected at t_j}. One record per (attack, node)
/// in attack-major order; L_{i,j} is drawn for every pair.
std::vector<EventRecord> loss_indicator(const SpreadRun& run, const std::vector<double>& attack_times,
                                        const std::vector<severity::Distribution>& loss, const SeedStream& seed,
                                        RiskModule module = {});

struct DataLossSpec {
    double a = 1.0;
    double b = 1.0;
    double d_max = 1.0;
};

/// One record per episode, stamped at the episode end:
/// Y = eta(D) + cost(episode length), D ~ Beta(a, b) * d_max.
std::vector<EventRecord> loss_recovery_cost(const SpreadRun& run, const CostCurve& eta, const CostCurve& cost,
                                            const DataLossSpec& data_loss, const SeedStream& seed,
                                            RiskModule module = {});

}  // namespace cyber::netepidemic
