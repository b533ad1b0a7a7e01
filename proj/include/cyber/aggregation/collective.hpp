#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cyber/core/random.hpp"
#include "cyber/dependence/copula.hpp"
#include "cyber/frequency/intensity.hpp"
#include "cyber/frequency/processes.hpp"
#include "cyber/severity/distribution.hpp"

namespace cyber {
class Portfolio;
}

namespace cyber::aggregation {

struct PoissonArrivals {
    frequency::IntensityFunction intensity;
};
/// Cox process driven by the module's own factor model.
struct CoxArrivals {
    frequency::FactorModel model;
    double multiplier = 1.0;
};
/// Cox process driven by the portfolio-wide factor path passed to
/// portfolio_total; intensity = multiplier * link(R_t).
struct SharedFactorArrivals {
    frequency::Link link;
    double multiplier = 1.0;
};
/// Claim count is the total number of events over all streams.
struct HawkesArrivals {
    frequency::HawkesSpec spec;
};

using ArrivalSpec = std::variant<PoissonArrivals, CoxArrivals, SharedFactorArrivals, HawkesArrivals>;

/// Frequency-severity dependence through a Gumbel copula. Requires Poisson
/// arrivals: the count law is Poisson with the integrated intensity, the
/// severity law of the model is the per-period scale, and claims are
/// scale * unit_claim.
struct Coupling {
    double theta = 1.0;
    severity::Distribution unit_claim = severity::Distribution::degenerate(1.0);
};

struct CollectiveModel {
    ArrivalSpec frequency;
    severity::Distribution severity;
    std::optional<Coupling> coupling;
};

void validate(const CollectiveModel& model);

/// Empirical distribution of end-of-period totals.
struct LossSample {
    std::vector<double> values;
    double horizon = 1.0;
    std::string label;
    std::string seed_trace;
    /// Optional conditioning tag per replication (shared factor path index).
    std::vector<std::uint64_t> tags;
};

/// Columns: replication,value.
void write_csv(const LossSample& sample, std::ostream& out);
LossSample read_csv(std::istream& in);
std::string to_json(const LossSample& sample);
LossSample from_json(const std::string& text);

struct WaldMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// E[S] = E[N] E[Y]; Var(S) = E[N] Var(Y) + Var(N) E[Y]^2.
WaldMoments wald_moments(double freq_mean, double freq_var, double sev_mean, double sev_var);

LossSample simulate_total(const CollectiveModel& model, double horizon, std::size_t n_reps, const SeedStream& seed);

struct PortfolioLoss {
    LossSample total;
    std::vector<LossSample> modules;
    std::vector<std::uint64_t> factor_tags;
};

/// For each outer replication o, one shared factor path is drawn from
/// seed.child(o); reps_per_path conditionally independent portfolio
/// scenarios are then simulated on it. Samples have n_paths * reps_per_path
/// entries, tagged with o.
PortfolioLoss portfolio_total(const Portfolio& portfolio, const std::vector<CollectiveModel>& module_models,
                              const std::optional<frequency::FactorModel>& shared_factor, double horizon,
                              std::size_t n_paths, const SeedStream& seed, std::size_t reps_per_path = 1);

/// Multiplies each module's frequency by its group count n_k (Poisson and
/// factor-driven arrivals; Hawkes streams are already per firm).
std::vector<CollectiveModel> scale_by_group_counts(const Portfolio& portfolio, std::vector<CollectiveModel> models);

}  // namespace cyber::aggregation
