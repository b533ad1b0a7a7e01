#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cyber/core/errors.hpp"
#include "cyber/core/random.hpp"
#include "cyber/pricing/risk_measures.hpp"
#include "cyber/severity/distribution.hpp"

namespace cyber::pricing {

struct PremiumPrinciple {
    enum class Kind { Variance, StdDev, Exponential, Wang } kind = Kind::Variance;
    /// Loading a, or γ for the exponential principle.
    double parameter = 0.0;
    Distortion distortion;

    static PremiumPrinciple variance(double a) { return {Kind::Variance, a, {}}; }
    static PremiumPrinciple standard_deviation(double a) { return {Kind::StdDev, a, {}}; }
    static PremiumPrinciple exponential(double gamma) { return {Kind::Exponential, gamma, {}}; }
    static PremiumPrinciple wang(Distortion psi) { return {Kind::Wang, 0.0, std::move(psi)}; }
};

/// Premium for the claims sample S (nonnegative convention) under the
/// empirical law.
double classical_premium(const std::vector<double>& claims, const PremiumPrinciple& principle);

struct Decomposition {
    std::vector<double> systematic;
    std::vector<double> idiosyncratic;
    std::vector<std::string> cells;
    std::vector<double> cell_means;
    std::vector<std::size_t> cell_sizes;
};

/// systematic = cell mean of S minus offset, idiosyncratic = S - systematic.
/// Cells are the distinct factor tags.
Decomposition decompose_nonsystemic(const std::vector<std::string>& factor_tags, const std::vector<double>& claims,
                                    double offset = 0.0);

/// Conditional law of a single firm's annual claims given a factor state:
/// a compound Poisson sum when a rate is set, otherwise one severity draw.
struct LlnCell {
    std::optional<double> poisson_rate;
    severity::Distribution severity;

    double mean() const;
    double standard_deviation() const;
    double draw(Rng& rng) const;
};

struct LlnReport {
    std::vector<std::size_t> sizes;
    /// Max over cells of the RMS deviation of the firm average from the cell
    /// mean.
    std::vector<double> deviation;
    /// Max over cells of deviation * sqrt(n) / sd.
    std::vector<double> normalized;
    double log_log_slope = 0.0;
    bool decreasing = false;
    bool within_bound = false;
};

LlnReport conditional_lln_check(const std::vector<LlnCell>& cells, const std::vector<std::size_t>& sizes,
                                std::size_t reps, const SeedStream& seed);

/// Fraction of replications in which n firms' total claims exceed n times
/// the conditional mean, i.e. the premium that replicates the systematic part.
double shortfall_probability(const LlnCell& cell, std::size_t n, std::size_t reps, const SeedStream& seed);

struct HedgeCandidate {
    std::string name;
    /// H_1 per replication.
    std::vector<double> payoff;
    /// H_0.
    double price = 0.0;
};

/// H_1 = sum_k θ_k B_k with θ in a box; H_0 = sum_k θ_k c_k.
struct HedgeSpan {
    std::vector<std::vector<double>> basis;
    std::vector<double> prices;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct HedgeFamily {
    std::vector<HedgeCandidate> candidates;
    std::optional<HedgeSpan> span;
};

struct PremiumConstraints {
    std::optional<double> rho_max;
    std::optional<double> cost_max;
};

struct SystematicPremium {
    double premium = 0.0;
    /// -H_0
    double hedge_cost = 0.0;
    /// ρ(R_1)
    double residual_risk = 0.0;
    std::string hedge;
    std::vector<double> coefficients;
};

class NoAdmissibleDecomposition : public ModelError {
public:
    NoAdmissibleDecomposition(double rho_lower_bound, double cost_lower_bound);
    double rho_lower_bound;
    double cost_lower_bound;
};

/// Minimizes -H_0 + ρ(-S - H_1) over the zero hedge, the listed candidates
/// and the span. Ties go to the cheaper hedge.
SystematicPremium systematic_premium(const std::vector<double>& systematic_claims, const HedgeFamily& hedges,
                                     const RiskMeasure& rho, const PremiumConstraints& constraints = {});

struct SubadditivityReport {
    double sum_of_premiums = 0.0;
    double portfolio_premium = 0.0;
    double gain = 0.0;
};

/// AVaR_λ of each residual position and of their sum.
SubadditivityReport portfolio_subadditivity_report(const std::vector<std::vector<double>>& residuals, double lambda);

}  // namespace cyber::pricing
