#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cyber/core/errors.hpp"
#include "cyber/core/random.hpp"
#include "cyber/game/security.hpp"
#include "cyber/pricing/risk_measures.hpp"

namespace cyber::pricing {

/// N x J premium menu, row-major; choices[i] is the contract of customer i.
struct PremiumMatrix {
    std::size_t customers = 0;
    std::size_t contracts = 0;
    std::vector<double> values;
    std::vector<std::size_t> choices;

    double at(std::size_t i, std::size_t j) const { return values[i * contracts + j]; }
    double charged(std::size_t i) const { return at(i, choices[i]); }
};

void validate(const PremiumMatrix& pi);

/// E = Ẽ + Σ_i π_{i,j_i} - Σ_i Y_i per replication. losses[r][i].
std::vector<double> net_asset_value(const PremiumMatrix& pi, const std::vector<std::vector<double>>& losses,
                                    const std::vector<double>& other_assets);

struct AcceptanceSpec {
    RiskMeasure on_net_assets;
    RiskMeasure on_cyber_result;
};

struct Admissibility {
    bool accept_e = false;
    bool accept_y = false;
    double rho_e = 0.0;
    double rho_y = 0.0;

    bool admissible() const { return accept_e && accept_y; }
};

/// ρ_E(E) ≤ 0 and ρ_Y(Σπ - ΣY) ≤ 0, each up to a 1e-9 relative round-off
/// allowance.
Admissibility is_admissible(const PremiumMatrix& pi, const AcceptanceSpec& spec,
                            const std::vector<std::vector<double>>& losses, const std::vector<double>& other_assets);

/// Contract j indemnifies the fraction coverage[j] of a customer's loss.
struct ContractMenu {
    std::vector<double> coverage;
};

/// Ground-up losses per replication and customer, unaffected by premiums.
struct FixedLosses {
    std::vector<std::vector<double>> ground_up;
};

/// Customers play the security game with the charged premiums as fixed
/// premiums and the chosen coverage. Customer i is hit in replication r when
/// the common uniform u_{r,i} falls below its equilibrium p_i, losing L_i.
struct GameLosses {
    game::GameSpec game;
    std::size_t replications = 1000;
    SeedStream seed;
    int max_rounds = 200;
};

struct SearchGrid {
    double step = 1.0;
    double lower = 0.0;
    double upper = 0.0;
    /// One premium per contract shared by all customers.
    bool symmetric = false;
};

struct Criterion {
    enum class Kind { Competition, Weighted, Custom } kind = Kind::Competition;
    std::vector<double> weights;
    /// Smaller is better.
    std::function<double(const PremiumMatrix&)> score;

    static Criterion competition() { return {}; }
    static Criterion weighted(std::vector<double> v) { return {Kind::Weighted, std::move(v), {}}; }
    static Criterion custom(std::function<double(const PremiumMatrix&)> f) { return {Kind::Custom, {}, std::move(f)}; }
};

struct SystemicProblem {
    std::size_t customers = 1;
    ContractMenu menu;
    std::vector<std::size_t> choices;
    std::optional<FixedLosses> fixed;
    std::optional<GameLosses> game;
    std::vector<double> other_assets;
    AcceptanceSpec acceptance;
    SearchGrid grid;
    Criterion criterion;
};

void validate(const SystemicProblem& p);

struct GridPoint {
    PremiumMatrix premiums;
    Admissibility result;
};

struct SystemicResult {
    std::vector<GridPoint> evaluated;
    std::vector<std::size_t> admissible;
    std::vector<std::size_t> minimal;
    std::size_t selected = 0;
    bool upward_closed = true;
};

struct InfeasibilityCertificate {
    /// Evaluation at the all-upper-bound corner.
    GridPoint corner;
    std::size_t evaluated = 0;
};

class NoAdmissiblePremium : public ModelError {
public:
    explicit NoAdmissiblePremium(InfeasibilityCertificate certificate);
    InfeasibilityCertificate certificate;
};

/// Losses charged to the insurer for the given premiums, [r][i].
std::vector<std::vector<double>> insured_losses(const SystemicProblem& p, const PremiumMatrix& pi);

SystemicResult systemic_premium_search(const SystemicProblem& p);

}  // namespace cyber::pricing
