#pragma once

#include <string>
#include <variant>
#include <vector>

namespace cyber::game {

struct LinearUtility {};
/// U(w) = -exp(-a w)
struct ExponentialUtility {
    double a = 1.0;
};
/// U(w) = log(w + shift), undefined for w + shift <= 0.
struct ShiftedLogUtility {
    double shift = 0.0;
};

using Utility = std::variant<LinearUtility, ExponentialUtility, ShiftedLogUtility>;

double evaluate(const Utility& u, double wealth);

/// Either a polynomial sum_k c_k x^k or scale * exp(-rate x).
struct Curve {
    enum class Kind { Polynomial, Exponential } kind = Kind::Polynomial;
    std::vector<double> coefficients;
    double scale = 0.0;
    double rate = 0.0;

    static Curve zero() { return {}; }
    static Curve polynomial(std::vector<double> c) { return {Kind::Polynomial, std::move(c), 0.0, 0.0}; }
    static Curve linear(double intercept, double slope) { return polynomial({intercept, slope}); }
    static Curve exponential(double scale, double rate) { return {Kind::Exponential, {}, scale, rate}; }

    double operator()(double x) const;
};

struct AgentSpec {
    double initial_wealth = 0.0;
    Utility utility = LinearUtility{};
    double loss = 1.0;
    Curve cost;
    Curve attack;
};

enum class PremiumRule { Fair, Fixed };

struct GameSpec {
    std::vector<AgentSpec> agents;
    /// h[i][j]: probability that an infected j infects i.
    std::vector<std::vector<double>> contagion;
    PremiumRule premium_rule = PremiumRule::Fair;
    /// Per-agent premium for the fixed rule.
    std::vector<double> fixed_premiums;
    /// Indemnified fraction of the loss when insured; empty means full cover.
    std::vector<double> coverage;

    static GameSpec symmetric_pair(const AgentSpec& agent, double h);
};

void validate(const GameSpec& spec);

using Profile = std::vector<double>;

double infection_probability(std::size_t i, const Profile& x, const GameSpec& spec);
std::vector<double> infection_probabilities(const Profile& x, const GameSpec& spec);

/// The fair premium p_i(x) times the covered loss moves with the agent's own
/// security level.
double expected_utility(std::size_t i, const Profile& x, const GameSpec& spec, bool insured);

/// Maximizer over [0,1] on a 1e-3 grid refined to 1e-6; ties go to the
/// smaller level.
double best_response(std::size_t i, const Profile& x, const GameSpec& spec, bool insured);

struct NashResult {
    Profile profile;
    bool converged = false;
    /// Sweeps that moved the profile by at least the tolerance.
    int rounds = 0;
    double last_change = 0.0;
};

NashResult nash_iterate(const GameSpec& spec, bool insured, Profile start, int max_rounds = 200);

/// Runs nash_iterate from each start and keeps distinct converged profiles.
std::vector<Profile> equilibria_from_starts(const GameSpec& spec, bool insured, const std::vector<Profile>& starts,
                                            int max_rounds = 200);

double social_welfare(const Profile& x, const GameSpec& spec, bool insured);

/// profile, p, eu, welfare, converged, rounds.
std::string report_json(const NashResult& result, const GameSpec& spec, bool insured);

}  // namespace cyber::game
