#include "cyber/game/security.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "cyber/core/errors.hpp"

namespace cyber::game {

namespace {

constexpr double kTolerance = 1e-6;

template <class... F>
struct Overloaded : F... {
    using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

void require_profile(const Profile& x, const GameSpec& spec)
{
    require(x.size() == spec.agents.size(), "profile size differs from agent count");
    for (double v : x) require(v >= 0.0 && v <= 1.0, "profile outside [0,1]^N");
}

}  // namespace

double evaluate(const Utility& u, double w)
{
    return std::visit(Overloaded{
                          [&](const LinearUtility&) { return w; },
                          [&](const ExponentialUtility& e) { return -std::exp(-e.a * w); },
                          [&](const ShiftedLogUtility& l) {
                              if (!(w + l.shift > 0.0))
                                  throw ModelError("utility undefined: log of nonpositive wealth");
                              return std::log(w + l.shift);
                          },
                      },
                      u);
}

double Curve::operator()(double x) const
{
    if (kind == Kind::Exponential) return scale * std::exp(-rate * x);
    double acc = 0.0;
    for (auto c = coefficients.rbegin(); c != coefficients.rend(); ++c) acc = acc * x + *c;
    return acc;
}

GameSpec GameSpec::symmetric_pair(const AgentSpec& agent, double h)
{
    GameSpec g;
    g.agents = {agent, agent};
    g.contagion = {{0.0, h}, {h, 0.0}};
    return g;
}

void validate(const GameSpec& spec)
{
    const std::size_t n = spec.agents.size();
    require(n >= 1, "game needs at least one agent");
    require(spec.contagion.size() == n, "contagion matrix must be N x N");
    for (std::size_t i = 0; i < n; ++i) {
        require(spec.contagion[i].size() == n, "contagion matrix must be N x N");
        require(spec.contagion[i][i] == 0.0, "contagion diagonal must be zero");
        for (double h : spec.contagion[i]) require(h >= 0.0 && h <= 1.0, "contagion entries must lie in [0,1]");
    }
    for (const auto& a : spec.agents) {
        require(a.loss > 0.0, "loss must be positive");
        if (const auto* e = std::get_if<ExponentialUtility>(&a.utility)) require(e->a > 0.0, "risk aversion must be positive");
        require(a.cost(0.0) >= 0.0, "protection cost must satisfy C(0) ≥ 0");
        double prev_c = a.cost(0.0), prev_psi = a.attack(0.0), prev_slope = -1e300;
        for (int k = 0; k <= 100; ++k) {
            const double x = k / 100.0;
            const double psi = a.attack(x);
            require(psi >= 0.0 && psi <= 1.0, "attack curve must lie in [0,1]");
            require(psi <= prev_psi + 1e-12, "attack curve must be nonincreasing");
            const double c = a.cost(x);
            require(c >= prev_c - 1e-12, "protection cost must be nondecreasing");
            if (k > 0) {
                const double slope = c - prev_c;
                require(slope >= prev_slope - 1e-9 * (1.0 + std::abs(slope)), "protection cost must be convex");
                prev_slope = slope;
            }
            prev_c = c;
            prev_psi = psi;
        }
    }
    if (!spec.coverage.empty()) {
        require(spec.coverage.size() == n, "coverage: one fraction per agent");
        for (double c : spec.coverage) require(c >= 0.0 && c <= 1.0, "coverage fractions must lie in [0,1]");
    }
    if (spec.premium_rule == PremiumRule::Fixed) {
        require(spec.fixed_premiums.size() == n, "fixed premiums: one per agent");
        for (double p : spec.fixed_premiums) require(p >= 0.0, "premiums must be nonnegative");
    }
}

double infection_probability(std::size_t i, const Profile& x, const GameSpec& spec)
{
    require_profile(x, spec);
    require(i < spec.agents.size(), "agent index out of range");
    double survive = 1.0 - spec.agents[i].attack(x[i]);
    for (std::size_t j = 0; j < x.size(); ++j)
        if (j != i) survive *= 1.0 - spec.contagion[i][j] * spec.agents[j].attack(x[j]);
    return std::clamp(1.0 - survive, 0.0, 1.0);
}

std::vector<double> infection_probabilities(const Profile& x, const GameSpec& spec)
{
    std::vector<double> p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) p[i] = infection_probability(i, x, spec);
    return p;
}

double expected_utility(std::size_t i, const Profile& x, const GameSpec& spec, bool insured)
{
    const auto& a = spec.agents[i];
    const double p = infection_probability(i, x, spec);
    double w = a.initial_wealth - a.cost(x[i]);
    double retained = a.loss;
    if (insured) {
        const double cover = spec.coverage.empty() ? 1.0 : spec.coverage[i];
        const double premium = spec.premium_rule == PremiumRule::Fair ? p * cover * a.loss : spec.fixed_premiums[i];
        w -= premium;
        retained = (1.0 - cover) * a.loss;
        if (retained == 0.0) return evaluate(a.utility, w);
    }
    const double good = evaluate(a.utility, w);
    if (p == 0.0) return good;
    return (1.0 - p) * good + p * evaluate(a.utility, w - retained);
}

double best_response(std::size_t i, const Profile& x, const GameSpec& spec, bool insured)
{
    Profile y = x;
    auto eu = [&](double v) {
        y[i] = v;
        return expected_utility(i, y, spec, insured);
    };
    auto better = [](double cand, double best) { return cand > best + 1e-14 * std::max(1.0, std::abs(best)); };

    double best_x = 0.0, best_u = eu(0.0);
    for (int k = 1; k <= 1000; ++k) {
        const double v = k / 1000.0;
        const double u = eu(v);
        if (better(u, best_u)) {
            best_u = u;
            best_x = v;
        }
    }
    for (double step : {1e-4, 1e-5, 1e-6}) {
        const double lo = std::max(0.0, best_x - 10.0 * step);
        const double hi = std::min(1.0, best_x + 10.0 * step);
        double cx = best_x, cu = best_u;
        for (int k = 0; lo + k * step <= hi + 1e-15; ++k) {
            const double v = std::min(1.0, lo + k * step);
            const double u = eu(v);
            if (better(u, cu) || (v < cx && !better(cu, u))) {
                cu = u;
                cx = v;
            }
        }
        best_x = cx;
        best_u = cu;
    }
    return best_x;
}

NashResult nash_iterate(const GameSpec& spec, bool insured, Profile start, int max_rounds)
{
    validate(spec);
    require_profile(start, spec);
    require(max_rounds >= 1, "max_rounds must be positive");
    NashResult r;
    r.profile = std::move(start);
    for (int round = 0; round < max_rounds; ++round) {
        Profile next(r.profile.size());
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = best_response(i, r.profile, spec, insured);
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) change = std::max(change, std::abs(next[i] - r.profile[i]));
        r.profile = std::move(next);
        r.last_change = change;
        if (change < kTolerance) {
            r.converged = true;
            break;
        }
        ++r.rounds;
    }
    return r;
}

std::vector<Profile> equilibria_from_starts(const GameSpec& spec, bool insured, const std::vector<Profile>& starts,
                                            int max_rounds)
{
    std::vector<Profile> found;
    for (const auto& s : starts) {
        auto r = nash_iterate(spec, insured, s, max_rounds);
        if (!r.converged) continue;
        const bool seen = std::any_of(found.begin(), found.end(), [&](const Profile& f) {
            for (std::size_t i = 0; i < f.size(); ++i)
                if (std::abs(f[i] - r.profile[i]) > 1e-4) return false;
            return true;
        });
        if (!seen) found.push_back(r.profile);
    }
    return found;
}

double social_welfare(const Profile& x, const GameSpec& spec, bool insured)
{
    double s = 0.0;
    for (std::size_t i = 0; i < spec.agents.size(); ++i) s += expected_utility(i, x, spec, insured);
    return s;
}

std::string report_json(const NashResult& result, const GameSpec& spec, bool insured)
{
    nlohmann::json j;
    j["profile"] = result.profile;
    j["p"] = infection_probabilities(result.profile, spec);
    std::vector<double> eu;
    for (std::size_t i = 0; i < spec.agents.size(); ++i) eu.push_back(expected_utility(i, result.profile, spec, insured));
    j["eu"] = eu;
    j["welfare"] = social_welfare(result.profile, spec, insured);
    j["insured"] = insured;
    j["converged"] = result.converged;
    j["rounds"] = result.rounds;
    j["last_change"] = result.last_change;
    return j.dump(2);
}

}  // namespace cyber::game
