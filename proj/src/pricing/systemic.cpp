#include "cyber/pricing/systemic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cyber/core/parallel.hpp"

namespace cyber::pricing {

namespace {

constexpr std::size_t kMaxDimensions = 12;
constexpr std::size_t kMaxGridPoints = 2'000'000;

bool accepts(double rho, const std::vector<double>& sample)
{
    double scale = 1.0;
    for (double v : sample) scale = std::max(scale, std::abs(v));
    return rho <= 1e-9 * scale;
}

bool dominated_by(const PremiumMatrix& a, const PremiumMatrix& b)
{
    for (std::size_t k = 0; k < a.values.size(); ++k)
        if (b.values[k] > a.values[k]) return false;
    return b.values != a.values;
}

}  // namespace

void validate(const PremiumMatrix& pi)
{
    require(pi.customers >= 1 && pi.contracts >= 1, "premium matrix needs N ≥ 1 and J ≥ 1");
    require(pi.values.size() == pi.customers * pi.contracts, "premium matrix must hold N x J entries");
    require(pi.choices.size() == pi.customers, "one contract choice per customer");
    for (double v : pi.values) require(v >= 0.0 && std::isfinite(v), "premiums must be finite and nonnegative");
    for (auto j : pi.choices) require(j < pi.contracts, "contract choice index out of range");
}

std::vector<double> net_asset_value(const PremiumMatrix& pi, const std::vector<std::vector<double>>& losses,
                                    const std::vector<double>& other_assets)
{
    validate(pi);
    require(other_assets.size() == losses.size(), "net assets and losses must be replication-aligned");
    double income = 0.0;
    for (std::size_t i = 0; i < pi.customers; ++i) income += pi.charged(i);
    std::vector<double> e(losses.size());
    for (std::size_t r = 0; r < losses.size(); ++r) {
        require(losses[r].size() == pi.customers, "customer index out of range");
        double paid = 0.0;
        for (double y : losses[r]) paid += y;
        e[r] = other_assets[r] + income - paid;
    }
    return e;
}

Admissibility is_admissible(const PremiumMatrix& pi, const AcceptanceSpec& spec,
                            const std::vector<std::vector<double>>& losses, const std::vector<double>& other_assets)
{
    const auto e = net_asset_value(pi, losses, other_assets);
    std::vector<double> y(losses.size());
    for (std::size_t r = 0; r < losses.size(); ++r) y[r] = e[r] - other_assets[r];
    Admissibility a;
    a.rho_e = spec.on_net_assets(e);
    a.rho_y = spec.on_cyber_result(y);
    a.accept_e = accepts(a.rho_e, e);
    a.accept_y = accepts(a.rho_y, y);
    return a;
}

void validate(const SystemicProblem& p)
{
    require(p.customers >= 1, "need at least one customer");
    const std::size_t j = p.menu.coverage.size();
    require(j >= 1, "contract menu must be nonempty");
    for (double c : p.menu.coverage) require(c >= 0.0 && c <= 1.0, "coverage fractions must lie in [0,1]");
    require(p.choices.size() == p.customers, "one contract choice per customer");
    for (auto c : p.choices) require(c < j, "contract choice index out of range");
    require(p.fixed.has_value() != p.game.has_value(), "give exactly one loss model: fixed or game");
    std::size_t reps = 0;
    if (p.fixed) {
        reps = p.fixed->ground_up.size();
        require(reps >= 1, "fixed losses need at least one replication");
        for (const auto& row : p.fixed->ground_up) {
            require(row.size() == p.customers, "fixed losses need one column per customer");
            for (double v : row) require(v >= 0.0 && std::isfinite(v), "losses must be finite and nonnegative");
        }
    } else {
        game::validate(p.game->game);
        require(p.game->game.agents.size() == p.customers, "game agents must match customers");
        reps = p.game->replications;
        require(reps >= 1, "game loss model needs at least one replication");
    }
    require(p.other_assets.empty() || p.other_assets.size() == reps, "other assets must be replication-aligned");
    validate(p.acceptance.on_net_assets);
    validate(p.acceptance.on_cyber_result);
    require(p.grid.step > 0.0, "grid step δ must be positive");
    require(p.grid.lower >= 0.0 && p.grid.upper >= p.grid.lower, "grid bounds need 0 ≤ lower ≤ upper");
    const std::size_t dims = p.grid.symmetric ? j : p.customers * j;
    require(dims <= kMaxDimensions, "grid dimension cap exceeded (N·J ≤ 12)");
    const double per_axis = std::floor((p.grid.upper - p.grid.lower) / p.grid.step + 1e-9) + 1.0;
    require(std::pow(per_axis, static_cast<double>(dims)) <= static_cast<double>(kMaxGridPoints),
            "grid has too many points");
    if (p.criterion.kind == Criterion::Kind::Weighted) {
        require(p.criterion.weights.size() == p.customers, "one weight per customer");
        for (double w : p.criterion.weights) require(w > 0.0, "weights must be positive");
    }
    if (p.criterion.kind == Criterion::Kind::Custom) require(bool(p.criterion.score), "custom criterion needs a score");
}

std::vector<std::vector<double>> insured_losses(const SystemicProblem& p, const PremiumMatrix& pi)
{
    std::vector<std::vector<double>> y;
    if (p.fixed) {
        y = p.fixed->ground_up;
        for (auto& row : y)
            for (std::size_t i = 0; i < row.size(); ++i) row[i] *= p.menu.coverage[pi.choices[i]];
        return y;
    }
    auto g = p.game->game;
    g.premium_rule = game::PremiumRule::Fixed;
    g.fixed_premiums.assign(p.customers, 0.0);
    g.coverage.assign(p.customers, 1.0);
    for (std::size_t i = 0; i < p.customers; ++i) {
        g.fixed_premiums[i] = pi.charged(i);
        g.coverage[i] = p.menu.coverage[pi.choices[i]];
    }
    const auto eq = game::nash_iterate(g, true, game::Profile(p.customers, 0.0), p.game->max_rounds);
    const auto prob = game::infection_probabilities(eq.profile, g);
    y.assign(p.game->replications, std::vector<double>(p.customers, 0.0));
    for (std::size_t r = 0; r < y.size(); ++r) {
        Rng rng = p.game->seed.child(r).rng();
        for (std::size_t i = 0; i < p.customers; ++i) {
            const double u = rng.uniform();
            if (u < prob[i]) y[r][i] = g.coverage[i] * g.agents[i].loss;
        }
    }
    return y;
}

NoAdmissiblePremium::NoAdmissiblePremium(InfeasibilityCertificate c)
    : ModelError([&] {
          std::ostringstream os;
          os << "no admissible premium on grid: " << c.evaluated << " points rejected; upper corner gives ρ_E = "
             << c.corner.result.rho_e << ", ρ_Y = " << c.corner.result.rho_y;
          return os.str();
      }()),
      certificate(std::move(c))
{
}

SystemicResult systemic_premium_search(const SystemicProblem& p)
{
    validate(p);
    const std::size_t nj = p.menu.coverage.size();
    const std::size_t dims = p.grid.symmetric ? nj : p.customers * nj;
    const auto per_axis =
        static_cast<std::size_t>(std::floor((p.grid.upper - p.grid.lower) / p.grid.step + 1e-9)) + 1;
    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) total *= per_axis;

    auto matrix_at = [&](std::size_t code) {
        PremiumMatrix pi{p.customers, nj, std::vector<double>(p.customers * nj), p.choices};
        std::vector<double> axis(dims);
        for (std::size_t d = dims; d-- > 0;) {
            axis[d] = p.grid.lower + static_cast<double>(code % per_axis) * p.grid.step;
            code /= per_axis;
        }
        for (std::size_t i = 0; i < p.customers; ++i)
            for (std::size_t j = 0; j < nj; ++j) pi.values[i * nj + j] = p.grid.symmetric ? axis[j] : axis[i * nj + j];
        return pi;
    };
    const std::vector<double> zero_assets(
        p.fixed ? p.fixed->ground_up.size() : p.game->replications, 0.0);
    const auto& assets = p.other_assets.empty() ? zero_assets : p.other_assets;

    SystemicResult out;
    out.evaluated.resize(total);
    parallel_for(total, [&](std::size_t code) {
        auto pi = matrix_at(code);
        const auto y = insured_losses(p, pi);
        out.evaluated[code] = {pi, is_admissible(pi, p.acceptance, y, assets)};
    });
    for (std::size_t k = 0; k < total; ++k)
        if (out.evaluated[k].result.admissible()) out.admissible.push_back(k);

    if (out.admissible.empty()) {
        InfeasibilityCertificate cert{out.evaluated.back(), total};
        throw NoAdmissiblePremium(std::move(cert));
    }

    for (auto a : out.admissible) {
        const auto& pa = out.evaluated[a].premiums;
        const bool dominated = std::any_of(out.admissible.begin(), out.admissible.end(), [&](std::size_t b) {
            return dominated_by(pa, out.evaluated[b].premiums);
        });
        if (!dominated) out.minimal.push_back(a);
    }

    // Charged premiums only enter through chosen entries, so upward closure is
    // checked along single-axis increments.
    for (auto a : out.admissible) {
        std::size_t stride = 1;
        for (std::size_t d = dims; d-- > 0;) {
            const std::size_t digit = (a / stride) % per_axis;
            if (digit + 1 < per_axis && !out.evaluated[a + stride].result.admissible()) out.upward_closed = false;
            stride *= per_axis;
        }
    }

    auto score = [&](const PremiumMatrix& pi) {
        switch (p.criterion.kind) {
        case Criterion::Kind::Competition: {
            double s = 0.0;
            for (std::size_t i = 0; i < pi.customers; ++i) s += pi.charged(i);
            return s;
        }
        case Criterion::Kind::Weighted: {
            double s = 0.0;
            for (std::size_t i = 0; i < pi.customers; ++i) s += p.criterion.weights[i] * pi.charged(i);
            return s;
        }
        case Criterion::Kind::Custom: return p.criterion.score(pi);
        }
        return 0.0;
    };
    std::size_t best = out.admissible.front();
    double best_score = score(out.evaluated[best].premiums);
    for (auto a : out.admissible) {
        const double s = score(out.evaluated[a].premiums);
        const bool tie = std::abs(s - best_score) <= 1e-12 * std::max(1.0, std::abs(best_score));
        if ((!tie && s < best_score) ||
            (tie && out.evaluated[a].premiums.values < out.evaluated[best].premiums.values)) {
            best = a;
            best_score = s;
        }
    }
    out.selected = best;
    return out;
}

}  // namespace cyber::pricing
