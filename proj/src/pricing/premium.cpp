#include "cyber/pricing/premium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "cyber/core/parallel.hpp"
#include "cyber/core/stats.hpp"

namespace cyber::pricing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double population_variance(const std::vector<double>& x, double m)
{
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size());
}

std::vector<double> negated(const std::vector<double>& x)
{
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
    return out;
}

}  // namespace

double classical_premium(const std::vector<double>& claims, const PremiumPrinciple& principle)
{
    require(!claims.empty(), "empty sample");
    for (double v : claims) require(std::isfinite(v), "sample contains non-finite values");
    double m = 0.0;
    for (double v : claims) m += v;
    m /= static_cast<double>(claims.size());
    switch (principle.kind) {
    case PremiumPrinciple::Kind::Variance:
        require(principle.parameter > 0.0, "loading a > 0 required");
        return m + principle.parameter * population_variance(claims, m);
    case PremiumPrinciple::Kind::StdDev:
        require(principle.parameter > 0.0, "loading a > 0 required");
        return m + principle.parameter * std::sqrt(population_variance(claims, m));
    case PremiumPrinciple::Kind::Exponential: return entropic(negated(claims), principle.parameter);
    case PremiumPrinciple::Kind::Wang: return distortion(negated(claims), principle.distortion);
    }
    return m;
}

Decomposition decompose_nonsystemic(const std::vector<std::string>& factor_tags, const std::vector<double>& claims,
                                    double offset)
{
    require(factor_tags.size() == claims.size(), "factor tags and claims must be aligned");
    require(!claims.empty(), "empty sample");
    std::map<std::string, std::size_t> index;
    Decomposition d;
    std::vector<std::size_t> cell_of(claims.size());
    for (std::size_t r = 0; r < claims.size(); ++r) {
        auto [it, inserted] = index.try_emplace(factor_tags[r], d.cells.size());
        if (inserted) {
            d.cells.push_back(factor_tags[r]);
            d.cell_means.push_back(0.0);
            d.cell_sizes.push_back(0);
        }
        cell_of[r] = it->second;
        d.cell_means[it->second] += claims[r];
        ++d.cell_sizes[it->second];
    }
    for (std::size_t c = 0; c < d.cells.size(); ++c) {
        if (d.cell_sizes[c] < 2) throw ValidationError("insufficient conditional replication");
        d.cell_means[c] /= static_cast<double>(d.cell_sizes[c]);
    }
    d.systematic.resize(claims.size());
    d.idiosyncratic.resize(claims.size());
    for (std::size_t r = 0; r < claims.size(); ++r) {
        d.systematic[r] = d.cell_means[cell_of[r]] - offset;
        d.idiosyncratic[r] = claims[r] - d.systematic[r];
    }
    return d;
}

double LlnCell::mean() const
{
    return poisson_rate ? *poisson_rate * severity.mean() : severity.mean();
}

double LlnCell::standard_deviation() const
{
    const double m = severity.mean(), v = severity.variance();
    return std::sqrt(poisson_rate ? *poisson_rate * (v + m * m) : v);
}

double LlnCell::draw(Rng& rng) const
{
    if (!poisson_rate) return severity.sample(rng);
    std::poisson_distribution<long> count(*poisson_rate);
    const long k = *poisson_rate > 0.0 ? count(rng) : 0;
    double s = 0.0;
    for (long j = 0; j < k; ++j) s += severity.sample(rng);
    return s;
}

LlnReport conditional_lln_check(const std::vector<LlnCell>& cells, const std::vector<std::size_t>& sizes,
                                std::size_t reps, const SeedStream& seed)
{
    require(!cells.empty() && !sizes.empty(), "need at least one cell and one size");
    require(reps >= 2, "need at least two replications");
    for (const auto& c : cells) {
        if (c.poisson_rate) require(*c.poisson_rate >= 0.0, "Poisson rate must be nonnegative");
        require(std::isfinite(c.mean()) && std::isfinite(c.standard_deviation()),
                "cell claims need finite mean and variance");
    }
    LlnReport rep;
    rep.sizes = sizes;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        require(sizes[s] >= 1, "sizes must be positive");
        const std::size_t n = sizes[s];
        double worst = 0.0, worst_norm = 0.0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double mu = cells[c].mean();
            std::vector<double> sq(reps);
            parallel_for(reps, [&](std::size_t r) {
                Rng rng = seed.child(c).child(s).child(r).rng();
                double dev = 0.0;
                for (std::size_t f = 0; f < n; ++f) dev += cells[c].draw(rng) - mu;
                dev /= static_cast<double>(n);
                sq[r] = dev * dev;
            });
            double acc = 0.0;
            for (double v : sq) acc += v;
            const double rms = std::sqrt(acc / static_cast<double>(reps));
            worst = std::max(worst, rms);
            const double sd = cells[c].standard_deviation();
            worst_norm = std::max(worst_norm, sd > 0.0 ? rms * std::sqrt(static_cast<double>(n)) / sd
                                                       : (rms > 0.0 ? kInf : 0.0));
        }
        rep.deviation.push_back(worst);
        rep.normalized.push_back(worst_norm);
    }
    rep.decreasing = true;
    for (std::size_t s = 1; s < sizes.size(); ++s) {
        const bool ok = rep.deviation[s] < rep.deviation[s - 1] ||
                        (rep.deviation[s] == 0.0 && rep.deviation[s - 1] == 0.0);
        rep.decreasing = rep.decreasing && ok;
    }
    rep.within_bound = rep.normalized.back() < 3.0;
    std::vector<double> lx, ly;
    for (std::size_t s = 0; s < sizes.size(); ++s)
        if (rep.deviation[s] > 0.0) {
            lx.push_back(std::log(static_cast<double>(sizes[s])));
            ly.push_back(std::log(rep.deviation[s]));
        }
    if (lx.size() >= 2) rep.log_log_slope = stats::covariance(lx, ly) / stats::variance(lx);
    return rep;
}

double shortfall_probability(const LlnCell& cell, std::size_t n, std::size_t reps, const SeedStream& seed)
{
    require(n >= 1 && reps >= 1, "need positive firm and replication counts");
    const double mu = cell.mean();
    std::vector<char> hit(reps);
    parallel_for(reps, [&](std::size_t r) {
        Rng rng = seed.child(r).rng();
        double dev = 0.0;
        for (std::size_t f = 0; f < n; ++f) dev += cell.draw(rng) - mu;
        hit[r] = dev > 0.0;
    });
    return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / static_cast<double>(reps);
}

NoAdmissibleDecomposition::NoAdmissibleDecomposition(double rho_lb, double cost_lb)
    : ModelError("no admissible decomposition: ρ_max must be at least " + std::to_string(rho_lb) +
                 " and the hedge budget at least " + std::to_string(cost_lb)),
      rho_lower_bound(rho_lb),
      cost_lower_bound(cost_lb)
{
}

namespace {

struct Evaluation {
    double premium = kInf;
    double cost = kInf;
    double risk = kInf;
    bool feasible = false;
};

class Search {
public:
    Search(const std::vector<double>& claims, const RiskMeasure& rho, const PremiumConstraints& cons)
        : claims_(claims), rho_(rho), cons_(cons)
    {
    }

    Evaluation evaluate(const std::vector<double>& payoff, double price)
    {
        std::vector<double> residual(claims_.size());
        for (std::size_t r = 0; r < claims_.size(); ++r) residual[r] = -claims_[r] - payoff[r];
        Evaluation e;
        e.cost = -price;
        e.risk = rho_(residual);
        e.premium = e.cost + e.risk;
        min_risk = std::min(min_risk, e.risk);
        min_cost = std::min(min_cost, e.cost);
        e.feasible = (!cons_.rho_max || e.risk <= *cons_.rho_max) && (!cons_.cost_max || e.cost <= *cons_.cost_max);
        return e;
    }

    static bool better(const Evaluation& a, const Evaluation& b)
    {
        if (!a.feasible) return false;
        if (!b.feasible) return true;
        const double tol = 1e-12 * std::max(1.0, std::abs(b.premium));
        if (a.premium < b.premium - tol) return true;
        if (a.premium > b.premium + tol) return false;
        return a.cost < b.cost;
    }

    double min_risk = kInf;
    double min_cost = kInf;

private:
    const std::vector<double>& claims_;
    const RiskMeasure& rho_;
    const PremiumConstraints& cons_;
};

}  // namespace

SystematicPremium systematic_premium(const std::vector<double>& claims, const HedgeFamily& hedges,
                                     const RiskMeasure& rho, const PremiumConstraints& constraints)
{
    require(!claims.empty(), "empty sample");
    validate(rho);
    const std::size_t n = claims.size();
    for (const auto& h : hedges.candidates) {
        require(h.payoff.size() == n, "hedge payoffs must be replication-aligned with the loss sample");
        require(std::isfinite(h.price), "hedge costs must be finite");
    }
    Search search(claims, rho, constraints);
    SystematicPremium best;
    Evaluation best_eval;
    auto consider = [&](const Evaluation& e, const std::string& name, std::vector<double> coefficients) {
        if (Search::better(e, best_eval)) {
            best_eval = e;
            best.hedge = name;
            best.coefficients = std::move(coefficients);
        }
    };
    consider(search.evaluate(std::vector<double>(n, 0.0), 0.0), "none", {});
    for (const auto& h : hedges.candidates) consider(search.evaluate(h.payoff, h.price), h.name, {});

    if (hedges.span) {
        const auto& sp = *hedges.span;
        const std::size_t k = sp.basis.size();
        require(k >= 1, "hedge span needs at least one basis payoff");
        require(sp.prices.size() == k && sp.lower.size() == k && sp.upper.size() == k,
                "hedge span arrays must have equal length");
        for (std::size_t j = 0; j < k; ++j) {
            require(sp.basis[j].size() == n, "hedge payoffs must be replication-aligned with the loss sample");
            require(sp.lower[j] <= sp.upper[j], "hedge coefficient box must have lower ≤ upper");
            require(std::isfinite(sp.prices[j]), "hedge costs must be finite");
        }
        auto eval_at = [&](const std::vector<double>& theta) {
            std::vector<double> payoff(n, 0.0);
            double price = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                price += theta[j] * sp.prices[j];
                for (std::size_t r = 0; r < n; ++r) payoff[r] += theta[j] * sp.basis[j][r];
            }
            return search.evaluate(payoff, price);
        };
        std::vector<std::vector<double>> starts{sp.lower, sp.upper, std::vector<double>(k)};
        for (std::size_t j = 0; j < k; ++j) starts.back()[j] = 0.5 * (sp.lower[j] + sp.upper[j]);
        for (auto theta : starts) {
            Evaluation cur = eval_at(theta);
            double step = 0.0;
            for (std::size_t j = 0; j < k; ++j) step = std::max(step, (sp.upper[j] - sp.lower[j]) / 20.0);
            while (step >= 1e-4) {
                bool improved = true;
                while (improved) {
                    improved = false;
                    for (std::size_t j = 0; j < k; ++j) {
                        const double span = sp.upper[j] - sp.lower[j];
                        if (span == 0.0) continue;
                        const double h = std::min(step, span);
                        for (double dir : {-1.0, 1.0}) {
                            auto trial = theta;
                            trial[j] = std::clamp(theta[j] + dir * h, sp.lower[j], sp.upper[j]);
                            if (trial[j] == theta[j]) continue;
                            const Evaluation e = eval_at(trial);
                            if (Search::better(e, cur)) {
                                cur = e;
                                theta = std::move(trial);
                                improved = true;
                                break;
                            }
                        }
                    }
                }
                step *= 0.5;
            }
            consider(cur, "span", theta);
        }
    }
    if (!best_eval.feasible) throw NoAdmissibleDecomposition(search.min_risk, search.min_cost);
    best.premium = best_eval.premium;
    best.hedge_cost = best_eval.cost;
    best.residual_risk = best_eval.risk;
    return best;
}

SubadditivityReport portfolio_subadditivity_report(const std::vector<std::vector<double>>& residuals, double lambda)
{
    require(!residuals.empty(), "need at least one module residual");
    const std::size_t n = residuals.front().size();
    std::vector<double> total(n, 0.0);
    SubadditivityReport rep;
    for (const auto& r : residuals) {
        require(r.size() == n, "misaligned samples");
        rep.sum_of_premiums += average_value_at_risk(r, lambda);
        for (std::size_t i = 0; i < n; ++i) total[i] += r[i];
    }
    rep.portfolio_premium = average_value_at_risk(total, lambda);
    rep.gain = rep.sum_of_premiums - rep.portfolio_premium;
    if (rep.gain < 0.0 && rep.gain >= -1e-10 * std::max(1.0, std::abs(rep.sum_of_premiums))) rep.gain = 0.0;
    return rep;
}

}  // namespace cyber::pricing
