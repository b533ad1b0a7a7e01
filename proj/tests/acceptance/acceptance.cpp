// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cyber/aggregation/collective.hpp"
#include "cyber/cli/app.hpp"
#include "cyber/core/parallel.hpp"
#include "cyber/core/stats.hpp"
#include "cyber/dependence/copula.hpp"
#include "cyber/frequency/processes.hpp"
#include "cyber/game/security.hpp"
#include "cyber/netepidemic/closure.hpp"
#include "cyber/netepidemic/master.hpp"
#include "cyber/netepidemic/nonmarkov.hpp"
#include "cyber/netepidemic/population.hpp"
#include "cyber/pricing/premium.hpp"
#include "cyber/pricing/systemic.hpp"

using namespace cyber;
namespace ne = cyber::netepidemic;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v, int prec = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

struct NamedGraph {
    std::string name;
    ne::Graph g;
};

std::vector<NamedGraph> oracle_graphs()
{
    return {{"path(5)", ne::path(5)},
            {"star(5)", ne::star(5)},
            {"complete(4)", ne::complete(4)},
            {"tree(2,2)", ne::tree(2, 2)},
            {"er(6,0.4)", ne::generate_er(6, 0.4, SeedStream(1))},
            {"triangle+pendant", ne::triangle_pendant()}};
}

Verdict master_agreement()
{
    const std::vector<double> times{0.5, 1.0, 2.0};
    const std::size_t reps = 100000;
    double worst = 0.0;
    std::size_t points = 0, misses = 0;
    std::string where;
    std::uint64_t stream = 0;
    for (const auto& [name, g] : oracle_graphs())
        for (auto model : {ne::Model::SIS, ne::Model::SIR}) {
            ne::SpreadParams p{1.0, 1.0, {}, model};
            const auto init = ne::seeded_state(g.node_count(), {0});
            const auto exact = ne::exact_master(g, p, init, times);
            const auto mc = ne::estimate_marginals(g, p, init, times, reps, SeedStream(20240).child(stream++));
            for (std::size_t t = 0; t < times.size(); ++t)
                for (std::size_t i = 0; i < g.node_count(); ++i) {
                    const double e = exact.infected[t][i];
                    const double se = std::sqrt(e * (1.0 - e) / static_cast<double>(reps));
                    const double dev = std::abs(mc.infected[t][i] - e);
                    const double z = se > 0.0 ? dev / se : (dev > 0.0 ? INFINITY : 0.0);
                    ++points;
                    if (z > worst) {
                        worst = z;
                        where = name + (model == ne::Model::SIS ? " SIS" : " SIR") + " t=" + fmt(times[t]) +
                                " node " + std::to_string(i);
                    }
                    if (z > 3.0) ++misses;
                }
        }
    return {misses == 0, std::to_string(points) + " points, " + std::to_string(misses) + " beyond 3 SE, max |z| " +
                             fmt(worst, 3) + " at " + where};
}

Verdict closure_sandwich()
{
    std::vector<double> times;
    for (int k = 0; k <= 40; ++k) times.push_back(0.1 * k);
    std::size_t points = 0, clamped = 0, upper = 0, lower = 0;
    double worst_lower = 0.0, worst_upper = 0.0;
    std::string where;
    for (const auto& [name, g] : oracle_graphs())
        for (double tau : {0.5, 1.0, 2.0}) {
            ne::SpreadParams p{tau, 1.0, {}, ne::Model::SIS};
            const auto init = ne::seeded_state(g.node_count(), {0});
            const auto exact = ne::exact_master(g, p, init, times);
            const auto nimfa = ne::solve_closure(g, p, init, {ne::ClosureScheme::Nimfa, 1}, times);
            const auto hil = ne::solve_closure(g, p, init, {ne::ClosureScheme::SplitHilbert, 1}, times);
            for (std::size_t t = 0; t < times.size(); ++t)
                for (std::size_t i = 0; i < g.node_count(); ++i) {
                    ++points;
                    if (nimfa.clamped[t][i] || hil.clamped[t][i]) {
                        ++clamped;
                        continue;
                    }
                    const double e = exact.infected[t][i];
                    const double lo = hil.infected[t][i] - e;
                    const double hi = e - nimfa.infected[t][i];
                    if (lo > 1e-8) {
                        ++lower;
                        if (lo > worst_lower) {
                            worst_lower = lo;
                            where = name + " tau=" + fmt(tau) + " t=" + fmt(times[t]) + " node " + std::to_string(i);
                        }
                    }
                    if (hi > 1e-8) {
                        ++upper;
                        worst_upper = std::max(worst_upper, hi);
                    }
                }
        }
    const double clamp_share = static_cast<double>(clamped) / static_cast<double>(points);
    std::string d = std::to_string(points) + " points, clamped " + fmt(100.0 * clamp_share, 3) +
                    "%, hilbert>exact at " + std::to_string(lower) + " (max " + fmt(worst_lower, 3) + ")";
    if (!where.empty()) d += " e.g. " + where;
    d += ", exact>nimfa at " + std::to_string(upper) + " (max " + fmt(worst_upper, 3) + ")";
    return {lower == 0 && upper == 0 && clamp_share < 0.01, d};
}

ne::Graph random_tree(std::size_t n, std::uint64_t seed)
{
    ne::Graph g(n);
    Rng rng = SeedStream(seed).rng();
    for (std::size_t k = 1; k < n; ++k)
        g.add_edge(k, static_cast<std::size_t>(rng.uniform() * static_cast<double>(k)));
    return g;
}

Verdict tree_exactness()
{
    std::vector<ne::Graph> trees;
    for (std::size_t n = 2; n <= 8; ++n) trees.push_back(ne::path(n));
    for (std::size_t n = 3; n <= 8; ++n) trees.push_back(ne::star(n));
    trees.push_back(ne::tree(2, 2));
    trees.push_back(ne::tree(3, 1));
    for (std::uint64_t s = 0; s < 10; ++s) trees.push_back(random_tree(5 + s % 4, 100 + s));
    std::vector<double> times;
    for (int k = 0; k <= 25; ++k) times.push_back(0.2 * k);
    double worst = 0.0;
    for (const auto& g : trees)
        for (auto [tau, gamma] : {std::pair{1.2, 0.7}, std::pair{3.0, 1.0}}) {
            ne::SpreadParams p{tau, gamma, {}, ne::Model::SIR};
            for (std::size_t seed : {std::size_t{0}, g.node_count() / 2})
                worst = std::max(worst, ne::pair_closure_sir_tree_check(g, p, ne::seeded_state(g.node_count(), {seed}),
                                                                        times));
        }
    return {worst < 1e-5, std::to_string(trees.size()) + " trees, max deviation " + fmt(worst, 3)};
}

std::int64_t event_code(const ne::SpreadRun& run)
{
    std::int64_t c[3] = {0, 0, 0};
    for (const auto& e : run.events) ++c[static_cast<int>(e.cause)];
    return c[1] * 10000 + c[2] * 100 + c[0];
}

Verdict epsilon_sis_reduction()
{
    const auto g = ne::star(5);
    const double tau = 1.0, gamma = 1.0, eps = 0.2, horizon = 2.0;
    const std::size_t reps = 10000;
    const auto init = ne::seeded_state(5, {0});
    ne::SpreadParams p{tau, gamma, {eps}, ne::Model::SIS};
    ne::NonMarkovSpec nm;
    nm.recovery = {severity::Distribution::exponential(gamma)};
    nm.internal = {severity::Distribution::exponential(tau)};
    nm.external = {severity::Distribution::exponential(eps)};
    std::vector<std::int64_t> a(reps), b(reps);
    parallel_for(reps, [&](std::size_t r) {
        a[r] = event_code(ne::gillespie_spread(g, p, init, horizon, SeedStream(41).child(r)));
        b[r] = event_code(ne::simulate_nonmarkov(g, nm, init, horizon, SeedStream(42).child(r)));
    });
    const auto res = stats::chi_square_two_sample(a, b);
    return {res.p_value > 0.01, "joint event-type counts, chi2 " + fmt(res.statistic) + " on " +
                                    std::to_string(res.dof) + " dof, p = " + fmt(res.p_value, 3)};
}

Verdict wald_agreement()
{
    struct Case {
        double lambda;
        severity::Distribution sev;
    };
    const std::vector<Case> cases{{2.0, severity::Distribution::gamma(2.25, 4.0 / 3.0)},
                                  {5.0, severity::Distribution::lognormal(0.0, 0.5)},
                                  {0.5, severity::Distribution::exponential(0.1)}};
    const std::size_t reps = 100000;
    bool ok = true;
    std::string d;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& c = cases[k];
        aggregation::CollectiveModel m{aggregation::PoissonArrivals{frequency::IntensityFunction::constant(c.lambda)},
                                       c.sev,
                                       {}};
        const auto s = aggregation::simulate_total(m, 1.0, reps, SeedStream(500 + k)).values;
        const double ey = c.sev.mean(), vy = c.sev.variance();
        const double mean = c.lambda * ey, var = c.lambda * (vy + ey * ey);
        const double m_hat = stats::mean(s), v_hat = stats::variance(s);
        double m4 = 0.0;
        for (double v : s) m4 += std::pow(v - m_hat, 4);
        m4 /= static_cast<double>(reps);
        const double se_m = std::sqrt(v_hat / static_cast<double>(reps));
        const double se_v = std::sqrt((m4 - v_hat * v_hat) / static_cast<double>(reps));
        const double zm = std::abs(m_hat - mean) / se_m, zv = std::abs(v_hat - var) / se_v;
        ok = ok && zm <= 3.0 && zv <= 3.0;
        d += (k ? "; " : "") + std::string("(") + fmt(mean) + ", " + fmt(var) + "): z_mean " + fmt(zm, 2) +
             ", z_var " + fmt(zv, 2);
    }
    return {ok, d};
}

Verdict hawkes_rate()
{
    const auto spec = frequency::HawkesSpec::univariate(frequency::IntensityFunction::constant(1.0), 0.5, 1.0);
    const double horizon = 500.0;
    const std::size_t reps = 200;
    std::vector<double> rate(reps);
    parallel_for(reps, [&](std::size_t r) {
        rate[r] = static_cast<double>(frequency::simulate_hawkes(spec, horizon, SeedStream(61).child(r))[0].size()) /
                  horizon;
    });
    const double avg = stats::mean(rate);
    bool rejected = true;
    for (double alpha : {1.0, 1.2}) {
        try {
            frequency::simulate_hawkes(
                frequency::HawkesSpec::univariate(frequency::IntensityFunction::constant(1.0), alpha, 1.0), 10.0,
                SeedStream(1));
            rejected = false;
        } catch (const ModelError&) {
        }
    }
    const double rel = std::abs(avg - 2.0) / 2.0;
    return {rel < 0.05 && rejected, "mean rate " + fmt(avg, 5) + " over " + std::to_string(reps) +
                                        " paths (rel. error " + fmt(rel, 2) + "), explosive specs " +
                                        (rejected ? "rejected" : "accepted")};
}

Verdict copula_checks()
{
    const std::size_t n = 100000;
    const auto gumbel = dependence::Copula::gumbel(2.0, 2);
    const auto pts = dependence::sample_copula(gumbel, n, SeedStream(71));
    std::vector<double> u(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = pts[k][0];
        v[k] = pts[k][1];
    }
    const double tau = stats::kendall_tau(u, v);

    double cdf_err = 0.0;
    Rng rng = SeedStream(72).rng();
    for (std::size_t d : {2, 3, 5}) {
        const auto c = dependence::Copula::gaussian(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                                               static_cast<Eigen::Index>(d)));
        for (int k = 0; k < 20; ++k) {
            std::vector<double> w(d);
            double prod = 1.0;
            for (auto& x : w) {
                x = rng.uniform();
                prod *= x;
            }
            cdf_err = std::max(cdf_err, std::abs(dependence::copula_cdf(c, w) - prod));
        }
    }

    const std::vector<std::pair<std::string, dependence::Copula>> family{
        {"gumbel", gumbel},
        {"clayton", dependence::Copula::clayton(2.0, 3)},
        {"gaussian", dependence::Copula::gaussian(dependence::equicorrelation(3, 0.5))},
        {"t", dependence::Copula::student_t(4.0, dependence::equicorrelation(2, 0.3))}};
    std::size_t tests = 0, failures = 0;
    double worst = 0.0;
    const double crit = stats::ks_critical(n, 0.01);
    for (std::size_t f = 0; f < family.size(); ++f) {
        const auto s = f == 0 ? pts : dependence::sample_copula(family[f].second, n, SeedStream(73 + f));
        for (std::size_t j = 0; j < s.front().size(); ++j) {
            std::vector<double> margin(n);
            for (std::size_t k = 0; k < n; ++k) margin[k] = s[k][j];
            const double ks = stats::ks_statistic(margin, [](double x) { return std::clamp(x, 0.0, 1.0); });
            worst = std::max(worst, ks);
            ++tests;
            if (ks > crit) ++failures;
        }
    }
    return {std::abs(tau - 0.5) <= 0.01 && cdf_err <= 1e-6 && failures == 0,
            "gumbel tau " + fmt(tau, 5) + ", gaussian identity cdf error " + fmt(cdf_err, 2) + ", KS " +
                std::to_string(tests - failures) + "/" + std::to_string(tests) + " margins pass (max " + fmt(worst, 3) +
                ", critical " + fmt(crit, 3) + ")"};
}

Verdict risk_measure_axioms()
{
    using pricing::RiskMeasure;
    const std::vector<RiskMeasure> measures{RiskMeasure::value_at_risk(0.125), RiskMeasure::average_value_at_risk(0.125),
                                            RiskMeasure::entropic(0.25),
                                            RiskMeasure::distorted(pricing::Distortion::power(0.5)),
                                            RiskMeasure::expectation()};
    Rng rng = SeedStream(81).rng();
    double cash = 0.0, mono = 0.0;
    for (int s = 0; s < 100; ++s) {
        std::vector<double> x(8 * (1 + s % 16)), y;
        for (auto& v : x) v = std::floor(rng.normal() * 64.0) / 8.0;
        y = x;
        for (auto& v : y) v += std::floor(rng.uniform() * 32.0) / 8.0;
        const double m = std::floor(rng.normal() * 16.0);
        auto shifted = x;
        for (auto& v : shifted) v += m;
        for (const auto& rho : measures) {
            const double base = rho(x);
            cash = std::max(cash, std::abs(rho(shifted) - (base - m)) / std::max(1.0, std::abs(base)));
            mono = std::max(mono, rho(y) - base);
        }
    }
    std::vector<double> two(100, 0.0);
    std::fill(two.begin(), two.begin() + 4, -100.0);
    const double avar = pricing::average_value_at_risk(two, 0.05);
    const double ent = pricing::entropic({-1.0, 0.0}, 1.0);
    bool gamma_mono = true;
    for (int s = 0; s < 20; ++s) {
        std::vector<double> x(50);
        for (auto& v : x) v = rng.normal() * 3.0;
        double prev = -INFINITY;
        for (double g = 0.01; g <= 5.0; g *= 1.5) {
            const double r = pricing::entropic(x, g);
            gamma_mono = gamma_mono && r >= prev - 1e-12;
            prev = r;
        }
    }
    const double wang = pricing::distortion({-1.0, 0.0, 0.0, 0.0}, pricing::Distortion::power(0.5));
    const bool ok = cash <= 1e-12 && mono <= 1e-12 && std::abs(avar - 80.0) < 1e-12 &&
                    std::abs(ent - 0.620115) <= 1e-6 && gamma_mono && std::abs(wang - 0.5) < 1e-15;
    return {ok, "cash invariance residual " + fmt(cash, 2) + ", monotonicity violation " + fmt(std::max(mono, 0.0), 2) +
                    ", AVaR two-point " + fmt(avar, 10) + ", entropic Bernoulli " + fmt(ent, 10) + ", gamma-monotone " +
                    (gamma_mono ? "yes" : "no") + ", Wang sqrt " + fmt(wang, 10)};
}

Verdict decomposition()
{
    const std::vector<double> z{1.0, 2.5, 4.0, 7.0, 10.0};
    const double sigma = 2.0;
    const std::size_t per = 1000;
    std::vector<std::string> tags;
    std::vector<double> s;
    Rng rng = SeedStream(91).rng();
    for (std::size_t c = 0; c < z.size(); ++c)
        for (std::size_t k = 0; k < per; ++k) {
            tags.push_back("cell" + std::to_string(c));
            s.push_back(z[c] + sigma * rng.normal());
        }
    const auto d = pricing::decompose_nonsystemic(tags, s);
    double worst_z = 0.0, worst_idio = 0.0;
    for (std::size_t c = 0; c < d.cells.size(); ++c) {
        const std::size_t idx = static_cast<std::size_t>(std::stoi(d.cells[c].substr(4)));
        worst_z = std::max(worst_z, std::abs(d.cell_means[c] - z[idx]) / (sigma / std::sqrt(double(per))));
        double acc = 0.0;
        for (std::size_t r = 0; r < s.size(); ++r)
            if (tags[r] == d.cells[c]) acc += d.idiosyncratic[r];
        worst_idio = std::max(worst_idio, std::abs(acc / double(per)));
    }
    const pricing::LlnCell cell{2.0, severity::Distribution::lognormal(0.0, 1.0)};
    const double shortfall = pricing::shortfall_probability(cell, 10000, 2500, SeedStream(92));
    return {worst_z <= 3.0 && worst_idio <= 1e-12 && std::abs(shortfall - 0.5) <= 0.02,
            "max systematic z " + fmt(worst_z, 3) + ", max idiosyncratic cell mean " + fmt(worst_idio, 2) +
                ", shortfall probability at n=1e4 " + fmt(shortfall, 4)};
}

// Independent AVaR: midpoint rule on the integral of VaR_alpha.
double avar_oracle(std::vector<double> x, double lambda)
{
    std::sort(x.begin(), x.end());
    const std::size_t steps = 200000;
    double acc = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double a = (static_cast<double>(k) + 0.5) / steps * lambda;
        acc += -x[static_cast<std::size_t>(a * static_cast<double>(x.size()))];
    }
    return acc / steps;
}

Verdict systematic_pricing()
{
    const std::size_t n = 4000;
    Rng rng = SeedStream(101).rng();
    std::vector<double> s(n), f(n);
    for (std::size_t r = 0; r < n; ++r) {
        f[r] = rng.normal();
        s[r] = std::exp(0.5 * f[r] + 0.3 * rng.normal());
    }
    pricing::HedgeFamily fam;
    std::vector<double> h1(n), h2(n);
    for (std::size_t r = 0; r < n; ++r) {
        h1[r] = -std::exp(0.5 * f[r]);
        h2[r] = -0.5 * s[r];
    }
    fam.candidates = {{"factor", h1, -1.2}, {"quota", h2, -0.62}};
    const double lambda = 0.05;
    const auto rho = pricing::RiskMeasure::average_value_at_risk(lambda);
    const auto got = pricing::systematic_premium(s, fam, rho);
    std::vector<std::pair<std::string, double>> oracle;
    std::vector<double> pos(n);
    for (std::size_t r = 0; r < n; ++r) pos[r] = -s[r];
    oracle.emplace_back("none", avar_oracle(pos, lambda));
    for (const auto& c : fam.candidates) {
        std::vector<double> res(n);
        for (std::size_t r = 0; r < n; ++r) res[r] = -s[r] - c.payoff[r];
        oracle.emplace_back(c.name, -c.price + avar_oracle(res, lambda));
    }
    const auto best = *std::min_element(oracle.begin(), oracle.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    const bool enum_ok = best.first == got.hedge && std::abs(best.second - got.premium) < 1e-6;

    const auto zero_only = pricing::systematic_premium(s, {}, rho);
    const bool zero_ok = zero_only.premium == rho(pos);

    double min_gain = INFINITY;
    for (int k = 0; k < 200; ++k) {
        std::vector<std::vector<double>> res(3, std::vector<double>(200));
        for (auto& r : res)
            for (auto& v : r) v = rng.normal() * (1.0 + k % 5) + (k % 3 == 0 ? res[0][0] : 0.0);
        min_gain = std::min(min_gain, pricing::portfolio_subadditivity_report(res, 0.01 + 0.004 * (k % 50)).gain);
    }
    // Gain on 1e5 independent lognormal residuals; SE from 20 batches.
    const std::size_t big = 100000, batches = 20;
    std::vector<std::vector<double>> ind(2, std::vector<double>(big));
    for (auto& r : ind)
        for (auto& v : r) v = -std::exp(rng.normal());
    const double gain = pricing::portfolio_subadditivity_report(ind, lambda).gain;
    std::vector<double> bg(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        std::vector<std::vector<double>> part(2);
        for (std::size_t m = 0; m < 2; ++m)
            part[m].assign(ind[m].begin() + b * (big / batches), ind[m].begin() + (b + 1) * (big / batches));
        bg[b] = pricing::portfolio_subadditivity_report(part, lambda).gain;
    }
    const double se_full = std::sqrt(stats::variance(bg) / static_cast<double>(batches));
    return {enum_ok && zero_ok && min_gain >= 0.0 && gain > 3.0 * se_full,
            "enumeration oracle picks '" + best.first + "' " + fmt(best.second, 8) + " vs '" + got.hedge + "' " +
                fmt(got.premium, 8) + ", zero-hedge premium equals rho(-S): " + (zero_ok ? "yes" : "no") +
                ", min gain " + fmt(min_gain, 3) + ", independent gain " + fmt(gain, 4) + " (SE " + fmt(se_full, 2) + ")"};
}

pricing::SystemicProblem binary_problem(std::size_t customers, double upper)
{
    pricing::SystemicProblem p;
    p.customers = customers;
    p.menu.coverage = {1.0};
    p.choices.assign(customers, 0);
    const std::size_t reps = 100;
    p.fixed = pricing::FixedLosses{std::vector<std::vector<double>>(reps, std::vector<double>(customers, 0.0))};
    for (std::size_t i = 0; i < customers; ++i)
        for (std::size_t r = 0; r < 20; ++r) p.fixed->ground_up[(r * 5 + i * 7) % reps][i] = 100.0;
    p.acceptance = {pricing::RiskMeasure::average_value_at_risk(0.25), pricing::RiskMeasure::expectation()};
    p.grid = {0.5, 0.0, upper, false};
    return p;
}

Verdict systemic_search()
{
    const auto one = pricing::systemic_premium_search(binary_problem(1, 120.0));
    const double minimal = one.evaluated[one.minimal.front()].premiums.values[0];
    bool closed = one.upward_closed && one.minimal.size() == 1;

    auto two = binary_problem(2, 150.0);
    two.grid.step = 5.0;
    two.criterion = pricing::Criterion::weighted({2.0, 1.0});
    const auto r2 = pricing::systemic_premium_search(two);
    closed = closed && r2.upward_closed;

    auto menu = binary_problem(1, 120.0);
    menu.menu.coverage = {1.0, 0.5};
    menu.grid.step = 2.0;
    const auto r3 = pricing::systemic_premium_search(menu);
    closed = closed && r3.upward_closed;

    bool certificate = false;
    try {
        pricing::systemic_premium_search(binary_problem(1, 50.0));
    } catch (const pricing::NoAdmissiblePremium& e) {
        certificate = !e.certificate.corner.result.admissible() && e.certificate.evaluated == 101;
    }
    return {minimal == 80.0 && closed && certificate,
            "1x1 minimal premium " + fmt(minimal, 6) + ", upward closed on 3 grids: " + (closed ? "yes" : "no") +
                ", empty grid certificate: " + (certificate ? "yes" : "no")};
}

Verdict game_checks()
{
    game::AgentSpec a;
    a.initial_wealth = 10.0;
    a.utility = game::ExponentialUtility{0.4};
    a.loss = 6.0;
    a.cost = game::Curve::polynomial({0.0, 0.0, 6.0});
    a.attack = game::Curve::linear(0.9, -0.8);
    const auto spec = game::GameSpec::symmetric_pair(a, 0.5);
    const auto eq = game::nash_iterate(spec, false, {0.0, 0.0});

    // 2-D grid oracle: profiles (a, b) on the 1001-point grid where each
    // coordinate is a grid best response to the other.
    const int m = 1000;
    std::vector<int> br(m + 1);
    for (int o = 0; o <= m; ++o) {
        double best = -INFINITY;
        for (int k = 0; k <= m; ++k) {
            const double u = game::expected_utility(0, {k / double(m), o / double(m)}, spec, false);
            if (u > best) {
                best = u;
                br[o] = k;
            }
        }
    }
    double oracle = -1.0, oracle2 = -1.0;
    int gap = m + 1;
    for (int b = 0; b <= m; ++b) {
        const int g = std::abs(br[br[b]] - b);
        if (g < gap) {
            gap = g;
            oracle = br[b] / double(m);
            oracle2 = b / double(m);
        }
    }
    const double dev = std::max(std::abs(eq.profile[0] - oracle), std::abs(eq.profile[1] - oracle2));

    auto lin = spec;
    for (auto& ag : lin.agents) ag.utility = game::LinearUtility{};
    Rng rng = SeedStream(111).rng();
    double indiff = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const game::Profile x{rng.uniform(), rng.uniform()};
        for (std::size_t i = 0; i < 2; ++i)
            indiff = std::max(indiff, std::abs(game::expected_utility(i, x, lin, true) -
                                               game::expected_utility(i, x, lin, false)));
    }
    game::AgentSpec b;
    b.attack = game::Curve::linear(1.0, -1.0);
    const auto pair = game::GameSpec::symmetric_pair(b, 0.5);
    const double p1 = game::infection_probability(0, {0.8, 0.6}, pair);
    return {eq.converged && dev <= 1e-3 && indiff <= 1e-12 && std::abs(p1 - 0.36) < 1e-12,
            "equilibrium (" + fmt(eq.profile[0], 6) + ", " + fmt(eq.profile[1], 6) + ") vs grid oracle (" +
                fmt(oracle, 6) + ", " + fmt(oracle2, 6) + "), linear indifference residual " + fmt(indiff, 2) +
                ", p_1 = " + fmt(p1, 12)};
}

Verdict population_checks()
{
    double residual = 0.0;
    for (auto [tau, gamma, n] : {std::tuple{0.002, 0.5, 1000.0}, std::tuple{3e-6, 0.2, 1e6}, std::tuple{1.5, 1.0, 1.0}}) {
        for (int grid : {5, 50, 500}) {
            std::vector<double> times;
            for (int k = 0; k <= grid; ++k) times.push_back(40.0 * k / grid);
            ne::PopulationSIR p{n, tau, gamma, 0.99 * n, 0.01 * n, 0.0};
            const auto tr = ne::integrate_population_sir(p, times);
            for (std::size_t k = 0; k < tr.times.size(); ++k)
                residual = std::max(residual, std::abs(tr.s[k] + tr.i[k] + tr.r[k] - n) / n);
        }
    }
    std::vector<double> times;
    for (int k = 0; k <= 100; ++k) times.push_back(0.1 * k);
    const ne::PopulationSIR decay{100.0, 0.0, 0.7, 60.0, 40.0, 0.0};
    const auto tr = ne::integrate_population_sir(decay, times);
    double decay_err = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double exact = 40.0 * std::exp(-0.7 * times[k]);
        decay_err = std::max(decay_err, std::abs(tr.i[k] - exact) / exact);
    }
    const double c = 0.1, horizon = 2.0, tau = 1.5;
    const ne::PortfolioHazard hz(ne::constant_infected(c, horizon), tau);
    const std::size_t firms = 100000;
    const auto t = hz.sample_infection_times(firms, SeedStream(121));
    const double freq =
        static_cast<double>(std::count_if(t.begin(), t.end(), [&](double v) { return v <= horizon; })) / firms;
    const double p = 1.0 - std::exp(-tau * c * horizon);
    const double z = std::abs(freq - p) / std::sqrt(p * (1.0 - p) / firms);
    return {residual < 1e-9 && decay_err < 1e-8 && z <= 3.0,
            "conservation residual " + fmt(residual, 2) + ", tau=0 decay error " + fmt(decay_err, 2) +
                ", hazard frequency " + fmt(freq, 5) + " vs " + fmt(p, 5) + " (z " + fmt(z, 2) + ")"};
}

std::string read(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::vector<std::pair<std::string, std::string>>& scenario_configs()
{
    static const std::vector<std::pair<std::string, std::string>> configs{
        {"frequency-sim",
         R"({"kind":"frequency-sim","seed":3,"arrivals":{"type":"hawkes","mu":1,"alpha":0.5,"beta":1},"horizon":20,"replications":200})"},
        {"collective-sim",
         R"({"kind":"collective-sim","seed":3,"frequency":{"type":"poisson","intensity":2},"severity":{"family":"gamma","shape":2.25,"scale":1.3333333333333333},"coupling":{"theta":2},"replications":2000})"},
        {"epidemic-sim",
         R"({"kind":"epidemic-sim","seed":3,"graph":{"type":"path","n":5},"spread":{"tau":1,"gamma":1,"model":"SIR"},"infected":[0],"horizon":2,"times":[0.5,1,2],"replications":5000,"exact":true})"},
        {"closure-compare",
         R"({"kind":"closure-compare","graph":{"type":"path","n":6},"spread":{"tau":1,"gamma":1},"infected":[0],"times":[0,0.5,1,2,4]})"},
        {"population-sir",
         R"({"kind":"population-sir","seed":3,"population":1000,"tau":0.002,"gamma":0.5,"s0":990,"i0":10,"times":[0,1,2,5,10,20],"portfolio":{"tau":0.01,"firms":20000,"horizon":10}})"},
        {"game",
         R"({"kind":"game","agents":[{"wealth":10,"utility":{"type":"exponential","a":0.4},"loss":6,"cost":{"coefficients":[0,0,6]},"attack":{"coefficients":[0.9,-0.8]}},{"wealth":10,"utility":{"type":"exponential","a":0.4},"loss":6,"cost":{"coefficients":[0,0,6]},"attack":{"coefficients":[0.9,-0.8]}}],"contagion":[[0,0.5],[0.5,0]]})"},
        {"price-classical",
         R"({"kind":"price-classical","seed":3,"claims":{"collective":{"frequency":{"type":"poisson","intensity":2},"severity":{"family":"lognormal","mu":0,"sigma":1},"replications":5000}},"principles":[{"type":"variance","a":0.1},{"type":"stddev","a":0.5},{"type":"exponential","gamma":0.1},{"type":"wang","psi":{"power":0.5}}],"risk_measures":[{"type":"var","lambda":0.01},{"type":"avar","lambda":0.01}]})"},
        {"price-systematic",
         R"({"kind":"price-systematic","seed":3,"cells":[{"probability":0.7,"poisson_rate":1,"severity":{"family":"lognormal","mu":0,"sigma":1}},{"probability":0.3,"poisson_rate":3,"severity":{"family":"lognormal","mu":0,"sigma":1}}],"firms":50,"paths":100,"reps_per_path":10,"hedges":[{"name":"factor","price":-2.5,"payoff":[-1.6487212707001282,-4.946163812100385]}],"risk_measure":{"type":"avar","lambda":0.05}})"},
        {"price-systemic",
         R"({"kind":"price-systemic","seed":3,"customers":2,"losses":{"type":"binary","amounts":[100,50],"probabilities":[0.2,0.3],"replications":200,"sampling":"stratified"},"acceptance":{"net_assets":{"type":"avar","lambda":0.25},"cyber_result":{"type":"expectation"}},"grid":{"step":5,"upper":120},"criterion":{"type":"weighted","weights":[2,1]}})"}};
    return configs;
}

Verdict determinism()
{
    const auto dir = std::filesystem::temp_directory_path() / "cyberrisk_acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::size_t same = 0;
    std::string bad;
    for (const auto& [kind, text] : scenario_configs()) {
        const auto cfg = dir / (kind + ".json");
        std::ofstream(cfg) << text;
        std::vector<std::string> bodies;
        for (unsigned threads : {1u, 1u, 8u}) {
            cli::RunOptions o;
            o.threads = threads;
            o.out = dir / (kind + "_" + std::to_string(bodies.size()));
            std::ostringstream err;
            if (cli::run_scenario(cfg, o, err) != 0) {
                bad += " " + kind + " failed: " + err.str();
                break;
            }
            std::string all;
            for (const auto& e : std::filesystem::directory_iterator(o.out))
                if (e.path().extension() == ".csv") all += e.path().filename().string() + "\n" + read(e.path());
            bodies.push_back(all);
        }
        if (bodies.size() == 3 && bodies[0] == bodies[1] && bodies[0] == bodies[2] && !bodies[0].empty())
            ++same;
        else if (bad.find(kind) == std::string::npos)
            bad += " " + kind;
    }
    set_thread_count(0);
    std::filesystem::remove_all(dir);
    return {same == scenario_configs().size(), std::to_string(same) + "/" + std::to_string(scenario_configs().size()) +
                                                   " scenario kinds byte-identical across reruns and 1 vs 8 threads" +
                                                   (bad.empty() ? "" : ";" + bad)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"master-equation oracle agreement", master_agreement},
        {"closure sandwich", closure_sandwich},
        {"tree exactness", tree_exactness},
        {"epsilon-SIS reduction", epsilon_sis_reduction},
        {"Wald agreement", wald_agreement},
        {"Hawkes stationary mean", hawkes_rate},
        {"copula checks", copula_checks},
        {"risk-measure axioms", risk_measure_axioms},
        {"decomposition", decomposition},
        {"systematic pricing", systematic_pricing},
        {"systemic search", systemic_search},
        {"game", game_checks},
        {"population SIR", population_checks},
        {"determinism", determinism}};
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!v.pass) ++failed;
        std::printf("[%s] %2zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
