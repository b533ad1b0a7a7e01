#include "cyber/severity/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "cyber/core/errors.hpp"
#include "cyber/core/stats.hpp"

namespace cyber::severity {

namespace bm = boost::math;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bm::beta_distribution<> pert_beta(const Pert& p)
{
    const double range = p.max - p.min;
    return bm::beta_distribution<>(1.0 + 4.0 * (p.mode - p.min) / range, 1.0 + 4.0 * (p.max - p.mode) / range);
}

double gpd_z(const Gpd& g, double x) { return (x - g.loc) / g.sigma; }

double gpd_survival(const Gpd& g, double x)
{
    if (x <= g.loc) return 1.0;
    const double z = gpd_z(g, x);
    if (g.xi == 0.0) return std::exp(-z);
    const double t = 1.0 + g.xi * z;
    if (t <= 0.0) return 0.0;
    return std::exp(-std::log1p(g.xi * z) / g.xi);
}

double gpd_upper(const Gpd& g) { return g.xi < 0.0 ? g.loc - g.sigma / g.xi : kInf; }

const bm::normal_distribution<> standard_normal;

double kernel_cdf(const KernelDensity& k, double x)
{
    if (x <= 0.0) return 0.0;
    double acc = 0.0;
    for (double d : k.data)
        acc += bm::cdf(standard_normal, (x - d) / k.bandwidth) - bm::cdf(standard_normal, (-x - d) / k.bandwidth);
    return acc / static_cast<double>(k.data.size());
}

double kernel_pdf(const KernelDensity& k, double x)
{
    if (x < 0.0) return 0.0;
    double acc = 0.0;
    for (double d : k.data)
        acc += bm::pdf(standard_normal, (x - d) / k.bandwidth) + bm::pdf(standard_normal, (x + d) / k.bandwidth);
    return acc / (static_cast<double>(k.data.size()) * k.bandwidth);
}

// Mean and second moment of body mass on [0, theta) (unnormalized by c1).
std::pair<double, double> partial_body_moments(const Distribution& body, double theta)
{
    auto first = [&](double x) { return x * body.pdf(x); };
    auto second = [&](double x) { return x * x * body.pdf(x); };
    using Q = bm::quadrature::gauss_kronrod<double, 61>;
    return {Q::integrate(first, 0.0, theta, 15, 1e-13), Q::integrate(second, 0.0, theta, 15, 1e-13)};
}

// E[X 1{X > theta}] and E[X^2 1{X > theta}] for a GPD with loc <= theta.
std::pair<double, double> partial_tail_moments(const Gpd& g, double theta)
{
    const double s = gpd_survival(g, theta);
    const double sigma_excess = g.sigma + g.xi * (theta - g.loc);
    const double m1 = g.xi < 1.0 ? sigma_excess / (1.0 - g.xi) : kInf;
    const double m2 = g.xi < 0.5 ? 2.0 * sigma_excess * sigma_excess / ((1.0 - g.xi) * (1.0 - 2.0 * g.xi)) : kInf;
    return {s * (theta + m1), s * (theta * theta + 2.0 * theta * m1 + m2)};
}

std::pair<double, double> composite_moments(const Composite& c)
{
    const auto [b1, b2] = partial_body_moments(*c.body, c.threshold);
    const auto [t1, t2] = partial_tail_moments(std::get<Gpd>(c.tail->family()), c.threshold);
    return {c.c1 * b1 + c.c2 * t1, c.c1 * b2 + c.c2 * t2};
}

}  // namespace

Distribution Distribution::lognormal(double mu, double sigma)
{
    require(std::isfinite(mu) && sigma > 0.0, "lognormal: sigma > 0 required");
    return Distribution(Lognormal{mu, sigma});
}

Distribution Distribution::gamma(double shape, double scale)
{
    require(shape > 0.0 && scale > 0.0, "gamma: shape > 0 and scale > 0 required");
    return Distribution(Gamma{shape, scale});
}

Distribution Distribution::pert(double min, double mode, double max)
{
    require(min >= 0.0, "PERT: min >= 0 required for claim sizes");
    require(min < max && min <= mode && mode <= max, "PERT: min <= mode <= max and min < max required");
    return Distribution(Pert{min, mode, max});
}

Distribution Distribution::gpd(double xi, double sigma, double loc)
{
    require(std::isfinite(xi), "GPD: xi must be finite");
    require(sigma > 0.0, "GPD: scale > 0 required");
    require(loc >= 0.0, "GPD: loc >= 0 required for claim sizes");
    return Distribution(Gpd{xi, sigma, loc});
}

Distribution Distribution::beta(double a, double b)
{
    require(a > 0.0 && b > 0.0, "beta: a > 0 and b > 0 required");
    return Distribution(BetaDist{a, b});
}

Distribution Distribution::kernel(std::vector<double> data, double bandwidth)
{
    require(data.size() >= 2, "kernel: at least two observations required");
    for (double d : data) require(std::isfinite(d) && d >= 0.0, "kernel: observations must be finite and >= 0");
    if (bandwidth <= 0.0) {
        const double sd = std::sqrt(stats::variance(data));
        std::vector<double> sorted = data;
        std::sort(sorted.begin(), sorted.end());
        auto q = [&](double p) {
            const double pos = p * static_cast<double>(sorted.size() - 1);
            const auto lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
            return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
        };
        const double iqr = q(0.75) - q(0.25);
        double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
        bandwidth = 0.9 * spread * std::pow(static_cast<double>(data.size()), -0.2);
    }
    require(bandwidth > 0.0, "kernel: data has zero spread");
    return Distribution(KernelDensity{std::move(data), bandwidth});
}

Distribution Distribution::truncated_normal(double mu, double sigma)
{
    require(std::isfinite(mu) && sigma > 0.0, "truncated normal: sigma > 0 required");
    return Distribution(TruncatedNormal{mu, sigma});
}

Distribution Distribution::exponential(double rate)
{
    require(rate > 0.0, "exponential: rate > 0 required");
    return Distribution(Exponential{rate});
}

Distribution Distribution::degenerate(double value)
{
    require(std::isfinite(value) && value >= 0.0, "degenerate: value must be finite and >= 0");
    return Distribution(Degenerate{value});
}

Normalizers solve_composite_normalizers(const Distribution& body, const Distribution& tail, double threshold)
{
    require(threshold > 0.0, "composite: threshold > 0 required");
    const double fs = body.pdf(threshold);
    const double fl = tail.pdf(threshold);
    if (!(fs > 0.0) || !(fl > 0.0)) throw ValidationError("continuity unsolvable at threshold");
    const double ratio = fs / fl;
    const double tail_mass = 1.0 - tail.cdf(threshold);
    Normalizers n;
    n.c1 = 1.0 / (body.cdf(threshold) + ratio * tail_mass);
    n.c2 = n.c1 * ratio;
    return n;
}

Distribution Distribution::composite(const Distribution& body, const Distribution& tail, double threshold)
{
    require(std::holds_alternative<Gpd>(tail.family()), "composite: tail must be a GPD");
    require(!std::holds_alternative<Degenerate>(body.family()), "composite: body must have a density");
    require(std::get<Gpd>(tail.family()).loc <= threshold, "composite: tail location must not exceed threshold");
    const auto n = solve_composite_normalizers(body, tail, threshold);
    return Distribution(Composite{std::make_shared<const Distribution>(body), std::make_shared<const Distribution>(tail),
                                  threshold, n.c1, n.c2});
}

double Distribution::pdf(double x) const
{
    struct Pdf {
        double x;
        double operator()(const Lognormal& d) const
        {
            return x <= 0.0 ? 0.0 : bm::pdf(bm::lognormal_distribution<>(d.mu, d.sigma), x);
        }
        double operator()(const Gamma& d) const
        {
            return x < 0.0 ? 0.0 : bm::pdf(bm::gamma_distribution<>(d.shape, d.scale), x);
        }
        double operator()(const Pert& d) const
        {
            if (x < d.min || x > d.max) return 0.0;
            return bm::pdf(pert_beta(d), (x - d.min) / (d.max - d.min)) / (d.max - d.min);
        }
        double operator()(const Gpd& g) const
        {
            if (x < g.loc || x > gpd_upper(g)) return 0.0;
            const double z = gpd_z(g, x);
            if (g.xi == 0.0) return std::exp(-z) / g.sigma;
            const double t = 1.0 + g.xi * z;
            if (t <= 0.0) return 0.0;
            return std::exp((-1.0 / g.xi - 1.0) * std::log1p(g.xi * z)) / g.sigma;
        }
        double operator()(const BetaDist& d) const
        {
            return (x < 0.0 || x > 1.0) ? 0.0 : bm::pdf(bm::beta_distribution<>(d.a, d.b), x);
        }
        double operator()(const KernelDensity& k) const { return kernel_pdf(k, x); }
        double operator()(const TruncatedNormal& d) const
        {
            if (x < 0.0) return 0.0;
            const double mass = bm::cdf(bm::complement(standard_normal, -d.mu / d.sigma));
            return bm::pdf(standard_normal, (x - d.mu) / d.sigma) / (d.sigma * mass);
        }
        double operator()(const Exponential& d) const { return x < 0.0 ? 0.0 : d.rate * std::exp(-d.rate * x); }
        double operator()(const Degenerate&) const { return 0.0; }
        double operator()(const Composite& c) const
        {
            if (x < 0.0) return 0.0;
            return x < c.threshold ? c.c1 * c.body->pdf(x) : c.c2 * c.tail->pdf(x);
        }
    };
    return std::visit(Pdf{x}, family_);
}

double Distribution::cdf(double x) const
{
    struct Cdf {
        double x;
        double operator()(const Lognormal& d) const
        {
            return x <= 0.0 ? 0.0 : bm::cdf(bm::lognormal_distribution<>(d.mu, d.sigma), x);
        }
        double operator()(const Gamma& d) const
        {
            return x <= 0.0 ? 0.0 : bm::cdf(bm::gamma_distribution<>(d.shape, d.scale), x);
        }
        double operator()(const Pert& d) const
        {
            if (x <= d.min) return 0.0;
            if (x >= d.max) return 1.0;
            return bm::cdf(pert_beta(d), (x - d.min) / (d.max - d.min));
        }
        double operator()(const Gpd& g) const
        {
            if (x <= g.loc) return 0.0;
            if (x >= gpd_upper(g)) return 1.0;
            const double z = gpd_z(g, x);
            if (g.xi == 0.0) return -std::expm1(-z);
            return -std::expm1(-std::log1p(g.xi * z) / g.xi);
        }
        double operator()(const BetaDist& d) const
        {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return bm::cdf(bm::beta_distribution<>(d.a, d.b), x);
        }
        double operator()(const KernelDensity& k) const { return kernel_cdf(k, x); }
        double operator()(const TruncatedNormal& d) const
        {
            if (x <= 0.0) return 0.0;
            const double mass = bm::cdf(bm::complement(standard_normal, -d.mu / d.sigma));
            return 1.0 - bm::cdf(bm::complement(standard_normal, (x - d.mu) / d.sigma)) / mass;
        }
        double operator()(const Exponential& d) const { return x <= 0.0 ? 0.0 : -std::expm1(-d.rate * x); }
        double operator()(const Degenerate& d) const { return x < d.value ? 0.0 : 1.0; }
        double operator()(const Composite& c) const
        {
            if (x <= 0.0) return 0.0;
            if (x <= c.threshold) return c.c1 * c.body->cdf(x);
            return c.c1 * c.body->cdf(c.threshold) + c.c2 * (c.tail->cdf(x) - c.tail->cdf(c.threshold));
        }
    };
    return std::visit(Cdf{x}, family_);
}

double Distribution::quantile(double u) const
{
    require(u > 0.0 && u < 1.0, "quantile level must lie in (0, 1)");
    struct Quantile {
        double u;
        const Distribution& self;
        double operator()(const Lognormal& d) const { return bm::quantile(bm::lognormal_distribution<>(d.mu, d.sigma), u); }
        double operator()(const Gamma& d) const { return bm::quantile(bm::gamma_distribution<>(d.shape, d.scale), u); }
        double operator()(const Pert& d) const { return d.min + (d.max - d.min) * bm::quantile(pert_beta(d), u); }
        double operator()(const Gpd& g) const
        {
            const double l = std::log1p(-u);
            if (g.xi == 0.0) return g.loc - g.sigma * l;
            return g.loc + g.sigma * std::expm1(-g.xi * l) / g.xi;
        }
        double operator()(const BetaDist& d) const { return bm::quantile(bm::beta_distribution<>(d.a, d.b), u); }
        double operator()(const KernelDensity& k) const
        {
            const double hi0 = *std::max_element(k.data.begin(), k.data.end()) + 40.0 * k.bandwidth;
            auto f = [&](double x) { return kernel_cdf(k, x) - u; };
            std::uintmax_t iters = 200;
            const auto r = bm::tools::toms748_solve(f, 0.0, hi0, -u, 1.0 - u, bm::tools::eps_tolerance<double>(52), iters);
            return 0.5 * (r.first + r.second);
        }
        double operator()(const TruncatedNormal& d) const
        {
            const double mass = bm::cdf(bm::complement(standard_normal, -d.mu / d.sigma));
            return std::max(0.0, d.mu + d.sigma * bm::quantile(bm::complement(standard_normal, (1.0 - u) * mass)));
        }
        double operator()(const Exponential& d) const { return -std::log1p(-u) / d.rate; }
        double operator()(const Degenerate& d) const { return d.value; }
        double operator()(const Composite& c) const
        {
            const double body_mass = c.c1 * c.body->cdf(c.threshold);
            if (u <= body_mass) return c.body->quantile(std::clamp(u / c.c1, 1e-300, 1.0 - 1e-16));
            const double level = c.tail->cdf(c.threshold) + (u - body_mass) / c.c2;
            return std::max(c.threshold, c.tail->quantile(std::min(level, 1.0 - 1e-16)));
        }
    };
    return std::visit(Quantile{u, *this}, family_);
}

double Distribution::sample(Rng& rng) const
{
    if (const auto* d = std::get_if<Lognormal>(&family_)) return std::exp(d->mu + d->sigma * rng.normal());
    if (const auto* d = std::get_if<Exponential>(&family_)) return rng.exponential(d->rate);
    if (const auto* d = std::get_if<Degenerate>(&family_)) return d->value;
    if (const auto* k = std::get_if<KernelDensity>(&family_)) {
        const auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k->data.size()));
        return std::abs(k->data[std::min(i, k->data.size() - 1)] + k->bandwidth * rng.normal());
    }
    if (const auto* c = std::get_if<Composite>(&family_)) {
        const double body_mass = c->c1 * c->body->cdf(c->threshold);
        const double pick = rng.uniform();
        const double v = rng.uniform();
        if (pick < body_mass) return c->body->quantile(v * c->body->cdf(c->threshold));
        const double lo = c->tail->cdf(c->threshold);
        return std::max(c->threshold, c->tail->quantile(lo + v * (1.0 - lo)));
    }
    return quantile(rng.uniform());
}

bool Distribution::finite_mean() const { return std::isfinite(mean()); }

double Distribution::mean() const
{
    struct Mean {
        double operator()(const Lognormal& d) const { return std::exp(d.mu + 0.5 * d.sigma * d.sigma); }
        double operator()(const Gamma& d) const { return d.shape * d.scale; }
        double operator()(const Pert& d) const { return (d.min + 4.0 * d.mode + d.max) / 6.0; }
        double operator()(const Gpd& g) const { return g.xi < 1.0 ? g.loc + g.sigma / (1.0 - g.xi) : kInf; }
        double operator()(const BetaDist& d) const { return d.a / (d.a + d.b); }
        double operator()(const KernelDensity& k) const
        {
            double acc = 0.0;
            for (double d : k.data) {
                const double z = d / k.bandwidth;
                acc += k.bandwidth * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z) +
                       d * (1.0 - 2.0 * bm::cdf(standard_normal, -z));
            }
            return acc / static_cast<double>(k.data.size());
        }
        double operator()(const TruncatedNormal& d) const
        {
            const double a = -d.mu / d.sigma;
            return d.mu + d.sigma * bm::pdf(standard_normal, a) / bm::cdf(bm::complement(standard_normal, a));
        }
        double operator()(const Exponential& d) const { return 1.0 / d.rate; }
        double operator()(const Degenerate& d) const { return d.value; }
        double operator()(const Composite& c) const { return composite_moments(c).first; }
    };
    return std::visit(Mean{}, family_);
}

double Distribution::variance() const
{
    struct Var {
        double operator()(const Lognormal& d) const
        {
            const double s2 = d.sigma * d.sigma;
            return std::expm1(s2) * std::exp(2.0 * d.mu + s2);
        }
        double operator()(const Gamma& d) const { return d.shape * d.scale * d.scale; }
        double operator()(const Pert& d) const
        {
            const double r = d.max - d.min;
            return bm::variance(pert_beta(d)) * r * r;
        }
        double operator()(const Gpd& g) const
        {
            return g.xi < 0.5 ? g.sigma * g.sigma / ((1.0 - g.xi) * (1.0 - g.xi) * (1.0 - 2.0 * g.xi)) : kInf;
        }
        double operator()(const BetaDist& d) const { return bm::variance(bm::beta_distribution<>(d.a, d.b)); }
        double operator()(const KernelDensity& k) const
        {
            double m2 = 0.0;
            for (double d : k.data) m2 += d * d + k.bandwidth * k.bandwidth;
            m2 /= static_cast<double>(k.data.size());
            const double m = Distribution::kernel(k.data, k.bandwidth).mean();
            return m2 - m * m;
        }
        double operator()(const TruncatedNormal& d) const
        {
            const double a = -d.mu / d.sigma;
            const double h = bm::pdf(standard_normal, a) / bm::cdf(bm::complement(standard_normal, a));
            return d.sigma * d.sigma * (1.0 + a * h - h * h);
        }
        double operator()(const Exponential& d) const { return 1.0 / (d.rate * d.rate); }
        double operator()(const Degenerate&) const { return 0.0; }
        double operator()(const Composite& c) const
        {
            const auto [m1, m2] = composite_moments(c);
            return m2 - m1 * m1;
        }
    };
    return std::visit(Var{}, family_);
}

double Distribution::support_lower() const
{
    if (const auto* p = std::get_if<Pert>(&family_)) return p->min;
    if (const auto* g = std::get_if<Gpd>(&family_)) return g->loc;
    if (const auto* d = std::get_if<Degenerate>(&family_)) return d->value;
    return 0.0;
}

double Distribution::support_upper() const
{
    if (const auto* p = std::get_if<Pert>(&family_)) return p->max;
    if (const auto* g = std::get_if<Gpd>(&family_)) return gpd_upper(*g);
    if (std::holds_alternative<BetaDist>(family_)) return 1.0;
    if (const auto* d = std::get_if<Degenerate>(&family_)) return d->value;
    if (const auto* c = std::get_if<Composite>(&family_)) return c->tail->support_upper();
    return kInf;
}

std::string Distribution::name() const
{
    static constexpr const char* names[] = {"lognormal", "gamma", "pert", "gpd", "beta",
                                            "kernel", "truncated-normal", "exponential", "degenerate", "composite"};
    return names[family_.index()];
}

std::vector<double> sample_severity(const Distribution& dist, std::size_t n, const SeedStream& seed)
{
    require(n >= 1, "sample_severity: n >= 1 required");
    Rng rng = seed.rng();
    std::vector<double> out(n);
    for (auto& v : out) v = dist.sample(rng);
    return out;
}

}  // namespace cyber::severity
