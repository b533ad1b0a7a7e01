#include "cyber/frequency/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cyber/core/errors.hpp"
#include "cyber/core/portfolio.hpp"

namespace cyber::frequency {

namespace {

void check_grid(const std::vector<double>& times, const std::vector<double>& values, const char* what)
{
    require(!times.empty(), std::string(what) + ": empty grid");
    require(times.size() == values.size(), std::string(what) + ": grid and values differ in length");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1], std::string(what) + ": grid must be strictly increasing");
    for (double v : values) require(std::isfinite(v), std::string(what) + ": non-finite value");
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double t)
{
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return y[j - 1] + w * (y[j] - y[j - 1]);
}

// Calls piece(a, b, ya, yb) for each linear piece of the interpolant on [s, t].
template <class Piece>
void for_each_piece(const std::vector<double>& x, const std::vector<double>& y, double s, double t, Piece&& piece)
{
    double a = s;
    double ya = interpolate(x, y, s);
    auto it = std::upper_bound(x.begin(), x.end(), s);
    for (; it != x.end() && *it < t; ++it) {
        const double b = *it;
        const double yb = y[static_cast<std::size_t>(it - x.begin())];
        piece(a, b, ya, yb);
        a = b;
        ya = yb;
    }
    piece(a, t, ya, interpolate(x, y, t));
}

double max_on(const std::vector<double>& x, const std::vector<double>& y, double s, double t)
{
    double m = std::max(interpolate(x, y, s), interpolate(x, y, t));
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > s && x[i] < t) m = std::max(m, y[i]);
    return m;
}

}  // namespace

IntensityFunction IntensityFunction::constant(double rate)
{
    require(std::isfinite(rate) && rate >= 0.0, "intensity must be finite and nonnegative");
    return IntensityFunction(Constant{rate});
}

IntensityFunction IntensityFunction::piecewise_linear(std::vector<double> times, std::vector<double> values)
{
    check_grid(times, values, "piecewise-linear intensity");
    for (double v : values) require(v >= 0.0, "piecewise-linear intensity: negative value");
    return IntensityFunction(PiecewiseLinear{std::move(times), std::move(values)});
}

IntensityFunction IntensityFunction::gam(double f, std::vector<double> times, std::vector<double> g)
{
    require(std::isfinite(f), "GAM intensity: non-finite f");
    check_grid(times, g, "GAM intensity");
    return IntensityFunction(Gam{f, std::move(times), std::move(g)});
}

IntensityFunction IntensityFunction::weighted_sum(std::vector<std::pair<double, IntensityFunction>> terms)
{
    Sum sum;
    for (auto& [w, f] : terms) {
        require(std::isfinite(w) && w >= 0.0, "intensity sum: weights must be finite and nonnegative");
        sum.terms.emplace_back(w, std::make_shared<const IntensityFunction>(std::move(f)));
    }
    return IntensityFunction(std::move(sum));
}

double IntensityFunction::operator()(double t) const
{
    struct Eval {
        double t;
        double operator()(const Constant& c) const { return c.rate; }
        double operator()(const PiecewiseLinear& p) const { return interpolate(p.times, p.values, t); }
        double operator()(const Gam& g) const { return std::exp(g.f + interpolate(g.times, g.g, t)); }
        double operator()(const Sum& s) const
        {
            double acc = 0.0;
            for (const auto& [w, f] : s.terms) acc += w * (*f)(t);
            return acc;
        }
    };
    return std::visit(Eval{t}, form_);
}

double IntensityFunction::integral(double s, double t) const
{
    require(s <= t, "negative interval");
    if (s == t) return 0.0;
    struct Integrate {
        double s, t;
        double operator()(const Constant& c) const { return c.rate * (t - s); }
        double operator()(const PiecewiseLinear& p) const
        {
            double acc = 0.0;
            for_each_piece(p.times, p.values, s, t,
                           [&](double a, double b, double ya, double yb) { acc += 0.5 * (ya + yb) * (b - a); });
            return acc;
        }
        double operator()(const Gam& g) const
        {
            double acc = 0.0;
            for_each_piece(g.times, g.g, s, t, [&](double a, double b, double ya, double yb) {
                const double d = yb - ya;
                const double factor = std::abs(d) < 1e-12 ? 1.0 + 0.5 * d : std::expm1(d) / d;
                acc += (b - a) * std::exp(g.f + ya) * factor;
            });
            return acc;
        }
        double operator()(const Sum& sum) const
        {
            double acc = 0.0;
            for (const auto& [w, f] : sum.terms) acc += w * f->integral(s, t);
            return acc;
        }
    };
    return std::visit(Integrate{s, t}, form_);
}

double IntensityFunction::supremum(double s, double t) const
{
    require(s <= t, "negative interval");
    struct Sup {
        double s, t;
        double operator()(const Constant& c) const { return c.rate; }
        double operator()(const PiecewiseLinear& p) const { return max_on(p.times, p.values, s, t); }
        double operator()(const Gam& g) const { return std::exp(g.f + max_on(g.times, g.g, s, t)); }
        double operator()(const Sum& sum) const
        {
            double acc = 0.0;
            for (const auto& [w, f] : sum.terms) acc += w * f->supremum(s, t);
            return acc;
        }
    };
    return std::visit(Sup{s, t}, form_);
}

bool IntensityFunction::is_zero() const
{
    struct Zero {
        bool operator()(const Constant& c) const { return c.rate == 0.0; }
        bool operator()(const PiecewiseLinear& p) const
        {
            return std::all_of(p.values.begin(), p.values.end(), [](double v) { return v == 0.0; });
        }
        bool operator()(const Gam&) const { return false; }
        bool operator()(const Sum& s) const
        {
            return std::all_of(s.terms.begin(), s.terms.end(),
                               [](const auto& term) { return term.first == 0.0 || term.second->is_zero(); });
        }
    };
    return std::visit(Zero{}, form_);
}

double expected_count(const IntensityFunction& intensity, double s, double t)
{
    require(s >= 0.0 && s <= t, "negative interval");
    return intensity.integral(s, t);
}

AggregateIntensity aggregate_intensity(const Portfolio& portfolio,
                                       const std::vector<IntensityFunction>& module_intensities)
{
    require(module_intensities.size() == portfolio.module_count(),
            "missing module intensity: expected " + std::to_string(portfolio.module_count()) + ", got " +
                std::to_string(module_intensities.size()));
    AggregateIntensity out;
    const auto modules = portfolio.modules();
    std::vector<std::vector<std::pair<double, IntensityFunction>>> per_category(portfolio.category_count());
    for (std::size_t m = 0; m < modules.size(); ++m) {
        const double n = static_cast<double>(portfolio.groups()[modules[m].group].count);
        out.modules.push_back(IntensityFunction::weighted_sum({{n, module_intensities[m]}}));
        per_category[modules[m].category].emplace_back(n, module_intensities[m]);
    }
    for (auto& terms : per_category) out.categories.push_back(IntensityFunction::weighted_sum(std::move(terms)));
    return out;
}

}  // namespace cyber::frequency
