#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace cyber {
class Portfolio;
}

namespace cyber::frequency {

/// Deterministic, nonnegative, locally integrable rate lambda(t).
///
/// Grid-based forms are linear between knots and held constant outside the
/// first and last knot.
class IntensityFunction {
public:
    struct Constant {
        double rate = 0.0;
    };
    struct PiecewiseLinear {
        std::vector<double> times;
        std::vector<double> values;
    };
    /// exp(f + g(t)) with g tabulated piecewise-linearly.
    struct Gam {
        double f = 0.0;
        std::vector<double> times;
        std::vector<double> g;
    };
    struct Sum {
        std::vector<std::pair<double, std::shared_ptr<const IntensityFunction>>> terms;
    };

    IntensityFunction() : form_(Constant{}) {}

    static IntensityFunction constant(double rate);
    static IntensityFunction piecewise_linear(std::vector<double> times, std::vector<double> values);
    static IntensityFunction gam(double f, std::vector<double> times, std::vector<double> g);
    static IntensityFunction weighted_sum(std::vector<std::pair<double, IntensityFunction>> terms);

    double operator()(double t) const;
    /// Exact integral over [s, t].
    double integral(double s, double t) const;
    /// Upper bound of lambda on [s, t]; exact for every form except sums,
    /// where it is the sum of the term maxima.
    double supremum(double s, double t) const;

    bool is_zero() const;
    const auto& form() const { return form_; }

private:
    using Form = std::variant<Constant, PiecewiseLinear, Gam, Sum>;
    explicit IntensityFunction(Form f) : form_(std::move(f)) {}
    Form form_;
};

/// Integral of the intensity over [s, t].
double expected_count(const IntensityFunction& intensity, double s, double t);

struct AggregateIntensity {
    /// n_k * lambda^{(c,k)}, in portfolio module order.
    std::vector<IntensityFunction> modules;
    /// sum_k n_k * lambda^{(c,k)}, one per category.
    std::vector<IntensityFunction> categories;
};

AggregateIntensity aggregate_intensity(const Portfolio& portfolio,
                                       const std::vector<IntensityFunction>& module_intensities);

}  // namespace cyber::frequency
