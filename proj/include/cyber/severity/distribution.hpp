#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cyber/core/random.hpp"

namespace cyber::severity {

class Distribution;

struct Lognormal {
    double mu = 0.0;
    double sigma = 1.0;
};
struct Gamma {
    double shape = 1.0;
    double scale = 1.0;
};
/// Scaled Beta on [min, max] with shapes 1 + 4 (mode - min) / (max - min)
/// and 1 + 4 (max - mode) / (max - min).
struct Pert {
    double min = 0.0;
    double mode = 0.5;
    double max = 1.0;
};
/// Generalized Pareto above loc. xi == 0 is the shifted exponential.
struct Gpd {
    double xi = 0.0;
    double sigma = 1.0;
    double loc = 0.0;
};
struct BetaDist {
    double a = 1.0;
    double b = 1.0;
};
/// Gaussian kernel estimate reflected at zero.
struct KernelDensity {
    std::vector<double> data;
    double bandwidth = 0.0;
};
/// Normal(mu, sigma) conditioned on [0, inf).
struct TruncatedNormal {
    double mu = 0.0;
    double sigma = 1.0;
};
struct Exponential {
    double rate = 1.0;
};
struct Degenerate {
    double value = 0.0;
};
/// Body below the threshold, tail above it:
/// f(x) = c1 f_body(x) on [0, theta), c2 f_tail(x) on [theta, inf).
struct Composite {
    std::shared_ptr<const Distribution> body;
    std::shared_ptr<const Distribution> tail;
    double threshold = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
};

struct Normalizers {
    double c1 = 1.0;
    double c2 = 1.0;
};

/// Solves c1 F_body(theta) + c2 (1 - F_tail(theta)) = 1 and
/// c1 f_body(theta) = c2 f_tail(theta).
Normalizers solve_composite_normalizers(const Distribution& body, const Distribution& tail, double threshold);

/// Claim-size (or loss-fraction) distribution. Immutable; all members pure.
class Distribution {
public:
    using Family = std::variant<Lognormal, Gamma, Pert, Gpd, BetaDist, KernelDensity, TruncatedNormal, Exponential,
                                Degenerate, Composite>;

    static Distribution lognormal(double mu, double sigma);
    static Distribution gamma(double shape, double scale);
    static Distribution pert(double min, double mode, double max);
    static Distribution gpd(double xi, double sigma, double loc = 0.0);
    static Distribution beta(double a, double b);
    /// Bandwidth <= 0 selects Silverman's rule.
    static Distribution kernel(std::vector<double> data, double bandwidth = 0.0);
    static Distribution truncated_normal(double mu, double sigma);
    static Distribution exponential(double rate);
    static Distribution degenerate(double value);
    static Distribution composite(const Distribution& body, const Distribution& tail, double threshold);

    double pdf(double x) const;
    double cdf(double x) const;
    /// u in (0, 1).
    double quantile(double u) const;
    double sample(Rng& rng) const;

    /// Infinite when the mean does not exist (GPD with xi >= 1).
    double mean() const;
    double variance() const;
    bool finite_mean() const;

    double support_lower() const;
    double support_upper() const;

    std::string name() const;
    const Family& family() const { return family_; }

private:
    explicit Distribution(Family f) : family_(std::move(f)) {}
    Family family_;
};

std::vector<double> sample_severity(const Distribution& dist, std::size_t n, const SeedStream& seed);

}  // namespace cyber::severity
