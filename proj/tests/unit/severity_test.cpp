#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cyber/core/errors.hpp"
#include "cyber/core/stats.hpp"
#include "cyber/severity/distribution.hpp"

using namespace cyber;
using severity::Distribution;

TEST(Severity, QuantileInvertsCdf)
{
    const std::vector<Distribution> ds{Distribution::lognormal(0.5, 1.2), Distribution::gamma(2.0, 3.0),
                                       Distribution::pert(1.0, 2.0, 10.0), Distribution::gpd(0.4, 2.0, 1.0),
                                       Distribution::beta(2.0, 5.0), Distribution::truncated_normal(-1.0, 2.0),
                                       Distribution::exponential(0.3)};
    for (const auto& d : ds)
        for (double u : {0.01, 0.3, 0.5, 0.9, 0.999}) EXPECT_NEAR(d.cdf(d.quantile(u)), u, 1e-9) << d.name();
}

TEST(Severity, GpdZeroShapeIsExponential)
{
    const auto s = severity::sample_severity(Distribution::gpd(0.0, 1.0), 1000000, SeedStream(1));
    EXPECT_NEAR(stats::mean(s), 1.0, 0.01);
}

TEST(Severity, GpdHeavyTailHasInfiniteMean)
{
    const auto d = Distribution::gpd(1.2, 1.0);
    EXPECT_FALSE(d.finite_mean());
    EXPECT_TRUE(std::isinf(d.mean()));
}

TEST(Severity, SingleDrawIsDeterministic)
{
    const auto d = Distribution::lognormal(0.0, 1.0);
    EXPECT_EQ(severity::sample_severity(d, 1, SeedStream(8)), severity::sample_severity(d, 1, SeedStream(8)));
}

TEST(Severity, KernelSilvermanIntegratesToOne)
{
    const auto d = Distribution::kernel({1.0, 2.0, 2.5, 4.0, 7.0});
    double acc = 0.0;
    for (int k = 0; k < 200000; ++k) acc += d.pdf((k + 0.5) * 1e-4) * 1e-4;
    EXPECT_NEAR(acc, 1.0, 1e-6);
}

TEST(Severity, InvalidParametersRejected)
{
    EXPECT_THROW(Distribution::lognormal(0.0, -1.0), ValidationError);
    EXPECT_THROW(Distribution::pert(3.0, 2.0, 1.0), ValidationError);
    EXPECT_THROW(Distribution::beta(0.0, 1.0), ValidationError);
}

TEST(Composite, SameExponentialNeedsNoRescaling)
{
    const auto e = Distribution::exponential(0.7);
    const auto n = severity::solve_composite_normalizers(e, e, 1.3);
    EXPECT_NEAR(n.c1, 1.0, 1e-12);
    EXPECT_NEAR(n.c2, 1.0, 1e-12);
}

TEST(Composite, LognormalGpdDensityIntegratesToOne)
{
    const auto c = Distribution::composite(Distribution::lognormal(0.0, 1.0), Distribution::gpd(0.5, 1.0, 2.0), 2.0);
    // Substitution x = e^y on [1e-12, 1e6].
    double acc = 0.0;
    const double lo = std::log(1e-12), hi = std::log(1e6);
    const int n = 400000;
    for (int k = 0; k < n; ++k) {
        const double y = lo + (k + 0.5) * (hi - lo) / n;
        acc += c.pdf(std::exp(y)) * std::exp(y) * (hi - lo) / n;
    }
    EXPECT_NEAR(acc, 1.0, 1e-6);
    EXPECT_NEAR(c.cdf(c.quantile(0.42)), 0.42, 1e-9);
}

TEST(Composite, ZeroBodyDensityAtThresholdFails)
{
    EXPECT_THROW(
        severity::solve_composite_normalizers(Distribution::pert(0.0, 0.5, 1.0), Distribution::gpd(0.2, 1.0, 1.0), 1.0),
        ValidationError);
}

TEST(Composite, BodyMassMatchesSampleFraction)
{
    const auto body = Distribution::exponential(1.0);
    const auto tail = Distribution::gpd(0.3, 1.0, 2.0);
    const auto c = Distribution::composite(body, tail, 2.0);
    const double mass = c.cdf(2.0);
    const auto s = severity::sample_severity(c, 1000000, SeedStream(3));
    const double frac =
        static_cast<double>(std::count_if(s.begin(), s.end(), [](double v) { return v <= 2.0; })) / s.size();
    EXPECT_NEAR(frac, mass, 3.0 * std::sqrt(mass * (1 - mass) / s.size()) + 1e-4);
}
