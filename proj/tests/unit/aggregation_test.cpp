#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cyber/aggregation/collective.hpp"
#include "cyber/core/errors.hpp"
#include "cyber/core/portfolio.hpp"
#include "cyber/core/stats.hpp"

using namespace cyber;
using namespace cyber::aggregation;
using frequency::IntensityFunction;
using severity::Distribution;

TEST(Wald, Moments)
{
    const auto w = wald_moments(2.0, 2.0, 3.0, 4.0);
    EXPECT_DOUBLE_EQ(w.mean, 6.0);
    EXPECT_DOUBLE_EQ(w.variance, 26.0);
    EXPECT_DOUBLE_EQ(wald_moments(0.0, 0.0, 3.0, 4.0).variance, 0.0);
    EXPECT_DOUBLE_EQ(wald_moments(4.0, 0.0, 2.5, 0.0).mean, 10.0);
    EXPECT_DOUBLE_EQ(wald_moments(4.0, 0.0, 2.5, 0.0).variance, 0.0);
    EXPECT_THROW(wald_moments(1.0, -1.0, 1.0, 1.0), ValidationError);
}

TEST(Collective, DegenerateSeverityMean)
{
    CollectiveModel m{PoissonArrivals{IntensityFunction::constant(2.0)}, Distribution::degenerate(3.0), {}};
    const auto s = simulate_total(m, 1.0, 100000, SeedStream(1)).values;
    EXPECT_NEAR(stats::mean(s), 6.0, 3.0 * std::sqrt(18.0 / 1e5));
    EXPECT_NEAR(stats::variance(s), 18.0, 0.05 * 18.0);
}

TEST(Collective, ZeroIntensityIsZero)
{
    CollectiveModel m{PoissonArrivals{IntensityFunction::constant(0.0)}, Distribution::exponential(1.0), {}};
    for (double v : simulate_total(m, 1.0, 1000, SeedStream(2)).values) EXPECT_EQ(v, 0.0);
}

TEST(Collective, CouplingRequiresPoisson)
{
    frequency::FactorModel f;
    f.dynamics = frequency::MeanReverting{{1.0}, {1.0}, {0.1}, {1.0}, 0.01};
    CollectiveModel m{CoxArrivals{f, 1.0}, Distribution::exponential(1.0), Coupling{2.0}};
    EXPECT_THROW(validate(m), ValidationError);
}

TEST(LossSample, CsvAndJsonRoundTrip)
{
    LossSample s;
    s.values = {0.0, 1.5, 1.0 / 3.0};
    s.label = "x";
    std::stringstream io;
    write_csv(s, io);
    EXPECT_EQ(read_csv(io).values, s.values);
    EXPECT_EQ(from_json(to_json(s)).values, s.values);
}

TEST(Portfolio, SingleModuleTotalEqualsModule)
{
    PortfolioConfig c;
    c.categories = {"breach"};
    c.groups = {{"a", {}, 1}};
    const auto p = build_portfolio(c);
    CollectiveModel m{PoissonArrivals{IntensityFunction::constant(1.5)}, Distribution::lognormal(0.0, 1.0), {}};
    const auto r = portfolio_total(p, {m}, std::nullopt, 1.0, 500, SeedStream(3));
    EXPECT_EQ(r.total.values, r.modules[0].values);
}

TEST(Portfolio, MissingModuleModelRejected)
{
    PortfolioConfig c;
    c.categories = {"breach", "outage"};
    c.groups = {{"a", {}, 1}};
    const auto p = build_portfolio(c);
    CollectiveModel m{PoissonArrivals{IntensityFunction::constant(1.0)}, Distribution::exponential(1.0), {}};
    EXPECT_THROW(portfolio_total(p, {m}, std::nullopt, 1.0, 10, SeedStream(4)), ValidationError);
}
