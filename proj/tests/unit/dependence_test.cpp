#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "cyber/core/errors.hpp"
#include "cyber/core/stats.hpp"
#include "cyber/dependence/copula.hpp"

using namespace cyber;
using namespace cyber::dependence;

namespace {

std::vector<double> column(const Points& p, std::size_t j)
{
    std::vector<double> c(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) c[k] = p[k][j];
    return c;
}

}  // namespace

TEST(Copula, IdentityGaussianIsProduct)
{
    EXPECT_NEAR(copula_cdf(Copula::gaussian(Eigen::MatrixXd::Identity(2, 2)), {0.3, 0.7}), 0.21, 1e-9);
}

TEST(Copula, GumbelOneIsProduct)
{
    EXPECT_NEAR(copula_cdf(Copula::gumbel(1.0, 3), {0.2, 0.5, 0.9}), 0.09, 1e-12);
}

TEST(Copula, GroundedMargins)
{
    for (const auto& c : {Copula::gumbel(2.0), Copula::clayton(1.5), Copula::gaussian(equicorrelation(2, 0.4)),
                          Copula::student_t(3.0, equicorrelation(2, 0.4))})
        EXPECT_EQ(copula_cdf(c, {0.0, 0.6}), 0.0);
}

TEST(Copula, GumbelBelowOneRejected)
{
    try {
        Copula::gumbel(0.5);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("θ ≥ 1 required"), std::string::npos);
    }
}

TEST(Copula, GaussianCorrelationRecovered)
{
    const auto p = sample_copula(Copula::gaussian(equicorrelation(2, 0.8)), 100000, SeedStream(1));
    boost::math::normal n;
    auto a = column(p, 0), b = column(p, 1);
    for (auto& v : a) v = boost::math::quantile(n, v);
    for (auto& v : b) v = boost::math::quantile(n, v);
    EXPECT_NEAR(stats::pearson(a, b), 0.8, 0.01);
}

TEST(Copula, IndependenceHasZeroTau)
{
    const auto p = sample_copula(Copula::independence(2), 100000, SeedStream(2));
    EXPECT_NEAR(stats::kendall_tau(column(p, 0), column(p, 1)), 0.0, 0.01);
}

TEST(Copula, GumbelTauMatchesCdfIntegral)
{
    // tau = 4 E[C(U,V)] - 1, estimated from the sample and the closed form.
    const auto c = Copula::gumbel(2.0);
    const auto p = sample_copula(c, 20000, SeedStream(3));
    double acc = 0.0;
    for (const auto& u : p) acc += copula_cdf(c, u);
    EXPECT_NEAR(4.0 * acc / p.size() - 1.0, 0.5, 0.02);
}

TEST(Copula, GumbelUpperTailDependence)
{
    std::size_t both = 0, first = 0;
    for (std::uint64_t chunk = 0; chunk < 10; ++chunk)
        for (const auto& u : sample_copula(Copula::gumbel(2.0), 1000000, SeedStream(4).child(chunk)))
            if (u[0] > 0.99) {
                ++first;
                both += u[1] > 0.99;
            }
    EXPECT_NEAR(static_cast<double>(both) / first, 2.0 - std::sqrt(2.0), 0.02);
}

TEST(Joint, IndependentExponentialsUncorrelated)
{
    const JointModel m{Copula::independence(2),
                       {severity::Distribution::exponential(1.0), severity::Distribution::exponential(1.0)}};
    const auto p = sample_joint(m, 100000, SeedStream(5));
    EXPECT_NEAR(stats::pearson(column(p, 0), column(p, 1)), 0.0, 0.01);
}

TEST(Joint, StrongGumbelIsNearlyComonotone)
{
    const auto e = severity::Distribution::exponential(1.0);
    const auto p = sample_joint({Copula::gumbel(50.0), {e, e}}, 20000, SeedStream(6));
    std::size_t close = 0;
    for (const auto& x : p) close += std::abs(x[0] - x[1]) <= 0.1 * (1.0 + x[0]);
    EXPECT_GE(static_cast<double>(close) / p.size(), 0.99);
}

TEST(Coupling, IndependentAtThetaOne)
{
    const auto d = coupled_frequency_severity(CountDistribution::poisson(3.0), severity::Distribution::lognormal(0.0, 0.5),
                                              1.0, 100000, SeedStream(7));
    std::vector<double> n, s;
    for (const auto& p : d) {
        n.push_back(static_cast<double>(p.count));
        s.push_back(p.scale);
    }
    EXPECT_NEAR(stats::pearson(n, s), 0.0, 0.01);
}

TEST(Coupling, StrongDependenceAtThetaThree)
{
    const auto d = coupled_frequency_severity(CountDistribution::poisson(20.0),
                                              severity::Distribution::lognormal(0.0, 0.5), 3.0, 20000, SeedStream(8));
    std::vector<double> n, s;
    for (const auto& p : d) {
        n.push_back(static_cast<double>(p.count));
        s.push_back(p.scale);
    }
    EXPECT_GT(stats::spearman(n, s), 0.7);
}

TEST(Mvn, BivariateOrthantClosedForm)
{
    // P(X <= 0, Y <= 0) = 1/4 + asin(rho) / (2 pi).
    const double rho = 0.6;
    Eigen::MatrixXd c(2, 2);
    c << 1.0, rho, rho, 1.0;
    EXPECT_NEAR(mvn_cdf({0.0, 0.0}, c), 0.25 + std::asin(rho) / (2.0 * M_PI), 1e-8);
}
