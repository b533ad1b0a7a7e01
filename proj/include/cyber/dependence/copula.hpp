#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cyber/core/random.hpp"
#include "cyber/severity/distribution.hpp"

namespace cyber::dependence {

struct GaussianCopula {
    Eigen::MatrixXd corr;
    Eigen::MatrixXd factor;  // factor * factor^T == corr
};
struct StudentTCopula {
    double nu = 4.0;
    Eigen::MatrixXd corr;
    Eigen::MatrixXd factor;
};
struct GumbelCopula {
    double theta = 1.0;
    std::size_t dim = 2;
};
struct ClaytonCopula {
    double theta = 1.0;
    std::size_t dim = 2;
};
struct IndependenceCopula {
    std::size_t dim = 2;
};

/// Rows are draws, columns are coordinates.
using Points = std::vector<std::vector<double>>;

class Copula {
public:
    using Kind = std::variant<GaussianCopula, StudentTCopula, GumbelCopula, ClaytonCopula, IndependenceCopula>;

    static Copula gaussian(Eigen::MatrixXd corr);
    static Copula student_t(double nu, Eigen::MatrixXd corr);
    static Copula gumbel(double theta, std::size_t dim = 2);
    static Copula clayton(double theta, std::size_t dim = 2);
    static Copula independence(std::size_t dim);

    std::size_t dimension() const;
    const Kind& kind() const { return kind_; }

    /// Gaussian and t copulas are integrated numerically: adaptive
    /// quadrature in dimension 2, tensor Gauss-Legendre up to dimension 5
    /// and a randomized lattice rule up to dimension 10.
    double cdf(const std::vector<double>& u) const;
    std::vector<double> sample(Rng& rng) const;

private:
    explicit Copula(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

/// Equicorrelation matrix of dimension d with off-diagonal rho.
Eigen::MatrixXd equicorrelation(std::size_t d, double rho);

double copula_cdf(const Copula& c, const std::vector<double>& u);
Points sample_copula(const Copula& c, std::size_t n, const SeedStream& seed);

/// Multivariate normal orthant-type probability P(X <= b) for X ~ N(0, corr).
/// Infinite upper limits are allowed.
double mvn_cdf(const std::vector<double>& b, const Eigen::MatrixXd& corr);

struct JointModel {
    Copula copula;
    std::vector<severity::Distribution> marginals;
};

/// Sklar assembly: coordinate j is the j-th marginal quantile of the j-th
/// copula coordinate.
Points sample_joint(const JointModel& model, std::size_t n, const SeedStream& seed);

/// Claim-count law used by the frequency-severity coupling.
class CountDistribution {
public:
    static CountDistribution poisson(double mean);
    /// Probabilities of 0, 1, ..., K; must sum to one.
    static CountDistribution pmf(std::vector<double> probabilities);

    /// Smallest k with P(N <= k) >= u.
    long quantile(double u) const;
    double mean() const;
    double variance() const;

private:
    double poisson_mean_ = -1.0;
    std::vector<double> cumulative_;
};

struct PeriodDraw {
    long count = 0;
    double scale = 0.0;
    std::vector<double> sizes;
};

/// Per period: (u1, u2) from a bivariate Gumbel copula; count is the count
/// quantile of u1, the period's severity scale is the severity quantile of
/// u2, and each of the count claims is scale times an independent draw of
/// unit_claim (a unit-mean law, degenerate at 1 by default).
std::vector<PeriodDraw> coupled_frequency_severity(const CountDistribution& counts,
                                                   const severity::Distribution& scale, double theta,
                                                   std::size_t n_periods, const SeedStream& seed,
                                                   const severity::Distribution& unit_claim =
                                                       severity::Distribution::degenerate(1.0));

}  // namespace cyber::dependence
