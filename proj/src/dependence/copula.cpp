#include "cyber/dependence/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cyber/core/errors.hpp"
#include "cyber/core/parallel.hpp"

namespace cyber::dependence {

namespace bm = boost::math;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const bm::normal_distribution<> standard_normal;

double phi(double x)
{
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    return bm::cdf(standard_normal, x);
}

double phi_inv(double p)
{
    p = std::clamp(p, 1e-300, 1.0 - 1e-16);
    return bm::quantile(standard_normal, p);
}

void check_correlation(const Eigen::MatrixXd& corr)
{
    require(corr.rows() == corr.cols() && corr.rows() >= 1, "correlation matrix must be square and nonempty");
    const auto d = corr.rows();
    for (Eigen::Index i = 0; i < d; ++i) {
        require(std::abs(corr(i, i) - 1.0) < 1e-12, "correlation matrix must have unit diagonal");
        for (Eigen::Index j = 0; j < d; ++j) {
            require(std::isfinite(corr(i, j)) && std::abs(corr(i, j) - corr(j, i)) < 1e-12,
                    "correlation matrix must be symmetric");
            require(std::abs(corr(i, j)) <= 1.0, "correlation entries must lie in [-1, 1]");
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    require(eig.eigenvalues().minCoeff() >= -1e-10, "correlation matrix must be positive semidefinite");
}

// Symmetric square-root style factor; tolerates semidefinite input.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& corr)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

struct Rule {
    std::vector<double> nodes;  // on [0, 1]
    std::vector<double> weights;
};

// Gauss-Legendre via the Golub-Welsch eigenproblem, mapped to [0, 1].
Rule gauss_legendre(int m)
{
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        j(k, k - 1) = b;
        j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
    Rule r;
    for (int k = 0; k < m; ++k) {
        r.nodes.push_back(0.5 * (eig.eigenvalues()(k) + 1.0));
        const double v = eig.eigenvectors()(0, k);
        r.weights.push_back(v * v);
    }
    return r;
}

const Rule& cached_rule(int m)
{
    static const Rule r16 = gauss_legendre(16), r24 = gauss_legendre(24), r48 = gauss_legendre(48),
                      r64 = gauss_legendre(64);
    switch (m) {
    case 16: return r16;
    case 24: return r24;
    case 48: return r48;
    default: return r64;
    }
}

// Genz separation-of-variables integrand on [0,1]^{d-1}.
class SovIntegrand {
public:
    SovIntegrand(std::vector<double> b, const Eigen::MatrixXd& corr) : b_(std::move(b))
    {
        Eigen::LLT<Eigen::MatrixXd> llt(corr);
        if (llt.info() != Eigen::Success) {
            Eigen::MatrixXd ridge = corr + 1e-10 * Eigen::MatrixXd::Identity(corr.rows(), corr.cols());
            ridge /= (1.0 + 1e-10);
            llt.compute(ridge);
        }
        l_ = llt.matrixL();
        y_.resize(b_.size());
    }

    std::size_t dims() const { return b_.size() - 1; }

    double operator()(const double* w)
    {
        const std::size_t d = b_.size();
        double e = phi(b_[0] / l_(0, 0));
        double prod = e;
        for (std::size_t i = 1; i < d && prod > 0.0; ++i) {
            y_[i - 1] = phi_inv(w[i - 1] * e);
            double shift = 0.0;
            for (std::size_t j = 0; j < i; ++j) shift += l_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * y_[j];
            e = phi((b_[i] - shift) / l_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
            prod *= e;
        }
        return prod;
    }

private:
    std::vector<double> b_;
    Eigen::MatrixXd l_;
    std::vector<double> y_;
};

double tensor_rule(SovIntegrand& f, const Rule& rule)
{
    const std::size_t dims = f.dims();
    const std::size_t m = rule.nodes.size();
    std::vector<std::size_t> idx(dims, 0);
    std::vector<double> w(dims);
    double acc = 0.0;
    for (;;) {
        double weight = 1.0;
        for (std::size_t k = 0; k < dims; ++k) {
            w[k] = rule.nodes[idx[k]];
            weight *= rule.weights[idx[k]];
        }
        acc += weight * f(w.data());
        std::size_t k = 0;
        while (k < dims && ++idx[k] == m) idx[k++] = 0;
        if (k == dims) break;
    }
    return acc;
}

// Richtmyer lattice with a fixed set of shifts and the baker's transform.
double lattice_rule(SovIntegrand& f)
{
    static constexpr double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    const std::size_t dims = f.dims();
    constexpr std::size_t points = 1 << 14;
    constexpr int shifts = 8;
    Rng rng(0x5EED5EEDull);
    std::vector<double> w(dims), shift(dims);
    double acc = 0.0;
    for (int s = 0; s < shifts; ++s) {
        for (auto& v : shift) v = rng.uniform();
        for (std::size_t k = 1; k <= points; ++k) {
            for (std::size_t j = 0; j < dims; ++j) {
                double x = std::fmod(static_cast<double>(k) * std::sqrt(primes[j]) + shift[j], 1.0);
                w[j] = std::abs(2.0 * x - 1.0);
            }
            acc += f(w.data());
        }
    }
    return acc / (static_cast<double>(points) * shifts);
}

}  // namespace

double mvn_cdf(const std::vector<double>& b, const Eigen::MatrixXd& corr)
{
    require(static_cast<Eigen::Index>(b.size()) == corr.rows(), "dimension mismatch");
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == -kInf) return 0.0;
        if (b[i] != kInf) keep.push_back(static_cast<Eigen::Index>(i));
    }
    const std::size_t d = keep.size();
    if (d == 0) return 1.0;
    if (d == 1) return phi(b[static_cast<std::size_t>(keep[0])]);
    require(d <= 10, "multivariate normal cdf supports dimension <= 10");
    Eigen::MatrixXd sub(d, d);
    std::vector<double> lim(d);
    for (std::size_t i = 0; i < d; ++i) {
        lim[i] = b[static_cast<std::size_t>(keep[i])];
        for (std::size_t j = 0; j < d; ++j) sub(i, j) = corr(keep[i], keep[j]);
    }
    SovIntegrand f(lim, sub);
    double p = 0.0;
    if (d == 2) {
        auto g = [&](double w) { return f(&w); };
        p = bm::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 20, 1e-12);
    } else if (d == 3) {
        p = tensor_rule(f, cached_rule(48));
    } else if (d == 4) {
        p = tensor_rule(f, cached_rule(24));
    } else if (d == 5) {
        p = tensor_rule(f, cached_rule(16));
    } else {
        p = lattice_rule(f);
    }
    return std::clamp(p, 0.0, 1.0);
}

Eigen::MatrixXd equicorrelation(std::size_t d, double rho)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d), rho);
    m.diagonal().setOnes();
    return m;
}

Copula Copula::gaussian(Eigen::MatrixXd corr)
{
    check_correlation(corr);
    Eigen::MatrixXd factor = psd_factor(corr);
    return Copula(GaussianCopula{std::move(corr), std::move(factor)});
}

Copula Copula::student_t(double nu, Eigen::MatrixXd corr)
{
    require(nu > 0.0, "t copula: ν > 0 required");
    check_correlation(corr);
    Eigen::MatrixXd factor = psd_factor(corr);
    return Copula(StudentTCopula{nu, std::move(corr), std::move(factor)});
}

Copula Copula::gumbel(double theta, std::size_t dim)
{
    require(theta >= 1.0 && std::isfinite(theta), "Gumbel copula: θ ≥ 1 required");
    require(dim >= 1, "copula dimension must be >= 1");
    return Copula(GumbelCopula{theta, dim});
}

Copula Copula::clayton(double theta, std::size_t dim)
{
    require(theta > 0.0 && std::isfinite(theta), "Clayton copula: θ > 0 required");
    require(dim >= 1, "copula dimension must be >= 1");
    return Copula(ClaytonCopula{theta, dim});
}

Copula Copula::independence(std::size_t dim)
{
    require(dim >= 1, "copula dimension must be >= 1");
    return Copula(IndependenceCopula{dim});
}

std::size_t Copula::dimension() const
{
    struct Dim {
        std::size_t operator()(const GaussianCopula& c) const { return static_cast<std::size_t>(c.corr.rows()); }
        std::size_t operator()(const StudentTCopula& c) const { return static_cast<std::size_t>(c.corr.rows()); }
        std::size_t operator()(const GumbelCopula& c) const { return c.dim; }
        std::size_t operator()(const ClaytonCopula& c) const { return c.dim; }
        std::size_t operator()(const IndependenceCopula& c) const { return c.dim; }
    };
    return std::visit(Dim{}, kind_);
}

double Copula::cdf(const std::vector<double>& u) const
{
    require(u.size() == dimension(), "dimension mismatch: copula has dimension " + std::to_string(dimension()) +
                                         ", point has " + std::to_string(u.size()));
    for (double v : u) {
        require(v >= 0.0 && v <= 1.0, "copula argument outside [0, 1]");
        if (v == 0.0) return 0.0;
    }
    struct Cdf {
        const std::vector<double>& u;
        double operator()(const IndependenceCopula&) const
        {
            double p = 1.0;
            for (double v : u) p *= v;
            return p;
        }
        double operator()(const GumbelCopula& c) const
        {
            double s = 0.0;
            for (double v : u) s += std::pow(-std::log(v), c.theta);
            return std::exp(-std::pow(s, 1.0 / c.theta));
        }
        double operator()(const ClaytonCopula& c) const
        {
            double s = 0.0;
            for (double v : u) s += std::pow(v, -c.theta) - 1.0;
            return std::pow(1.0 + s, -1.0 / c.theta);
        }
        double operator()(const GaussianCopula& c) const
        {
            std::vector<double> b(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) b[i] = u[i] >= 1.0 ? kInf : phi_inv(u[i]);
            return mvn_cdf(b, c.corr);
        }
        double operator()(const StudentTCopula& c) const
        {
            bm::students_t_distribution<> t(c.nu);
            std::vector<double> x(u.size());
            bool all_free = true;
            for (std::size_t i = 0; i < u.size(); ++i) {
                x[i] = u[i] >= 1.0 ? kInf : bm::quantile(t, u[i]);
                all_free = all_free && x[i] == kInf;
            }
            if (all_free) return 1.0;
            // T = Z / S with S = sqrt(W / nu): P(T <= x) = E[Phi_corr(x S)].
            bm::chi_squared_distribution<> chi(c.nu);
            const Rule& rule = cached_rule(64);
            double acc = 0.0;
            std::vector<double> b(x.size());
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const double s = std::sqrt(bm::quantile(chi, rule.nodes[k]) / c.nu);
                for (std::size_t i = 0; i < x.size(); ++i) b[i] = x[i] == kInf ? kInf : x[i] * s;
                acc += rule.weights[k] * mvn_cdf(b, c.corr);
            }
            return std::clamp(acc, 0.0, 1.0);
        }
    };
    return std::visit(Cdf{u}, kind_);
}

namespace {

// Positive stable variable with Laplace transform exp(-s^alpha), 0 < alpha < 1
// (Kanter's representation).
double positive_stable(double alpha, Rng& rng)
{
    const double u = std::numbers::pi * rng.uniform();
    const double e = rng.exponential(1.0);
    const double a = std::pow(std::pow(std::sin(alpha * u), alpha) * std::pow(std::sin((1.0 - alpha) * u), 1.0 - alpha) /
                                  std::sin(u),
                              1.0 / (1.0 - alpha));
    return std::pow(a / e, (1.0 - alpha) / alpha);
}

}  // namespace

std::vector<double> Copula::sample(Rng& rng) const
{
    const std::size_t d = dimension();
    std::vector<double> u(d);
    struct Sample {
        Rng& rng;
        std::vector<double>& u;
        void operator()(const IndependenceCopula&) const
        {
            for (auto& v : u) v = rng.uniform();
        }
        void operator()(const GumbelCopula& c) const
        {
            if (c.theta == 1.0) {
                for (auto& v : u) v = rng.uniform();
                return;
            }
            const double alpha = 1.0 / c.theta;
            const double s = positive_stable(alpha, rng);
            for (auto& v : u) v = std::exp(-std::pow(rng.exponential(1.0) / s, alpha));
        }
        void operator()(const ClaytonCopula& c) const
        {
            std::gamma_distribution<double> frailty(1.0 / c.theta, 1.0);
            const double s = frailty(rng);
            for (auto& v : u) v = std::pow(1.0 + rng.exponential(1.0) / s, -1.0 / c.theta);
        }
        void operator()(const GaussianCopula& c) const
        {
            Eigen::VectorXd z(c.factor.cols());
            for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
            const Eigen::VectorXd x = c.factor * z;
            for (std::size_t i = 0; i < u.size(); ++i) u[i] = phi(x(static_cast<Eigen::Index>(i)));
        }
        void operator()(const StudentTCopula& c) const
        {
            Eigen::VectorXd z(c.factor.cols());
            for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
            std::gamma_distribution<double> chi(0.5 * c.nu, 2.0);
            const double s = std::sqrt(chi(rng) / c.nu);
            const Eigen::VectorXd x = c.factor * z / s;
            bm::students_t_distribution<> t(c.nu);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] = bm::cdf(t, x(static_cast<Eigen::Index>(i)));
        }
    };
    std::visit(Sample{rng, u}, kind_);
    return u;
}

double copula_cdf(const Copula& c, const std::vector<double>& u) { return c.cdf(u); }

Points sample_copula(const Copula& c, std::size_t n, const SeedStream& seed)
{
    require(n >= 1, "sample size must be >= 1");
    Rng rng = seed.rng();
    Points out(n);
    for (auto& row : out) row = c.sample(rng);
    return out;
}

Points sample_joint(const JointModel& model, std::size_t n, const SeedStream& seed)
{
    require(model.marginals.size() == model.copula.dimension(), "joint model: one marginal per copula coordinate required");
    Points out = sample_copula(model.copula, n, seed);
    for (auto& row : out)
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = model.marginals[j].quantile(std::clamp(row[j], 1e-300, 1.0 - 1e-16));
    return out;
}

CountDistribution CountDistribution::poisson(double mean)
{
    require(mean >= 0.0 && std::isfinite(mean), "Poisson count: mean >= 0 required");
    CountDistribution c;
    c.poisson_mean_ = mean;
    return c;
}

CountDistribution CountDistribution::pmf(std::vector<double> probabilities)
{
    require(!probabilities.empty(), "count pmf must be nonempty");
    double total = 0.0;
    CountDistribution c;
    for (double p : probabilities) {
        require(p >= 0.0, "count pmf: probabilities must be nonnegative");
        total += p;
        c.cumulative_.push_back(total);
    }
    require(std::abs(total - 1.0) < 1e-9, "count pmf must sum to 1");
    c.cumulative_.back() = 1.0;
    return c;
}

long CountDistribution::quantile(double u) const
{
    require(u >= 0.0 && u < 1.0, "count quantile level must lie in [0, 1)");
    if (poisson_mean_ >= 0.0) {
        if (poisson_mean_ == 0.0) return 0;
        if (poisson_mean_ < 500.0) {
            double p = std::exp(-poisson_mean_);
            double cdf = p;
            long k = 0;
            while (cdf < u && p > 0.0) {
                ++k;
                p *= poisson_mean_ / static_cast<double>(k);
                cdf += p;
            }
            return k;
        }
        using namespace bm::policies;
        bm::poisson_distribution<double, policy<discrete_quantile<integer_round_up>>> dist(poisson_mean_);
        return static_cast<long>(bm::quantile(dist, std::max(u, 1e-300)));
    }
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<long>(it - cumulative_.begin());
}

double CountDistribution::mean() const
{
    if (poisson_mean_ >= 0.0) return poisson_mean_;
    double m = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < cumulative_.size(); ++k) {
        m += static_cast<double>(k) * (cumulative_[k] - prev);
        prev = cumulative_[k];
    }
    return m;
}

double CountDistribution::variance() const
{
    if (poisson_mean_ >= 0.0) return poisson_mean_;
    double m2 = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < cumulative_.size(); ++k) {
        m2 += static_cast<double>(k * k) * (cumulative_[k] - prev);
        prev = cumulative_[k];
    }
    const double m = mean();
    return m2 - m * m;
}

std::vector<PeriodDraw> coupled_frequency_severity(const CountDistribution& counts, const severity::Distribution& scale,
                                                   double theta, std::size_t n_periods, const SeedStream& seed,
                                                   const severity::Distribution& unit_claim)
{
    const Copula copula = Copula::gumbel(theta, 2);
    std::vector<PeriodDraw> out(n_periods);
    parallel_for(n_periods, [&](std::size_t p) {
        Rng rng = seed.child(p).rng();
        const auto u = copula.sample(rng);
        auto& draw = out[p];
        draw.count = counts.quantile(std::min(u[0], 1.0 - 1e-16));
        draw.scale = scale.quantile(std::clamp(u[1], 1e-300, 1.0 - 1e-16));
        draw.sizes.resize(static_cast<std::size_t>(draw.count));
        for (auto& s : draw.sizes) s = draw.scale * unit_claim.sample(rng);
    });
    return out;
}

}  // namespace cyber::dependence
