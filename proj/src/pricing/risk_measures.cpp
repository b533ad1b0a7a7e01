#include "cyber/pricing/risk_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cyber/core/errors.hpp"

namespace cyber::pricing {

namespace {

constexpr double kExponentGuard = 700.0;

void require_sample(const std::vector<double>& x)
{
    require(!x.empty(), "empty sample");
    for (double v : x) require(std::isfinite(v), "sample contains non-finite values");
}

std::vector<double> sorted(const std::vector<double>& x)
{
    std::vector<double> s = x;
    std::sort(s.begin(), s.end());
    return s;
}

std::size_t atom_index(double lambda, std::size_t n)
{
    return static_cast<std::size_t>(std::floor(lambda * static_cast<double>(n) + 1e-9));
}

}  // namespace

Distortion Distortion::grid(std::vector<double> u, std::vector<double> psi)
{
    Distortion d{Kind::Grid, 1.0, std::move(u), std::move(psi)};
    validate(d);
    return d;
}

double Distortion::operator()(double v) const
{
    v = std::clamp(v, 0.0, 1.0);
    if (kind == Kind::Power) return exponent == 1.0 ? v : std::pow(v, exponent);
    const auto it = std::upper_bound(u.begin(), u.end(), v);
    if (it == u.end()) return psi.back();
    const auto j = static_cast<std::size_t>(it - u.begin());
    if (j == 0) return psi.front();
    const double w = (v - u[j - 1]) / (u[j] - u[j - 1]);
    return psi[j - 1] + w * (psi[j] - psi[j - 1]);
}

void validate(const Distortion& d)
{
    if (d.kind == Distortion::Kind::Power) {
        require(d.exponent > 0.0, "distortion exponent must be positive");
        return;
    }
    require(d.u.size() >= 2 && d.u.size() == d.psi.size(), "ψ grid needs matching u and ψ arrays of length ≥ 2");
    require(d.u.front() == 0.0 && d.u.back() == 1.0, "ψ grid must span [0,1]");
    require(d.psi.front() == 0.0 && d.psi.back() == 1.0, "ψ(0)=0 and ψ(1)=1 required");
    for (std::size_t k = 1; k < d.u.size(); ++k) {
        require(d.u[k] > d.u[k - 1], "ψ grid abscissae must increase");
        require(d.psi[k] >= d.psi[k - 1], "ψ grid not monotone");
    }
}

void validate(const RiskMeasure& rho)
{
    switch (rho.kind) {
    case RiskMeasure::Kind::VaR: require(rho.parameter > 0.0 && rho.parameter < 1.0, "VaR needs λ in (0,1)"); break;
    case RiskMeasure::Kind::AVaR: require(rho.parameter > 0.0 && rho.parameter <= 1.0, "AVaR needs λ in (0,1]"); break;
    case RiskMeasure::Kind::Entropic: require(rho.parameter > 0.0, "entropic measure needs γ > 0"); break;
    case RiskMeasure::Kind::Distortion: validate(rho.distortion); break;
    case RiskMeasure::Kind::Expectation: break;
    }
}

double RiskMeasure::operator()(const std::vector<double>& x) const
{
    switch (kind) {
    case Kind::VaR: return pricing::value_at_risk(x, parameter);
    case Kind::AVaR: return pricing::average_value_at_risk(x, parameter);
    case Kind::Entropic: return pricing::entropic(x, parameter);
    case Kind::Distortion: return pricing::distortion(x, distortion);
    case Kind::Expectation: return pricing::expectation(x);
    }
    return 0.0;
}

std::string RiskMeasure::name() const
{
    switch (kind) {
    case Kind::VaR: return "var";
    case Kind::AVaR: return "avar";
    case Kind::Entropic: return "entropic";
    case Kind::Distortion: return "distortion";
    case Kind::Expectation: return "expectation";
    }
    return "";
}

double value_at_risk(const std::vector<double>& x, double lambda)
{
    require_sample(x);
    require(lambda > 0.0 && lambda < 1.0, "VaR needs λ in (0,1)");
    const auto s = sorted(x);
    return -s[std::min(atom_index(lambda, s.size()), s.size() - 1)];
}

double average_value_at_risk(const std::vector<double>& x, double lambda)
{
    require_sample(x);
    require(lambda > 0.0 && lambda <= 1.0, "AVaR needs λ in (0,1]");
    const auto s = sorted(x);
    const auto n = s.size();
    const std::size_t k = std::min(atom_index(lambda, n), n);
    double tail = 0.0;
    for (std::size_t j = 0; j < k; ++j) tail -= s[j];
    double acc = tail / static_cast<double>(n);
    if (k < n) {
        const double rest = lambda - static_cast<double>(k) / static_cast<double>(n);
        if (rest > 0.0) acc -= rest * s[k];
    }
    return acc / lambda;
}

double entropic(const std::vector<double>& x, double gamma)
{
    require_sample(x);
    require(gamma > 0.0, "entropic measure needs γ > 0");
    double m = -std::numeric_limits<double>::infinity();
    for (double v : x) m = std::max(m, -gamma * v);
    if (!(m <= kExponentGuard)) throw ModelError("γ too large for sample scale");
    double acc = 0.0;
    for (double v : x) acc += std::exp(-gamma * v - m);
    const double out = (m + std::log(acc / static_cast<double>(x.size()))) / gamma;
    if (!std::isfinite(out)) throw ModelError("γ too large for sample scale");
    return out;
}

double distortion(const std::vector<double>& x, const Distortion& psi)
{
    require_sample(x);
    validate(psi);
    auto loss = x;
    for (double& v : loss) v = -v;
    std::sort(loss.begin(), loss.end(), std::greater<>());
    const double n = static_cast<double>(loss.size());
    double acc = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < loss.size(); ++k) {
        const double cur = psi(static_cast<double>(k + 1) / n);
        acc += loss[k] * (cur - prev);
        prev = cur;
    }
    return acc;
}

double expectation(const std::vector<double>& x)
{
    require_sample(x);
    return -std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace cyber::pricing
