#pragma once

#include <string>
#include <vector>

namespace cyber::pricing {

/// Distortion ψ: [0,1] -> [0,1], either u^p or a piecewise-linear grid.
struct Distortion {
    enum class Kind { Power, Grid } kind = Kind::Power;
    double exponent = 1.0;
    std::vector<double> u;
    std::vector<double> psi;

    static Distortion identity() { return {}; }
    static Distortion power(double p) { return {Kind::Power, p, {}, {}}; }
    static Distortion grid(std::vector<double> u, std::vector<double> psi);

    double operator()(double u) const;
};

void validate(const Distortion& d);

/// Positions follow the X = -S convention: losses are negative.
struct RiskMeasure {
    enum class Kind { VaR, AVaR, Entropic, Distortion, Expectation } kind = Kind::Expectation;
    /// λ for VaR and AVaR, γ for the entropic measure.
    double parameter = 0.0;
    Distortion distortion;

    static RiskMeasure value_at_risk(double lambda) { return {Kind::VaR, lambda, {}}; }
    static RiskMeasure average_value_at_risk(double lambda) { return {Kind::AVaR, lambda, {}}; }
    static RiskMeasure entropic(double gamma) { return {Kind::Entropic, gamma, {}}; }
    static RiskMeasure distorted(Distortion d) { return {Kind::Distortion, 0.0, std::move(d)}; }
    static RiskMeasure expectation() { return {}; }

    double operator()(const std::vector<double>& position) const;
    std::string name() const;
};

void validate(const RiskMeasure& rho);

/// inf{m : P[X + m < 0] <= λ} under the empirical law.
double value_at_risk(const std::vector<double>& x, double lambda);
/// (1/λ) ∫_0^λ VaR_α dα, exact on the empirical law.
double average_value_at_risk(const std::vector<double>& x, double lambda);
/// (1/γ) log E[exp(-γX)].
double entropic(const std::vector<double>& x, double gamma);
/// Choquet integral of -X under ψ.
double distortion(const std::vector<double>& x, const Distortion& psi);
/// E[-X].
double expectation(const std::vector<double>& x);

}  // namespace cyber::pricing
