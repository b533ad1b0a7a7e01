#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "cyber/core/random.hpp"
#include "cyber/frequency/intensity.hpp"

namespace cyber::frequency {

/// Inhomogeneous Poisson arrivals on [0, horizon] by thinning against
/// 1.1 times the maximum of the intensity on the horizon.
std::vector<double> simulate_poisson(const IntensityFunction& intensity, double horizon, const SeedStream& seed);

struct FactorPath {
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // one d-vector per grid time

    std::size_t dimension() const { return values.empty() ? 0 : values.front().size(); }
};

/// Independent Ornstein-Uhlenbeck coordinates
/// dR = speed (level - R) dt + vol dW, Euler-stepped on a uniform grid.
struct MeanReverting {
    std::vector<double> speed;
    std::vector<double> level;
    std::vector<double> vol;
    std::vector<double> x0;
    double dt = 0.01;
};

struct DeterministicPath {
    FactorPath path;
};

struct IdentityLink {};
/// a + b . R
struct AffineLink {
    double a = 0.0;
    std::vector<double> b;
};
/// exp(a + b . R)
struct ExpAffineLink {
    double a = 0.0;
    std::vector<double> b;
};
using CustomLink = std::function<double(const std::vector<double>&)>;

using Link = std::variant<IdentityLink, AffineLink, ExpAffineLink, CustomLink>;

struct FactorModel {
    std::variant<DeterministicPath, MeanReverting> dynamics;
    Link link = IdentityLink{};

    std::size_t dimension() const;
};

void validate(const FactorModel& model);

FactorPath simulate_factor_path(const FactorModel& model, double horizon, const SeedStream& seed);
double apply_link(const Link& link, const std::vector<double>& state);
/// Piecewise-linear intensity through the link values on the path grid.
/// Throws ModelError if the link is negative anywhere on the grid.
IntensityFunction intensity_from_path(const FactorModel& model, const FactorPath& path);

struct CoxRealization {
    FactorPath path;
    std::vector<double> arrivals;
};

CoxRealization simulate_cox(const FactorModel& model, double horizon, const SeedStream& seed);

struct CovarianceEstimate {
    /// Cov of the integrated intensities over the two windows.
    double intensity_covariance = 0.0;
    double intensity_standard_error = 0.0;
    /// Cov of the simulated counts over the same windows; equals the
    /// intensity covariance in expectation since counts are conditionally
    /// independent given the path.
    double count_covariance = 0.0;
    double count_standard_error = 0.0;
};

/// Monte Carlo estimate of Cov(int_s^t lambda, int_u^v lambda).
CovarianceEstimate cox_increment_covariance(const FactorModel& model, double s, double t, double u, double v,
                                            std::size_t n_reps, const SeedStream& seed);

/// Multivariate Hawkes process on S streams (one per (module, firm)).
/// Streams are grouped into blocks; the kernel exciting a stream of block a
/// from an event in block c is alpha[a][c] exp(-beta[a][c] t).
struct HawkesSpec {
    std::vector<IntensityFunction> baseline;  // per stream
    std::vector<std::size_t> block;           // per stream
    std::vector<std::vector<double>> alpha;
    std::vector<std::vector<double>> beta;

    std::size_t stream_count() const { return baseline.size(); }
    std::size_t block_count() const { return alpha.size(); }

    /// Univariate convenience constructor.
    static HawkesSpec univariate(IntensityFunction mu, double alpha, double beta);
};

void validate(const HawkesSpec& spec);
/// Spectral radius of the stream-level branching matrix (entries alpha/beta).
double branching_radius(const HawkesSpec& spec);

/// Ogata thinning with exact exponential-kernel recursions. Arrival times per
/// stream. Throws ModelError("explosive specification") when the branching
/// radius is >= 1.
std::vector<std::vector<double>> simulate_hawkes(const HawkesSpec& spec, double horizon, const SeedStream& seed);

}  // namespace cyber::frequency
