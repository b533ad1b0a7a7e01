#include "cyber/frequency/processes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "cyber/core/errors.hpp"
#include "cyber/core/parallel.hpp"
#include "cyber/core/stats.hpp"

namespace cyber::frequency {

std::vector<double> simulate_poisson(const IntensityFunction& intensity, double horizon, const SeedStream& seed)
{
    require(horizon > 0.0, "horizon must be positive");
    std::vector<double> times;
    if (intensity.is_zero()) return times;
    const double bound = 1.1 * intensity.supremum(0.0, horizon);
    if (!std::isfinite(bound)) throw ModelError("unbounded intensity on the horizon");
    if (bound <= 0.0) return times;
    Rng rng = seed.rng();
    double t = 0.0;
    for (;;) {
        t += rng.exponential(bound);
        if (t > horizon) break;
        const double lambda = intensity(t);
        if (lambda > bound) throw ModelError("intensity exceeds its dominating rate at t=" + std::to_string(t));
        if (rng.uniform() * bound <= lambda) times.push_back(t);
    }
    return times;
}

std::size_t FactorModel::dimension() const
{
    if (const auto* d = std::get_if<DeterministicPath>(&dynamics)) return d->path.dimension();
    return std::get<MeanReverting>(dynamics).speed.size();
}

namespace {

void validate_link(const Link& link, std::size_t d)
{
    if (std::holds_alternative<IdentityLink>(link)) {
        require(d == 1, "identity link requires a one-dimensional factor");
    } else if (const auto* a = std::get_if<AffineLink>(&link)) {
        require(a->b.size() == d, "affine link: coefficient dimension mismatch");
    } else if (const auto* e = std::get_if<ExpAffineLink>(&link)) {
        require(e->b.size() == d, "exp-affine link: coefficient dimension mismatch");
    } else {
        require(static_cast<bool>(std::get<CustomLink>(link)), "custom link is empty");
    }
}

}  // namespace

void validate(const FactorModel& model)
{
    if (const auto* det = std::get_if<DeterministicPath>(&model.dynamics)) {
        const auto& p = det->path;
        require(!p.times.empty() && p.times.size() == p.values.size(), "factor path: grid and values differ");
        for (std::size_t i = 1; i < p.times.size(); ++i)
            require(p.times[i] > p.times[i - 1], "factor path: grid must be strictly increasing");
        for (const auto& v : p.values) require(v.size() == p.dimension(), "factor path: dimension not constant");
    } else {
        const auto& m = std::get<MeanReverting>(model.dynamics);
        const std::size_t d = m.speed.size();
        require(d >= 1, "mean-reverting factor: empty dimension");
        require(m.level.size() == d && m.vol.size() == d && m.x0.size() == d,
                "mean-reverting factor: parameter dimensions differ");
        for (std::size_t i = 0; i < d; ++i) {
            require(m.speed[i] > 0.0, "mean-reverting factor: speed > 0 required");
            require(m.vol[i] >= 0.0, "mean-reverting factor: vol >= 0 required");
        }
        require(m.dt > 0.0, "mean-reverting factor: dt > 0 required");
    }
    validate_link(model.link, model.dimension());
}

FactorPath simulate_factor_path(const FactorModel& model, double horizon, const SeedStream& seed)
{
    require(horizon > 0.0, "horizon must be positive");
    if (const auto* det = std::get_if<DeterministicPath>(&model.dynamics)) return det->path;
    const auto& m = std::get<MeanReverting>(model.dynamics);
    const std::size_t d = m.speed.size();
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / m.dt - 1e-9));
    FactorPath path;
    path.times.reserve(steps + 1);
    path.values.reserve(steps + 1);
    path.times.push_back(0.0);
    path.values.push_back(m.x0);
    Rng rng = seed.rng();
    std::vector<double> x = m.x0;
    double t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double next = std::min(horizon, static_cast<double>(k + 1) * m.dt);
        const double h = next - t;
        for (std::size_t i = 0; i < d; ++i) {
            const double noise = m.vol[i] == 0.0 ? 0.0 : m.vol[i] * std::sqrt(h) * rng.normal();
            x[i] += m.speed[i] * (m.level[i] - x[i]) * h + noise;
        }
        t = next;
        path.times.push_back(t);
        path.values.push_back(x);
    }
    return path;
}

double apply_link(const Link& link, const std::vector<double>& state)
{
    struct Apply {
        const std::vector<double>& x;
        double operator()(const IdentityLink&) const { return x.at(0); }
        double operator()(const AffineLink& a) const
        {
            double acc = a.a;
            for (std::size_t i = 0; i < a.b.size(); ++i) acc += a.b[i] * x.at(i);
            return acc;
        }
        double operator()(const ExpAffineLink& e) const
        {
            double acc = e.a;
            for (std::size_t i = 0; i < e.b.size(); ++i) acc += e.b[i] * x.at(i);
            return std::exp(acc);
        }
        double operator()(const CustomLink& f) const { return f(x); }
    };
    return std::visit(Apply{state}, link);
}

IntensityFunction intensity_from_path(const FactorModel& model, const FactorPath& path)
{
    std::vector<double> values;
    values.reserve(path.values.size());
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        const double v = apply_link(model.link, path.values[k]);
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ModelError("link produced negative intensity at t=" + std::to_string(path.times[k]));
        values.push_back(v);
    }
    return IntensityFunction::piecewise_linear(path.times, std::move(values));
}

CoxRealization simulate_cox(const FactorModel& model, double horizon, const SeedStream& seed)
{
    validate(model);
    CoxRealization out;
    out.path = simulate_factor_path(model, horizon, seed.child(0));
    out.arrivals = simulate_poisson(intensity_from_path(model, out.path), horizon, seed.child(1));
    return out;
}

namespace {

void covariance_with_error(const std::vector<double>& x, const std::vector<double>& y, double& cov, double& se)
{
    cov = stats::covariance(x, y);
    const double mx = stats::mean(x), my = stats::mean(y);
    std::vector<double> prod(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
    se = stats::standard_error(prod);
}

}  // namespace

CovarianceEstimate cox_increment_covariance(const FactorModel& model, double s, double t, double u, double v,
                                            std::size_t n_reps, const SeedStream& seed)
{
    require(0.0 <= s && s < t && t <= u && u < v, "overlapping intervals: need s < t <= u < v");
    require(n_reps >= 2, "need at least two replications");
    validate(model);
    std::vector<double> i1(n_reps), i2(n_reps), c1(n_reps), c2(n_reps);
    parallel_for(n_reps, [&](std::size_t r) {
        const auto rep = seed.child(r);
        const auto path = simulate_factor_path(model, v, rep.child(0));
        const auto lambda = intensity_from_path(model, path);
        i1[r] = lambda.integral(s, t);
        i2[r] = lambda.integral(u, v);
        const auto arrivals = simulate_poisson(lambda, v, rep.child(1));
        for (double a : arrivals) {
            if (a > s && a <= t) c1[r] += 1.0;
            if (a > u && a <= v) c2[r] += 1.0;
        }
    });
    CovarianceEstimate out;
    covariance_with_error(i1, i2, out.intensity_covariance, out.intensity_standard_error);
    covariance_with_error(c1, c2, out.count_covariance, out.count_standard_error);
    return out;
}

HawkesSpec HawkesSpec::univariate(IntensityFunction mu, double alpha, double beta)
{
    HawkesSpec spec;
    spec.baseline = {std::move(mu)};
    spec.block = {0};
    spec.alpha = {{alpha}};
    spec.beta = {{beta}};
    return spec;
}

void validate(const HawkesSpec& spec)
{
    const std::size_t b = spec.block_count();
    require(spec.stream_count() >= 1, "Hawkes: no streams");
    require(spec.block.size() == spec.stream_count(), "Hawkes: one block id per stream required");
    require(b >= 1 && spec.beta.size() == b, "Hawkes: kernel matrices must be square and equal in size");
    for (std::size_t a = 0; a < b; ++a) {
        require(spec.alpha[a].size() == b && spec.beta[a].size() == b,
                "Hawkes: kernel matrices must be square and equal in size");
        for (std::size_t c = 0; c < b; ++c) {
            require(spec.alpha[a][c] >= 0.0, "Hawkes: alpha >= 0 required");
            require(spec.beta[a][c] > 0.0, "Hawkes: beta > 0 required");
        }
    }
    for (auto id : spec.block) require(id < b, "Hawkes: block id out of range");
    require(spec.stream_count() <= 10000, "Hawkes: at most 10^4 streams supported");
}

double branching_radius(const HawkesSpec& spec)
{
    validate(spec);
    const std::size_t b = spec.block_count();
    std::vector<double> members(b, 0.0);
    for (auto id : spec.block) members[id] += 1.0;
    // The stream-level matrix is constant on blocks; its nonzero spectrum is
    // that of the block matrix weighted by source block sizes.
    Eigen::MatrixXd k(b, b);
    for (std::size_t a = 0; a < b; ++a)
        for (std::size_t c = 0; c < b; ++c) k(a, c) = spec.alpha[a][c] / spec.beta[a][c] * members[c];
    if (b == 1) return k(0, 0);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(k, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<std::vector<double>> simulate_hawkes(const HawkesSpec& spec, double horizon, const SeedStream& seed)
{
    require(horizon > 0.0, "horizon must be positive");
    const double radius = branching_radius(spec);
    if (radius >= 1.0)
        throw ModelError("explosive specification: branching spectral radius " + std::to_string(radius) + " >= 1");

    const std::size_t n = spec.stream_count();
    const std::size_t b = spec.block_count();
    std::vector<std::vector<double>> out(n);

    const bool unexcited = std::all_of(spec.alpha.begin(), spec.alpha.end(), [](const auto& row) {
        return std::all_of(row.begin(), row.end(), [](double a) { return a == 0.0; });
    });
    if (unexcited) {
        for (std::size_t i = 0; i < n; ++i) out[i] = simulate_poisson(spec.baseline[i], horizon, seed.child(i));
        return out;
    }

    std::vector<double> members(b, 0.0);
    for (auto id : spec.block) members[id] += 1.0;
    double mu_bound = 0.0;
    for (const auto& mu : spec.baseline) mu_bound += mu.supremum(0.0, horizon);
    mu_bound *= 1.1;
    if (!std::isfinite(mu_bound)) throw ModelError("unbounded baseline intensity on the horizon");

    // r[a][c] = sum over past events e in block c of exp(-beta[a][c] (t - T_e))
    std::vector<std::vector<double>> r(b, std::vector<double>(b, 0.0));
    std::vector<double> excitation(b, 0.0), lambda(n, 0.0);
    auto refresh_excitation = [&] {
        double total = 0.0;
        for (std::size_t a = 0; a < b; ++a) {
            excitation[a] = 0.0;
            for (std::size_t c = 0; c < b; ++c) excitation[a] += spec.alpha[a][c] * r[a][c];
            total += members[a] * excitation[a];
        }
        return total;
    };

    Rng rng = seed.rng();
    double t = 0.0;
    double excited_total = 0.0;
    for (;;) {
        const double bound = mu_bound + excited_total;
        if (bound <= 0.0) break;
        const double w = rng.exponential(bound);
        t += w;
        if (t > horizon) break;
        for (std::size_t a = 0; a < b; ++a)
            for (std::size_t c = 0; c < b; ++c) r[a][c] *= std::exp(-spec.beta[a][c] * w);
        excited_total = refresh_excitation();
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lambda[i] = spec.baseline[i](t) + excitation[spec.block[i]];
            total += lambda[i];
        }
        if (total > bound * (1.0 + 1e-12))
            throw ModelError("Hawkes intensity exceeds its dominating rate at t=" + std::to_string(t));
        const double pick = rng.uniform() * bound;
        if (pick > total) continue;
        std::size_t i = 0;
        double acc = lambda[0];
        while (acc < pick && i + 1 < n) acc += lambda[++i];
        out[i].push_back(t);
        const std::size_t c = spec.block[i];
        for (std::size_t a = 0; a < b; ++a) r[a][c] += 1.0;
        excited_total = refresh_excitation();
    }
    return out;
}

}  // namespace cyber::frequency
