#include "cyber/netepidemic/population.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "cyber/core/errors.hpp"

namespace cyber::netepidemic {

namespace odeint = boost::numeric::odeint;

void validate(const PopulationSIR& p)
{
    require(p.population > 0.0, "population must be positive");
    require(p.tau >= 0.0 && p.gamma >= 0.0, "τ ≥ 0 and γ ≥ 0 required");
    require(p.s0 >= 0.0 && p.i0 >= 0.0 && p.r0 >= 0.0, "initial compartments must be nonnegative");
    require(std::abs(p.s0 + p.i0 + p.r0 - p.population) <= 1e-9 * p.population,
            "S0 + I0 + R0 must equal the population size");
}

PopulationTrajectory integrate_population_sir(const PopulationSIR& p, const std::vector<double>& times)
{
    validate(p);
    require(!times.empty() && times.front() >= 0.0, "time grid must be nonempty and nonnegative");
    for (std::size_t k = 1; k < times.size(); ++k) require(times[k] > times[k - 1], "time grid must be increasing");

    using State = std::array<double, 4>;
    auto rhs = [&](const State& x, State& dx, double) {
        const double infection = p.tau * x[0] * x[1];
        const double recovery = p.gamma * x[1];
        dx[0] = -infection;
        dx[1] = infection - recovery;
        dx[2] = recovery;
        dx[3] = x[1];
    };
    PopulationTrajectory out;
    auto observe = [&](const State& x, double t) {
        if (t < times.front()) return;
        out.times.push_back(t);
        out.s.push_back(x[0]);
        out.i.push_back(x[1]);
        out.r.push_back(x[2]);
        out.cumulative_infected.push_back(x[3]);
    };
    std::vector<double> grid;
    if (times.front() > 0.0) grid.push_back(0.0);
    grid.insert(grid.end(), times.begin(), times.end());
    State x{p.s0, p.i0, p.r0, 0.0};
    if (grid.size() == 1) {
        observe(x, grid.front());
        return out;
    }
    try {
        const double scale = std::max(1.0, p.population);
        auto stepper = odeint::make_dense_output(1e-13 * scale, 1e-12, odeint::runge_kutta_dopri5<State>());
        odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), (grid.back() - grid.front()) * 1e-4,
                                observe);
    } catch (const std::exception& e) {
        throw ModelError(std::string("ODE integration failure: ") + e.what());
    }
    return out;
}

PopulationTrajectory constant_infected(double level, double horizon)
{
    require(level >= 0.0 && horizon > 0.0, "constant trajectory needs level >= 0 and horizon > 0");
    PopulationTrajectory t;
    t.times = {0.0, horizon};
    t.i = {level, level};
    t.s = {0.0, 0.0};
    t.r = {0.0, 0.0};
    t.cumulative_infected = {0.0, level * horizon};
    return t;
}

PortfolioHazard::PortfolioHazard(PopulationTrajectory trajectory, double tau) : traj_(std::move(trajectory)), tau_(tau)
{
    require(tau >= 0.0, "τ ≥ 0 required");
    require(!traj_.times.empty() && traj_.times.size() == traj_.cumulative_infected.size() &&
                traj_.times.size() == traj_.i.size(),
            "trajectory arrays must be aligned and nonempty");
}

double PortfolioHazard::hazard(double t) const
{
    const auto& x = traj_.times;
    if (t <= x.front()) return tau_ * traj_.i.front();
    if (t >= x.back()) return tau_ * traj_.i.back();
    const auto j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return tau_ * (traj_.i[j - 1] + w * (traj_.i[j] - traj_.i[j - 1]));
}

double PortfolioHazard::cumulative_hazard(double t) const
{
    const auto& x = traj_.times;
    const auto& c = traj_.cumulative_infected;
    if (t <= x.front()) return tau_ * c.front();
    if (t >= x.back()) return tau_ * c.back();
    const auto j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return tau_ * (c[j - 1] + w * (c[j] - c[j - 1]));
}

double PortfolioHazard::infection_probability(double horizon) const
{
    return -std::expm1(-cumulative_hazard(horizon));
}

std::vector<double> PortfolioHazard::sample_infection_times(std::size_t n_firms, const SeedStream& seed) const
{
    const auto& x = traj_.times;
    const auto& c = traj_.cumulative_infected;
    std::vector<double> out(n_firms, std::numeric_limits<double>::infinity());
    for (std::size_t f = 0; f < n_firms; ++f) {
        Rng rng = seed.child(f).rng();
        const double e = rng.exponential(1.0);
        if (tau_ == 0.0 || e > tau_ * c.back()) continue;
        const double level = e / tau_;
        const auto j = static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), level) - c.begin());
        if (j == 0) {
            out[f] = x.front();
            continue;
        }
        const double span = c[j] - c[j - 1];
        out[f] = span > 0.0 ? x[j - 1] + (level - c[j - 1]) / span * (x[j] - x[j - 1]) : x[j];
    }
    return out;
}

}  // namespace cyber::netepidemic
