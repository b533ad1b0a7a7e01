#pragma once

#include <vector>

#include "cyber/core/random.hpp"

namespace cyber::netepidemic {

/// Well-mixed SIR: S' = -tau S I, I' = tau S I - gamma I, R' = gamma I.
struct PopulationSIR {
    double population = 1.0;
    double tau = 0.0;
    double gamma = 1.0;
    double s0 = 1.0;
    double i0 = 0.0;
    double r0 = 0.0;
};

void validate(const PopulationSIR& p);

struct PopulationTrajectory {
    std::vector<double> times;
    std::vector<double> s;
    std::vector<double> i;
    std::vector<double> r;
    /// int_0^t I(u) du
    std::vector<double> cumulative_infected;
};

PopulationTrajectory integrate_population_sir(const PopulationSIR& p, const std::vector<double>& times);

/// Trajectory with I constant on [0, horizon] (test and scenario helper).
PopulationTrajectory constant_infected(double level, double horizon);

/// Policyholder infection with hazard tau * I(t). The cumulative hazard is
/// interpolated linearly between grid points of the trajectory.
class PortfolioHazard {
public:
    PortfolioHazard(PopulationTrajectory trajectory, double tau);

    double hazard(double t) const;
    double cumulative_hazard(double t) const;
    /// 1 - exp(-tau int_0^T I).
    double infection_probability(double horizon) const;
    /// Inverse cumulative hazard of an Exp(1) draw per firm (firm f uses
    /// seed.child(f)); +inf when not infected within the trajectory.
    std::vector<double> sample_infection_times(std::size_t n_firms, const SeedStream& seed) const;

private:
    PopulationTrajectory traj_;
    double tau_;
};

}  // namespace cyber::netepidemic
