#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cyber/core/random.hpp"
#include "cyber/netepidemic/graph.hpp"

namespace cyber::netepidemic {

enum class Model { SIS, SIR };

enum class Compartment : std::uint8_t { S = 0, I = 1, R = 2 };

char compartment_letter(Compartment c);

struct SpreadParams {
    double tau = 1.0;
    double gamma = 1.0;
    /// External infection rate per node; empty means zero everywhere, a
    /// single entry applies to every node.
    std::vector<double> epsilon;
    Model model = Model::SIS;

    double epsilon_at(std::size_t i) const;
};

void validate(const SpreadParams& params, std::size_t n_nodes);

using SpreadState = std::vector<Compartment>;

/// Initial state with the listed nodes infected and all others susceptible.
SpreadState seeded_state(std::size_t n, const std::vector<std::size_t>& infected);

enum class Cause : std::uint8_t { Recovery, Contact, External };

struct SpreadEvent {
    double time = 0.0;
    std::size_t node = 0;
    Compartment from = Compartment::S;
    Compartment to = Compartment::I;
    Cause cause = Cause::Contact;
};

struct SpreadRun {
    SpreadState init;
    std::vector<SpreadEvent> events;
    double horizon = 0.0;
};

/// Exact continuous-time simulation of the network SIS/SIR chain
/// (epsilon-SIS when epsilon > 0).
SpreadRun gillespie_spread(const Graph& g, const SpreadParams& params, const SpreadState& init, double horizon,
                           const SeedStream& seed);

/// State of every node at each requested time (times need not be sorted).
std::vector<SpreadState> states_at(const SpreadRun& run, const std::vector<double>& times);
Compartment state_at(const SpreadRun& run, std::size_t node, double time);

/// Columns: time,node,from,to.
void write_event_csv(const SpreadRun& run, std::ostream& out);

/// Monte Carlo marginal state probabilities P(X_i(t) = c).
struct MarginalEstimate {
    std::vector<double> times;
    /// [time][node]
    std::vector<std::vector<double>> infected;
    std::vector<std::vector<double>> susceptible;
    std::vector<std::vector<double>> recovered;
    std::size_t replications = 0;

    /// Binomial standard error of an estimated probability.
    double standard_error(double p) const;
};

MarginalEstimate estimate_marginals(const Graph& g, const SpreadParams& params, const SpreadState& init,
                                    const std::vector<double>& times, std::size_t n_reps, const SeedStream& seed);

}  // namespace cyber::netepidemic
