#pragma once

#include <optional>
#include <vector>

#include "cyber/core/random.hpp"
#include "cyber/netepidemic/graph.hpp"
#include "cyber/netepidemic/spread.hpp"
#include "cyber/severity/distribution.hpp"

namespace cyber::netepidemic {

enum class InternalDependence { Independence, Gumbel, Clayton };

/// Per-node distributions may be given once (shared by all nodes) or once
/// per node.
struct NonMarkovSpec {
    Model model = Model::SIS;
    std::vector<severity::Distribution> recovery;
    /// Marginal F_i of the waiting time until infection from one infected
    /// neighbor.
    std::vector<severity::Distribution> internal;
    InternalDependence dependence = InternalDependence::Independence;
    double theta = 1.0;
    /// External attack waiting time G_i; empty means no external threat.
    std::vector<severity::Distribution> external;
};

void validate(const NonMarkovSpec& spec, std::size_t n_nodes);

/// Event-driven spread with general waiting times. A recovery time is drawn
/// when a node becomes infected and kept until it fires. After every event
/// each susceptible node redraws its K internal waiting times (one per
/// infected neighbor, jointly from the K-dimensional copula) and its
/// external waiting time; the earliest candidate fires.
SpreadRun simulate_nonmarkov(const Graph& g, const NonMarkovSpec& spec, const SpreadState& init, double horizon,
                             const SeedStream& seed);

}  // namespace cyber::netepidemic
