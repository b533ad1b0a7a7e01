#pragma once

#include <vector>

#include "cyber/netepidemic/graph.hpp"
#include "cyber/netepidemic/spread.hpp"

namespace cyber::netepidemic {

/// Full-state Kolmogorov forward solution.
struct MasterSolution {
    std::vector<double> times;
    /// [time][node]
    std::vector<std::vector<double>> infected;
    std::vector<std::vector<double>> susceptible;
    std::vector<std::vector<double>> recovered;
    /// Total probability mass at each grid time.
    std::vector<double> mass;
    /// Full distribution at each grid time; states encoded in base 2 (SIS)
    /// or base 3 (SIR) with node 0 as the least significant digit.
    std::vector<std::vector<double>> distribution;
};

constexpr std::size_t kMasterMaxSis = 12;
constexpr std::size_t kMasterMaxSir = 8;

/// Solves the forward equations by uniformization (randomization): the
/// chain is embedded in a Poisson clock with the maximal exit rate and the
/// Poisson series is summed until the neglected weight is below 1e-14.
/// Grid times must be nondecreasing and start at or after 0.
MasterSolution exact_master(const Graph& g, const SpreadParams& params, const SpreadState& init,
                            const std::vector<double>& times);

/// Same, from an arbitrary initial distribution over encoded states.
MasterSolution exact_master(const Graph& g, const SpreadParams& params, const std::vector<double>& init_distribution,
                            const std::vector<double>& times);

std::size_t encode_state(const SpreadState& s, Model model);
SpreadState decode_state(std::size_t code, std::size_t n, Model model);

}  // namespace cyber::netepidemic
