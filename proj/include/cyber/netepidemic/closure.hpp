#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cyber/netepidemic/graph.hpp"
#include "cyber/netepidemic/spread.hpp"

namespace cyber::netepidemic {

enum class ClosureScheme { Nimfa, SplitIndependent, SplitHilbert, KirkwoodPair };

struct ClosureSpec {
    ClosureScheme scheme = ClosureScheme::Nimfa;
    /// 1 for NIMFA, 2 for the pair model, 1 or 2 for split closures
    /// (order 2 split closures are available for SIS only).
    int order = 1;
};

ClosureScheme parse_closure_scheme(const std::string& name);
std::string closure_scheme_name(ClosureScheme scheme);
void validate(const ClosureSpec& spec, Model model);

struct ClosureSolution {
    std::vector<double> times;
    /// [time][node], clamped to [0, 1].
    std::vector<std::vector<double>> infected;
    std::vector<std::vector<double>> susceptible;
    /// [time][node]: true where the raw infected value left [0, 1].
    std::vector<std::vector<char>> clamped;
    std::size_t clamp_count = 0;
    /// Closed-triangle quotients replaced by the independent product because
    /// a denominator fell below 1e-12 (right-hand-side evaluations).
    std::size_t fallback_count = 0;
    std::size_t equations = 0;
};

/// Integrates the closed moment equations with an adaptive Dormand-Prince
/// scheme (absolute tolerance 1e-12, relative 1e-10).
ClosureSolution solve_closure(const Graph& g, const SpreadParams& params, const SpreadState& init,
                              const ClosureSpec& spec, const std::vector<double>& times);

enum class Criticality { Subcritical, Supercritical };

struct ThresholdResult {
    double spectral_radius = 0.0;
    double ratio = 0.0;  // tau / gamma
    Criticality regime = Criticality::Subcritical;
};

/// Linear stability of the infection-free NIMFA state: subcritical iff
/// tau / gamma < 1 / spectral radius (with a 1e-9 relative margin, so the
/// boundary itself is reported as supercritical).
ThresholdResult nimfa_threshold(const Graph& g, const SpreadParams& params);

/// Max over grid and nodes of |pair-model marginal - exact marginal| for
/// SIR on a tree (infected and susceptible marginals).
double pair_closure_sir_tree_check(const Graph& tree, const SpreadParams& params, const SpreadState& init,
                                   const std::vector<double>& times);

}  // namespace cyber::netepidemic
