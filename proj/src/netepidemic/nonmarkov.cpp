#include "cyber/netepidemic/nonmarkov.hpp"

#include <algorithm>
#include <limits>

#include "cyber/core/errors.hpp"
#include "cyber/dependence/copula.hpp"

namespace cyber::netepidemic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const severity::Distribution& pick(const std::vector<severity::Distribution>& v, std::size_t i)
{
    return v.size() == 1 ? v.front() : v[i];
}

}  // namespace

void validate(const NonMarkovSpec& spec, std::size_t n_nodes)
{
    auto sized = [&](const std::vector<severity::Distribution>& v, bool optional) {
        return (optional && v.empty()) || v.size() == 1 || v.size() == n_nodes;
    };
    require(sized(spec.recovery, false), "recovery distribution: give one, or one per node");
    require(sized(spec.internal, false), "internal waiting time: give one, or one per node");
    require(sized(spec.external, true), "external waiting time: give none, one, or one per node");
    if (spec.dependence == InternalDependence::Gumbel) require(spec.theta >= 1.0, "θ ≥ 1 required");
    if (spec.dependence == InternalDependence::Clayton) require(spec.theta > 0.0, "Clayton θ > 0 required");
}

SpreadRun simulate_nonmarkov(const Graph& g, const NonMarkovSpec& spec, const SpreadState& init, double horizon,
                             const SeedStream& seed)
{
    const std::size_t n = g.node_count();
    validate(spec, n);
    require(horizon > 0.0, "horizon must be positive");
    require(init.size() == n, "initial state size differs from node count");

    SpreadRun run;
    run.init = init;
    run.horizon = horizon;
    SpreadState x = init;
    Rng rng = seed.rng();
    std::vector<double> recovery_at(n, kInf);
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] == Compartment::I) recovery_at[i] = pick(spec.recovery, i).sample(rng);

    auto internal_copula = [&](std::size_t k) {
        switch (spec.dependence) {
        case InternalDependence::Gumbel: return dependence::Copula::gumbel(spec.theta, k);
        case InternalDependence::Clayton: return dependence::Copula::clayton(spec.theta, k);
        default: return dependence::Copula::independence(k);
        }
    };

    double t = 0.0;
    for (;;) {
        double best = kInf;
        std::size_t who = n;
        Cause cause = Cause::Recovery;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] == Compartment::I) {
                if (recovery_at[i] < best) {
                    best = recovery_at[i];
                    who = i;
                    cause = Cause::Recovery;
                }
                continue;
            }
            if (x[i] != Compartment::S) continue;
            std::size_t k = 0;
            for (auto j : g.neighbors(i))
                if (x[j] == Compartment::I) ++k;
            if (k > 0) {
                const auto u = internal_copula(k).sample(rng);
                for (double v : u) {
                    const double w = pick(spec.internal, i).quantile(std::clamp(v, 1e-300, 1.0 - 1e-16));
                    if (t + w < best) {
                        best = t + w;
                        who = i;
                        cause = Cause::Contact;
                    }
                }
            }
            if (!spec.external.empty()) {
                const double w = pick(spec.external, i).sample(rng);
                if (t + w < best) {
                    best = t + w;
                    who = i;
                    cause = Cause::External;
                }
            }
        }
        if (who == n || best > horizon) break;
        t = best;
        SpreadEvent ev{t, who, x[who], Compartment::I, cause};
        if (cause == Cause::Recovery) {
            ev.to = spec.model == Model::SIS ? Compartment::S : Compartment::R;
            recovery_at[who] = kInf;
        } else {
            recovery_at[who] = t + pick(spec.recovery, who).sample(rng);
        }
        x[who] = ev.to;
        run.events.push_back(ev);
    }
    return run;
}

}  // namespace cyber::netepidemic
