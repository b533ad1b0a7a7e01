#include "cyber/netepidemic/losses.hpp"

#include <algorithm>
#include <cmath>

#include "cyber/core/errors.hpp"

namespace cyber::netepidemic {

double CostCurve::operator()(double x) const
{
    if (x <= 0.0) return 0.0;
    return a + b * std::pow(x, p);
}

void validate(const CostCurve& c)
{
    require(c.a >= 0.0 && c.b >= 0.0, "cost curve coefficients must be nonnegative");
    require(c.p > 0.0, "cost curve exponent must be positive");
}

std::vector<Episode> infection_episodes(const SpreadRun& run)
{
    const std::size_t n = run.init.size();
    std::vector<double> open(n, -1.0);
    for (std::size_t i = 0; i < n; ++i)
        if (run.init[i] == Compartment::I) open[i] = 0.0;
    std::vector<Episode> out;
    double last = 0.0;
    for (const auto& e : run.events) {
        if (e.node >= n) throw ValidationError("malformed log: node index out of range");
        if (e.time < last) throw ValidationError("malformed log: events out of order");
        last = e.time;
        if (e.to == Compartment::I) {
            if (open[e.node] >= 0.0) throw ValidationError("malformed log: infection of an infected node");
            open[e.node] = e.time;
        } else if (e.from == Compartment::I) {
            if (open[e.node] < 0.0) throw ValidationError("malformed log: recovery without infection");
            out.push_back({e.node, open[e.node], e.time, false});
            open[e.node] = -1.0;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (open[i] >= 0.0) out.push_back({i, open[i], run.horizon, true});
    return out;
}

std::vector<EventRecord> loss_indicator(const SpreadRun& run, const std::vector<double>& attack_times,
                                        const std::vector<severity::Distribution>& loss, const SeedStream& seed,
                                        RiskModule module)
{
    const std::size_t n = run.init.size();
    require(loss.size() == 1 || loss.size() == n, "loss distribution: give one, or one per node");
    for (double t : attack_times) {
        require(t >= 0.0, "attack times must be nonnegative");
        require(t <= run.horizon, "attack time beyond simulated horizon");
    }
    std::vector<EventRecord> out;
    out.reserve(attack_times.size() * n);
    for (std::size_t j = 0; j < attack_times.size(); ++j) {
        const SpreadState x = states_at(run, {attack_times[j]}).front();
        Rng rng = seed.child(j).rng();
        for (std::size_t i = 0; i < n; ++i) {
            const double l = (loss.size() == 1 ? loss.front() : loss[i]).sample(rng);
            out.push_back({attack_times[j], module, i, x[i] == Compartment::I ? l : 0.0});
        }
    }
    return out;
}

std::vector<EventRecord> loss_recovery_cost(const SpreadRun& run, const CostCurve& eta, const CostCurve& cost,
                                            const DataLossSpec& data_loss, const SeedStream& seed,
                                            RiskModule module)
{
    validate(eta);
    validate(cost);
    require(data_loss.a > 0.0 && data_loss.b > 0.0, "data-loss beta parameters must be positive");
    require(data_loss.d_max >= 0.0, "D_max must be nonnegative");
    auto episodes = infection_episodes(run);
    std::stable_sort(episodes.begin(), episodes.end(),
                     [](const Episode& l, const Episode& r) { return l.end < r.end; });
    const auto fraction = severity::Distribution::beta(data_loss.a, data_loss.b);
    Rng rng = seed.rng();
    std::vector<EventRecord> out;
    out.reserve(episodes.size());
    for (const auto& ep : episodes) {
        const double d = fraction.sample(rng) * data_loss.d_max;
        out.push_back({ep.end, module, ep.node, eta(d) + cost(ep.length())});
    }
    return out;
}

}  // namespace cyber::netepidemic
