#include "cyber/netepidemic/spread.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cyber/core/errors.hpp"
#include "cyber/core/format.hpp"
#include "cyber/core/parallel.hpp"

namespace cyber::netepidemic {

char compartment_letter(Compartment c)
{
    switch (c) {
    case Compartment::S: return 'S';
    case Compartment::I: return 'I';
    default: return 'R';
    }
}

double SpreadParams::epsilon_at(std::size_t i) const
{
    if (epsilon.empty()) return 0.0;
    return epsilon.size() == 1 ? epsilon[0] : epsilon[i];
}

void validate(const SpreadParams& params, std::size_t n_nodes)
{
    require(params.tau >= 0.0 && std::isfinite(params.tau), "τ ≥ 0 required");
    require(params.gamma > 0.0 && std::isfinite(params.gamma), "γ > 0 required");
    require(params.epsilon.size() <= 1 || params.epsilon.size() == n_nodes,
            "ε must be a scalar or one value per node");
    for (double e : params.epsilon) require(e >= 0.0 && std::isfinite(e), "ε ≥ 0 required");
}

SpreadState seeded_state(std::size_t n, const std::vector<std::size_t>& infected)
{
    SpreadState s(n, Compartment::S);
    for (auto i : infected) {
        require(i < n, "initially infected node out of range");
        s[i] = Compartment::I;
    }
    return s;
}

namespace {

// Binary sum tree over per-node rates.
class RateTree {
public:
    explicit RateTree(std::size_t n) : size_(1)
    {
        while (size_ < n) size_ <<= 1;
        tree_.assign(2 * size_, 0.0);
    }

    void set(std::size_t i, double rate)
    {
        std::size_t k = i + size_;
        tree_[k] = rate;
        for (k >>= 1; k >= 1; k >>= 1) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
    }

    double total() const { return tree_[1]; }
    double at(std::size_t i) const { return tree_[i + size_]; }

    /// Leaf whose cumulative interval contains x in [0, total).
    std::size_t find(double x) const
    {
        std::size_t k = 1;
        while (k < size_) {
            if (x < tree_[2 * k] || tree_[2 * k + 1] <= 0.0) {
                k = 2 * k;
            } else {
                x -= tree_[2 * k];
                k = 2 * k + 1;
            }
        }
        return k - size_;
    }

private:
    std::size_t size_;
    std::vector<double> tree_;
};

}  // namespace

SpreadRun gillespie_spread(const Graph& g, const SpreadParams& params, const SpreadState& init, double horizon,
                           const SeedStream& seed)
{
    const std::size_t n = g.node_count();
    validate(params, n);
    require(horizon > 0.0, "horizon must be positive");
    require(init.size() == n, "initial state size differs from node count");
    for (auto c : init)
        require(params.model == Model::SIR || c != Compartment::R, "R compartment only exists under SIR");

    SpreadRun run;
    run.init = init;
    run.horizon = horizon;
    SpreadState x = init;
    std::vector<std::size_t> infected_neighbors(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] == Compartment::I)
            for (auto j : g.neighbors(i)) ++infected_neighbors[j];

    RateTree rates(std::max<std::size_t>(n, 1));
    auto node_rate = [&](std::size_t i) {
        switch (x[i]) {
        case Compartment::I: return params.gamma;
        case Compartment::S: return params.tau * static_cast<double>(infected_neighbors[i]) + params.epsilon_at(i);
        default: return 0.0;
        }
    };
    for (std::size_t i = 0; i < n; ++i) rates.set(i, node_rate(i));

    Rng rng = seed.rng();
    double t = 0.0;
    for (;;) {
        const double total = rates.total();
        if (total <= 1e-300) break;
        t += rng.exponential(total);
        if (t > horizon) break;
        const std::size_t i = rates.find(rng.uniform() * total);
        SpreadEvent ev;
        ev.time = t;
        ev.node = i;
        ev.from = x[i];
        if (x[i] == Compartment::I) {
            ev.to = params.model == Model::SIS ? Compartment::S : Compartment::R;
            ev.cause = Cause::Recovery;
            for (auto j : g.neighbors(i)) {
                --infected_neighbors[j];
                rates.set(j, node_rate(j));
            }
        } else {
            ev.to = Compartment::I;
            const double contact = params.tau * static_cast<double>(infected_neighbors[i]);
            ev.cause = rng.uniform() * rates.at(i) < contact ? Cause::Contact : Cause::External;
            for (auto j : g.neighbors(i)) {
                ++infected_neighbors[j];
                rates.set(j, node_rate(j));
            }
        }
        x[i] = ev.to;
        rates.set(i, node_rate(i));
        run.events.push_back(ev);
    }
    return run;
}

std::vector<SpreadState> states_at(const SpreadRun& run, const std::vector<double>& times)
{
    std::vector<std::size_t> order(times.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });
    std::vector<SpreadState> out(times.size());
    SpreadState x = run.init;
    std::size_t e = 0;
    for (auto k : order) {
        while (e < run.events.size() && run.events[e].time <= times[k]) {
            x[run.events[e].node] = run.events[e].to;
            ++e;
        }
        out[k] = x;
    }
    return out;
}

Compartment state_at(const SpreadRun& run, std::size_t node, double time)
{
    Compartment c = run.init.at(node);
    for (const auto& ev : run.events) {
        if (ev.time > time) break;
        if (ev.node == node) c = ev.to;
    }
    return c;
}

void write_event_csv(const SpreadRun& run, std::ostream& out)
{
    out << "time,node,from,to\n";
    for (const auto& ev : run.events)
        out << format_double(ev.time) << ',' << ev.node << ',' << compartment_letter(ev.from) << ','
            << compartment_letter(ev.to) << '\n';
}

double MarginalEstimate::standard_error(double p) const
{
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(replications));
}

MarginalEstimate estimate_marginals(const Graph& g, const SpreadParams& params, const SpreadState& init,
                                    const std::vector<double>& times, std::size_t n_reps, const SeedStream& seed)
{
    require(n_reps >= 1, "n_reps >= 1 required");
    require(!times.empty(), "time grid must be nonempty");
    const std::size_t n = g.node_count();
    const double horizon = std::max(*std::max_element(times.begin(), times.end()), 1e-12);
    // Tally per worker block of replications, then reduce in block order so
    // the sums do not depend on scheduling.
    constexpr std::size_t block = 1024;
    const std::size_t blocks = (n_reps + block - 1) / block;
    std::vector<std::vector<double>> tallies(blocks, std::vector<double>(times.size() * n * 3, 0.0));
    parallel_for(blocks, [&](std::size_t b) {
        auto& tally = tallies[b];
        for (std::size_t r = b * block; r < std::min(n_reps, (b + 1) * block); ++r) {
            const auto run = gillespie_spread(g, params, init, horizon, seed.child(r));
            const auto states = states_at(run, times);
            for (std::size_t k = 0; k < times.size(); ++k)
                for (std::size_t i = 0; i < n; ++i)
                    tally[(k * n + i) * 3 + static_cast<std::size_t>(states[k][i])] += 1.0;
        }
    });
    MarginalEstimate est;
    est.times = times;
    est.replications = n_reps;
    est.infected.assign(times.size(), std::vector<double>(n, 0.0));
    est.susceptible = est.infected;
    est.recovered = est.infected;
    const double scale = 1.0 / static_cast<double>(n_reps);
    for (const auto& tally : tallies)
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t i = 0; i < n; ++i) {
                est.susceptible[k][i] += tally[(k * n + i) * 3 + 0] * scale;
                est.infected[k][i] += tally[(k * n + i) * 3 + 1] * scale;
                est.recovered[k][i] += tally[(k * n + i) * 3 + 2] * scale;
            }
    return est;
}

}  // namespace cyber::netepidemic
