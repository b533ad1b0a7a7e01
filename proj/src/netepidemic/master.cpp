#include "cyber/netepidemic/master.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cyber/core/errors.hpp"

namespace cyber::netepidemic {

namespace {

std::size_t base_of(Model m) { return m == Model::SIS ? 2 : 3; }

std::size_t state_count(std::size_t n, Model m)
{
    std::size_t count = 1;
    for (std::size_t i = 0; i < n; ++i) count *= base_of(m);
    return count;
}

struct Transitions {
    std::vector<std::size_t> offsets;  // CSR over source states
    std::vector<std::size_t> targets;
    std::vector<double> rates;
    std::vector<double> exit;
};

Transitions build_transitions(const Graph& g, const SpreadParams& params)
{
    const std::size_t n = g.node_count();
    const std::size_t states = state_count(n, params.model);
    std::vector<std::size_t> power(n, 1);
    for (std::size_t i = 1; i < n; ++i) power[i] = power[i - 1] * base_of(params.model);

    Transitions tr;
    tr.offsets.reserve(states + 1);
    tr.exit.assign(states, 0.0);
    tr.offsets.push_back(0);
    for (std::size_t code = 0; code < states; ++code) {
        const auto x = decode_state(code, n, params.model);
        for (std::size_t i = 0; i < n; ++i) {
            double rate = 0.0;
            std::size_t target = code;
            if (x[i] == Compartment::I) {
                rate = params.gamma;
                target = params.model == Model::SIS ? code - power[i] : code + power[i];
            } else if (x[i] == Compartment::S) {
                std::size_t k = 0;
                for (auto j : g.neighbors(i))
                    if (x[j] == Compartment::I) ++k;
                rate = params.tau * static_cast<double>(k) + params.epsilon_at(i);
                target = code + power[i];
            }
            if (rate > 0.0) {
                tr.targets.push_back(target);
                tr.rates.push_back(rate);
                tr.exit[code] += rate;
            }
        }
        tr.offsets.push_back(tr.targets.size());
    }
    return tr;
}

// One uniformization step of length h: p <- p exp(Q h).
void propagate(const Transitions& tr, double lambda, double h, std::vector<double>& p, std::vector<double>& term,
               std::vector<double>& next)
{
    const double mean = lambda * h;
    const std::size_t states = p.size();
    term = p;
    double weight = std::exp(-mean);
    std::vector<double> acc(states);
    for (std::size_t s = 0; s < states; ++s) acc[s] = weight * term[s];
    double cumulative = weight;
    for (std::size_t k = 1; cumulative < 1.0 - 1e-14 && k < 100000; ++k) {
        // term <- term P with P = I + Q / lambda.
        for (std::size_t s = 0; s < states; ++s) next[s] = term[s] * (1.0 - tr.exit[s] / lambda);
        for (std::size_t s = 0; s < states; ++s) {
            if (term[s] == 0.0) continue;
            for (std::size_t e = tr.offsets[s]; e < tr.offsets[s + 1]; ++e)
                next[tr.targets[e]] += term[s] * tr.rates[e] / lambda;
        }
        term.swap(next);
        weight *= mean / static_cast<double>(k);
        cumulative += weight;
        for (std::size_t s = 0; s < states; ++s) acc[s] += weight * term[s];
    }
    p.swap(acc);
}

}  // namespace

std::size_t encode_state(const SpreadState& s, Model model)
{
    std::size_t code = 0;
    for (std::size_t i = s.size(); i-- > 0;) code = code * base_of(model) + static_cast<std::size_t>(s[i]);
    return code;
}

SpreadState decode_state(std::size_t code, std::size_t n, Model model)
{
    SpreadState s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<Compartment>(code % base_of(model));
        code /= base_of(model);
    }
    return s;
}

MasterSolution exact_master(const Graph& g, const SpreadParams& params, const SpreadState& init,
                            const std::vector<double>& times)
{
    const std::size_t n = g.node_count();
    require(init.size() == n, "initial state size differs from node count");
    for (auto c : init)
        require(params.model == Model::SIR || c != Compartment::R, "R compartment only exists under SIR");
    const std::size_t cap = params.model == Model::SIS ? kMasterMaxSis : kMasterMaxSir;
    if (n > cap)
        throw ModelError("state-space cap exceeded: " + std::to_string(n) + " nodes, at most " +
                              std::to_string(cap) + " supported");
    std::vector<double> p0(state_count(n, params.model), 0.0);
    p0[encode_state(init, params.model)] = 1.0;
    return exact_master(g, params, p0, times);
}

MasterSolution exact_master(const Graph& g, const SpreadParams& params, const std::vector<double>& init_distribution,
                            const std::vector<double>& times)
{
    const std::size_t n = g.node_count();
    validate(params, n);
    const std::size_t cap = params.model == Model::SIS ? kMasterMaxSis : kMasterMaxSir;
    if (n > cap)
        throw ModelError("state-space cap exceeded: " + std::to_string(n) + " nodes, at most " +
                              std::to_string(cap) + " supported");
    const std::size_t states = state_count(n, params.model);
    require(init_distribution.size() == states, "initial distribution has the wrong number of states");
    require(!times.empty() && times.front() >= 0.0, "time grid must be nonempty and nonnegative");
    for (std::size_t k = 1; k < times.size(); ++k) require(times[k] >= times[k - 1], "time grid must be nondecreasing");

    const auto tr = build_transitions(g, params);
    const double lambda = std::max(*std::max_element(tr.exit.begin(), tr.exit.end()), 1e-300);

    MasterSolution sol;
    sol.times = times;
    std::vector<double> p = init_distribution, term(states), next(states);
    double t = 0.0;
    for (double target : times) {
        while (target - t > 0.0) {
            // Keep lambda * h moderate so exp(-lambda h) stays well scaled.
            const double h = std::min(target - t, 20.0 / lambda);
            propagate(tr, lambda, h, p, term, next);
            t = (target - t <= 20.0 / lambda) ? target : t + h;
        }
        std::vector<double> inf(n, 0.0), sus(n, 0.0), rec(n, 0.0);
        for (std::size_t code = 0; code < states; ++code) {
            if (p[code] == 0.0) continue;
            std::size_t c = code;
            for (std::size_t i = 0; i < n; ++i) {
                const auto digit = c % base_of(params.model);
                c /= base_of(params.model);
                (digit == 0 ? sus : digit == 1 ? inf : rec)[i] += p[code];
            }
        }
        sol.infected.push_back(std::move(inf));
        sol.susceptible.push_back(std::move(sus));
        sol.recovered.push_back(std::move(rec));
        sol.mass.push_back(std::accumulate(p.begin(), p.end(), 0.0));
        sol.distribution.push_back(p);
    }
    return sol;
}

}  // namespace cyber::netepidemic
