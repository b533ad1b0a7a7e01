#include "cyber/netepidemic/closure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <boost/numeric/odeint.hpp>

#include "cyber/core/errors.hpp"
#include "cyber/netepidemic/master.hpp"

namespace cyber::netepidemic {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

ClosureScheme parse_closure_scheme(const std::string& name)
{
    if (name == "nimfa") return ClosureScheme::Nimfa;
    if (name == "split-independent") return ClosureScheme::SplitIndependent;
    if (name == "split-hilbert" || name == "hilbert") return ClosureScheme::SplitHilbert;
    if (name == "kirkwood-pair" || name == "pair") return ClosureScheme::KirkwoodPair;
    throw ValidationError("unknown closure scheme '" + name +
                          "' (allowed: nimfa, split-independent, split-hilbert, kirkwood-pair)");
}

std::string closure_scheme_name(ClosureScheme scheme)
{
    switch (scheme) {
    case ClosureScheme::Nimfa: return "nimfa";
    case ClosureScheme::SplitIndependent: return "split-independent";
    case ClosureScheme::SplitHilbert: return "split-hilbert";
    default: return "kirkwood-pair";
    }
}

void validate(const ClosureSpec& spec, Model model)
{
    switch (spec.scheme) {
    case ClosureScheme::Nimfa: require(spec.order == 1, "NIMFA closure has order 1"); break;
    case ClosureScheme::KirkwoodPair: require(spec.order == 2, "pair closure has order 2"); break;
    default:
        require(spec.order == 1 || spec.order == 2, "split closures have order 1 or 2");
        require(spec.order == 1 || model == Model::SIS, "order-2 split closures are available for SIS only");
    }
}

namespace {

double hilbert(double a, double b) { return std::sqrt(std::max(a, 0.0) * std::max(b, 0.0)); }

// First-order closures: E[B_i B_j] ~ H(E[B_i], E[B_j]).
struct FirstOrder {
    const Graph& g;
    const SpreadParams& p;
    bool use_sqrt;

    double h(double a, double b) const { return use_sqrt ? hilbert(a, b) : a * b; }

    void operator()(const State& x, State& dx, double) const
    {
        const std::size_t n = g.node_count();
        if (p.model == Model::SIS) {
            for (std::size_t i = 0; i < n; ++i) {
                double contact = 0.0;
                for (auto j : g.neighbors(i)) contact += x[j] - h(x[i], x[j]);
                dx[i] = -p.gamma * x[i] + p.tau * contact + p.epsilon_at(i) * (1.0 - x[i]);
            }
        } else {
            // x[0..n) = S, x[n..2n) = I
            for (std::size_t i = 0; i < n; ++i) {
                double contact = 0.0;
                for (auto j : g.neighbors(i)) contact += h(x[i], x[n + j]);
                const double flux = p.tau * contact + p.epsilon_at(i) * x[i];
                dx[i] = -flux;
                dx[n + i] = flux - p.gamma * x[n + i];
            }
        }
    }
};

// Second-order split closure for SIS: tracks x_i = E[I_i] and
// y_ij = E[I_i I_j] for all pairs; triples are split into a pair and a
// singleton chosen to minimize edges cut (fewest in-triple edges at the
// singleton, ties to the lowest index).
class SplitPair {
public:
    SplitPair(const Graph& g, const SpreadParams& p, bool use_sqrt) : g_(g), p_(p), sqrt_(use_sqrt)
    {
        const std::size_t n = g.node_count();
        index_.assign(n * n, 0);
        std::size_t k = n;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                index_[i * n + j] = k;
                index_[j * n + i] = k;
                ++k;
            }
        for (std::size_t i = 0; i < n; ++i) index_[i * n + i] = i;
        size_ = k;
    }

    std::size_t size() const { return size_; }
    std::size_t pair(std::size_t i, std::size_t j) const { return index_[i * g_.node_count() + j]; }

    double triple(const State& x, std::size_t a, std::size_t b, std::size_t c) const
    {
        const int ea = int(g_.has_edge(a, b)) + int(g_.has_edge(a, c));
        const int eb = int(g_.has_edge(b, a)) + int(g_.has_edge(b, c));
        const int ec = int(g_.has_edge(c, a)) + int(g_.has_edge(c, b));
        std::array<std::pair<int, std::size_t>, 3> cand{{{ea, a}, {eb, b}, {ec, c}}};
        std::sort(cand.begin(), cand.end());
        const double pair_moment = x[pair(cand[1].second, cand[2].second)];
        const std::size_t s = cand[0].second;
        return sqrt_ ? hilbert(pair_moment, x[s]) : pair_moment * x[s];
    }

    void operator()(const State& x, State& dx, double) const
    {
        const std::size_t n = g_.node_count();
        const double tau = p_.tau, gamma = p_.gamma;
        for (std::size_t i = 0; i < n; ++i) {
            double contact = 0.0;
            for (auto k : g_.neighbors(i)) contact += x[k] - x[pair(i, k)];
            dx[i] = -gamma * x[i] + tau * contact + p_.epsilon_at(i) * (1.0 - x[i]);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const std::size_t ij = pair(i, j);
                double d = -2.0 * gamma * x[ij];
                // i infected by a neighbor k while j is infected, and vice versa.
                for (auto k : g_.neighbors(i)) {
                    if (k == j) d += tau * (x[j] - x[ij]);
                    else d += tau * (x[pair(j, k)] - triple(x, i, j, k));
                }
                for (auto k : g_.neighbors(j)) {
                    if (k == i) d += tau * (x[i] - x[ij]);
                    else d += tau * (x[pair(i, k)] - triple(x, i, j, k));
                }
                d += p_.epsilon_at(i) * (x[j] - x[ij]) + p_.epsilon_at(j) * (x[i] - x[ij]);
                dx[ij] = d;
            }
    }

private:
    const Graph& g_;
    const SpreadParams& p_;
    bool sqrt_;
    std::vector<std::size_t> index_;
    std::size_t size_ = 0;
};

// Pair-based (Kirkwood k = 2) model on joint state tables: node marginals
// P_i(c) and, for every edge, P_ij(a, b).
class PairModel {
public:
    PairModel(const Graph& g, const SpreadParams& p) : g_(g), p_(p), q_(p.model == Model::SIS ? 2 : 3)
    {
        edges_ = g.edges();
        for (std::size_t e = 0; e < edges_.size(); ++e) edge_id_[edges_[e]] = e;
    }

    std::size_t size() const { return g_.node_count() * q_ + edges_.size() * q_ * q_; }

    std::size_t node(std::size_t i, std::size_t c) const { return i * q_ + c; }

    /// Offset of P_ij(a, b) regardless of orientation.
    std::size_t joint(std::size_t i, std::size_t j, std::size_t a, std::size_t b) const
    {
        const bool flip = i > j;
        const auto e = edge_id_.at(flip ? std::make_pair(j, i) : std::make_pair(i, j));
        const std::size_t base = g_.node_count() * q_ + e * q_ * q_;
        return flip ? base + b * q_ + a : base + a * q_ + b;
    }

    State initial(const SpreadState& init) const
    {
        State x(size(), 0.0);
        for (std::size_t i = 0; i < init.size(); ++i) x[node(i, static_cast<std::size_t>(init[i]))] = 1.0;
        for (const auto& [i, j] : edges_)
            x[joint(i, j, static_cast<std::size_t>(init[i]), static_cast<std::size_t>(init[j]))] = 1.0;
        return x;
    }

    std::size_t fallbacks() const { return fallbacks_; }

    // E[I_k S_i B_j] for the path k - i - j.
    double triple(const State& x, std::size_t k, std::size_t i, std::size_t j, std::size_t b) const
    {
        constexpr std::size_t S = 0, I = 1;
        const double ki = x[joint(k, i, I, S)];
        const double ij = x[joint(i, j, S, b)];
        if (!g_.has_edge(k, j)) {
            const double den = x[node(i, S)];
            if (den < 1e-12) {
                ++fallbacks_;
                return x[node(k, I)] * x[node(i, S)] * x[node(j, b)];
            }
            return ki * ij / den;
        }
        const double kj = x[joint(k, j, I, b)];
        const double den = x[node(k, I)] * x[node(i, S)] * x[node(j, b)];
        if (den < 1e-12) {
            ++fallbacks_;
            return den;
        }
        return ki * ij * kj / den;
    }

    void operator()(const State& x, State& dx, double) const
    {
        constexpr std::size_t S = 0, I = 1;
        const std::size_t healed = p_.model == Model::SIS ? S : 2;
        std::fill(dx.begin(), dx.end(), 0.0);
        for (std::size_t i = 0; i < g_.node_count(); ++i) {
            double flux = p_.epsilon_at(i) * x[node(i, S)];
            for (auto k : g_.neighbors(i)) flux += p_.tau * x[joint(i, k, S, I)];
            const double recovery = p_.gamma * x[node(i, I)];
            dx[node(i, S)] -= flux;
            dx[node(i, I)] += flux - recovery;
            dx[node(i, healed)] += recovery;
        }
        for (const auto& [u, v] : edges_) {
            // Transitions of one endpoint (self) with the other (other) fixed.
            auto endpoint = [&](std::size_t self, std::size_t other) {
                for (std::size_t b = 0; b < q_; ++b) {
                    const double pair_sb = x[joint(self, other, S, b)];
                    double flux = (p_.epsilon_at(self) + (b == I ? p_.tau : 0.0)) * pair_sb;
                    for (auto k : g_.neighbors(self))
                        if (k != other) flux += p_.tau * triple(x, k, self, other, b);
                    dx[joint(self, other, S, b)] -= flux;
                    dx[joint(self, other, I, b)] += flux;
                    const double recovery = p_.gamma * x[joint(self, other, I, b)];
                    dx[joint(self, other, I, b)] -= recovery;
                    dx[joint(self, other, healed, b)] += recovery;
                }
            };
            endpoint(u, v);
            endpoint(v, u);
        }
    }

private:
    const Graph& g_;
    const SpreadParams& p_;
    std::size_t q_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_id_;
    mutable std::size_t fallbacks_ = 0;
};

template <class System, class Extract>
void integrate(System& system, State x, const std::vector<double>& times, Extract&& extract)
{
    std::vector<double> grid;
    const bool prepend = times.front() > 0.0;
    if (prepend) grid.push_back(0.0);
    grid.insert(grid.end(), times.begin(), times.end());
    bool skip = prepend;
    auto observer = [&](const State& s, double) {
        if (skip) {
            skip = false;
            return;
        }
        extract(s);
    };
    if (grid.size() == 1 || grid.back() == grid.front()) {
        for (std::size_t k = prepend ? 1 : 0; k < grid.size(); ++k) extract(x);
        return;
    }
    try {
        auto stepper = odeint::make_dense_output(1e-12, 1e-10, odeint::runge_kutta_dopri5<State>());
        const double dt = std::max((grid.back() - grid.front()) * 1e-4, 1e-8);
        odeint::integrate_times(stepper, std::ref(system), x, grid.begin(), grid.end(), dt, observer);
    } catch (const std::exception& e) {
        throw ModelError(std::string("ODE integration failure: ") + e.what());
    }
}

}  // namespace

ClosureSolution solve_closure(const Graph& g, const SpreadParams& params, const SpreadState& init,
                              const ClosureSpec& spec, const std::vector<double>& times)
{
    const std::size_t n = g.node_count();
    validate(params, n);
    validate(spec, params.model);
    require(init.size() == n, "initial state size differs from node count");
    require(!times.empty() && times.front() >= 0.0, "time grid must be nonempty and nonnegative");
    for (std::size_t k = 1; k < times.size(); ++k) require(times[k] > times[k - 1], "time grid must be increasing");
    for (auto c : init)
        require(params.model == Model::SIR || c != Compartment::R, "R compartment only exists under SIR");

    ClosureSolution sol;
    sol.times = times;
    auto record = [&](std::vector<double> inf, std::vector<double> sus) {
        std::vector<char> flags(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (inf[i] < 0.0 || inf[i] > 1.0) {
                flags[i] = 1;
                ++sol.clamp_count;
                inf[i] = std::clamp(inf[i], 0.0, 1.0);
            }
            sus[i] = std::clamp(sus[i], 0.0, 1.0);
        }
        sol.infected.push_back(std::move(inf));
        sol.susceptible.push_back(std::move(sus));
        sol.clamped.push_back(std::move(flags));
    };

    if (spec.scheme == ClosureScheme::KirkwoodPair) {
        PairModel model(g, params);
        sol.equations = model.size();
        integrate(model, model.initial(init), times, [&](const State& s) {
            std::vector<double> inf(n), sus(n);
            for (std::size_t i = 0; i < n; ++i) {
                inf[i] = s[model.node(i, 1)];
                sus[i] = s[model.node(i, 0)];
            }
            record(std::move(inf), std::move(sus));
        });
        sol.fallback_count = model.fallbacks();
        return sol;
    }

    const bool use_sqrt = spec.scheme == ClosureScheme::SplitHilbert;
    if (spec.order == 2) {
        require(n <= 400, "order-2 split closure supports at most 400 nodes");
        SplitPair model(g, params, use_sqrt);
        sol.equations = model.size();
        State x(model.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                x[model.pair(i, j)] = (init[i] == Compartment::I && init[j] == Compartment::I) ? 1.0 : 0.0;
        integrate(model, x, times, [&](const State& s) {
            std::vector<double> inf(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n)), sus(n);
            for (std::size_t i = 0; i < n; ++i) sus[i] = 1.0 - inf[i];
            record(std::move(inf), std::move(sus));
        });
        return sol;
    }

    FirstOrder model{g, params, use_sqrt};
    if (params.model == Model::SIS) {
        sol.equations = n;
        State x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = init[i] == Compartment::I ? 1.0 : 0.0;
        integrate(model, x, times, [&](const State& s) {
            std::vector<double> inf(s.begin(), s.end()), sus(n);
            for (std::size_t i = 0; i < n; ++i) sus[i] = 1.0 - inf[i];
            record(std::move(inf), std::move(sus));
        });
    } else {
        sol.equations = 2 * n;
        State x(2 * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = init[i] == Compartment::S ? 1.0 : 0.0;
            x[n + i] = init[i] == Compartment::I ? 1.0 : 0.0;
        }
        integrate(model, x, times, [&](const State& s) {
            std::vector<double> sus(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
            std::vector<double> inf(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
            record(std::move(inf), std::move(sus));
        });
    }
    return sol;
}

ThresholdResult nimfa_threshold(const Graph& g, const SpreadParams& params)
{
    validate(params, g.node_count());
    ThresholdResult r;
    r.spectral_radius = spectral_radius(g);
    r.ratio = params.tau / params.gamma;
    r.regime = r.ratio * r.spectral_radius < 1.0 - 1e-9 ? Criticality::Subcritical : Criticality::Supercritical;
    return r;
}

double pair_closure_sir_tree_check(const Graph& tree, const SpreadParams& params, const SpreadState& init,
                                   const std::vector<double>& times)
{
    if (!tree.is_tree()) throw ValidationError("non-tree input");
    require(params.model == Model::SIR, "tree check applies to the SIR model");
    const auto exact = exact_master(tree, params, init, times);
    const auto pair = solve_closure(tree, params, init, {ClosureScheme::KirkwoodPair, 2}, times);
    double dev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
        for (std::size_t i = 0; i < tree.node_count(); ++i) {
            dev = std::max(dev, std::abs(pair.infected[k][i] - exact.infected[k][i]));
            dev = std::max(dev, std::abs(pair.susceptible[k][i] - exact.susceptible[k][i]));
        }
    return dev;
}

}  // namespace cyber::netepidemic
