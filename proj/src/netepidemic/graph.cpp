#include "cyber/netepidemic/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "cyber/core/errors.hpp"

namespace cyber::netepidemic {

Graph::Graph(std::size_t n) : adj_(n) {}

void Graph::add_edge(std::size_t i, std::size_t j)
{
    require(i < node_count() && j < node_count(), "edge endpoint out of range");
    require(i != j, "self-loops are not allowed");
    if (has_edge(i, j)) return;
    adj_[i].insert(std::upper_bound(adj_[i].begin(), adj_[i].end(), j), j);
    adj_[j].insert(std::upper_bound(adj_[j].begin(), adj_[j].end(), i), i);
    ++edges_;
}

bool Graph::has_edge(std::size_t i, std::size_t j) const
{
    return std::binary_search(adj_[i].begin(), adj_[i].end(), j);
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(edges_);
    for (std::size_t i = 0; i < adj_.size(); ++i)
        for (auto j : adj_[i])
            if (i < j) out.emplace_back(i, j);
    return out;
}

bool Graph::connected() const
{
    if (adj_.empty()) return true;
    std::vector<char> seen(adj_.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto w : adj_[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == adj_.size();
}

bool Graph::is_tree() const { return !adj_.empty() && edges_ + 1 == adj_.size() && connected(); }

Graph generate_er(std::size_t n, double p, const SeedStream& seed)
{
    require(n >= 1, "n >= 1 required");
    require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
    Graph g(n);
    Rng rng = seed.rng();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p) g.add_edge(i, j);
    return g;
}

Graph generate_ba(std::size_t n, std::size_t m, const SeedStream& seed)
{
    require(m >= 1 && n > m, "n > m_attach >= 1 required");
    Graph g(n);
    std::vector<std::size_t> endpoints;
    for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t j = i + 1; j <= m; ++j) {
            g.add_edge(i, j);
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    Rng rng = seed.rng();
    std::vector<std::size_t> targets;
    for (std::size_t v = m + 1; v < n; ++v) {
        targets.clear();
        while (targets.size() < m) {
            const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(endpoints.size()));
            const std::size_t t = endpoints[std::min(k, endpoints.size() - 1)];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (auto t : targets) {
            g.add_edge(v, t);
            endpoints.push_back(v);
            endpoints.push_back(t);
        }
    }
    return g;
}

Graph star(std::size_t n)
{
    require(n >= 1, "n >= 1 required");
    Graph g(n);
    for (std::size_t i = 1; i < n; ++i) g.add_edge(0, i);
    return g;
}

Graph complete(std::size_t n)
{
    require(n >= 1, "n >= 1 required");
    Graph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

Graph path(std::size_t n)
{
    require(n >= 1, "n >= 1 required");
    Graph g(n);
    for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

Graph tree(std::size_t branching, std::size_t depth)
{
    require(branching >= 1, "tree branching >= 1 required");
    std::size_t n = 1, level = 1;
    for (std::size_t d = 0; d < depth; ++d) {
        level *= branching;
        n += level;
    }
    Graph g(n);
    for (std::size_t v = 1; v < n; ++v) g.add_edge((v - 1) / branching, v);
    return g;
}

Graph triangle_pendant()
{
    Graph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    g.add_edge(2, 3);
    return g;
}

void write_edge_list(const Graph& g, std::ostream& out)
{
    out << g.node_count() << '\n';
    for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& in)
{
    std::size_t n = 0;
    require(static_cast<bool>(in >> n), "edge list: missing node count");
    Graph g(n);
    std::size_t i = 0, j = 0;
    while (in >> i >> j) g.add_edge(i, j);
    require(in.eof(), "edge list: malformed edge line");
    return g;
}

double spectral_radius(const Graph& g, double tolerance)
{
    const std::size_t n = g.node_count();
    if (n == 0 || g.edge_count() == 0) return 0.0;
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), w(n);
    double lambda = 0.0;
    for (int iter = 0; iter < 1000000; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = v[i];
            for (auto j : g.neighbors(i)) w[i] += v[j];
        }
        lambda = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
        const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
        if (std::sqrt(residual) < tolerance) break;
    }
    return lambda - 1.0;
}

}  // namespace cyber::netepidemic
