#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cyber/core/random.hpp"

namespace cyber::netepidemic {

/// Simple undirected graph on nodes 0..n-1 with sorted adjacency lists.
class Graph {
public:
    explicit Graph(std::size_t n = 0);

    void add_edge(std::size_t i, std::size_t j);

    std::size_t node_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edges_; }
    bool has_edge(std::size_t i, std::size_t j) const;
    const std::vector<std::size_t>& neighbors(std::size_t i) const { return adj_[i]; }
    std::size_t degree(std::size_t i) const { return adj_[i].size(); }

    /// Edges (i, j) with i < j in lexicographic order.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    bool connected() const;
    bool is_tree() const;

private:
    std::vector<std::vector<std::size_t>> adj_;
    std::size_t edges_ = 0;
};

Graph generate_er(std::size_t n, double p, const SeedStream& seed);
/// Seed clique on m + 1 nodes; every later node attaches m edges to distinct
/// existing nodes chosen with probability proportional to degree.
Graph generate_ba(std::size_t n, std::size_t m, const SeedStream& seed);

Graph star(std::size_t n);
Graph complete(std::size_t n);
Graph path(std::size_t n);
/// Complete tree with the given branching factor and depth, nodes numbered
/// breadth-first from the root.
Graph tree(std::size_t branching, std::size_t depth);
/// Triangle 0-1-2 with a pendant node 3 attached to node 2.
Graph triangle_pendant();

/// Header line n_nodes, then one "i j" line per edge (i < j).
void write_edge_list(const Graph& g, std::ostream& out);
Graph read_edge_list(std::istream& in);

/// Largest eigenvalue of the adjacency matrix by power iteration on A + I.
double spectral_radius(const Graph& g, double tolerance = 1e-9);

}  // namespace cyber::netepidemic
