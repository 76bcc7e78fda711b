#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gramforge {

/// Undirected edge, normalized to first < second.
using Edge = std::pair<int, int>;

Edge normalized(int i, int j);

/// Simple undirected graph on nodes 0..n-1. Immutable after construction;
/// all operations return new graphs. Edges are kept sorted and normalized,
/// with no self-loops or duplicates.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<Edge> edges);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const;
  int degree(int v) const;
  bool has_edge(int i, int j) const;
  int edge_index(int i, int j) const;  // position in edges(), -1 if absent

  /// Adjacency bitmask of v; requires node_count() <= 64.
  std::uint64_t adjacency_mask(int v) const;

  bool is_clique(const std::vector<int>& nodes) const;
  Graph complement() const;
  Graph induced_subgraph(const std::vector<int>& nodes) const;
  std::vector<std::vector<int>> connected_components() const;

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
};

Graph delete_edge(const Graph& g, Edge e);

/// Contracts edge (u,v), u < v: u absorbs v, the largest label moves into
/// the freed slot v, parallel edges collapse.
Graph contract_edge(const Graph& g, Edge e);

/// Adds node n adjacent to all of 0..n-1.
Graph suspension(const Graph& g);

/// k-fold iterated suspension.
Graph apex_iterate(const Graph& g, int k);

/// Canonical named graphs: K<n>, K<n>,<m>, K2,2,2, C<n>, V8, C5xC2,
/// Petersen. Labelings are frozen and documented in the format notes.
Graph named_graph(const std::string& name);

}  // namespace gramforge
