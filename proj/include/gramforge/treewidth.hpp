#pragma once

#include <vector>

#include "gramforge/graph.hpp"

namespace gramforge {

struct TreeDecomposition {
  std::vector<std::vector<int>> bags;
  std::vector<std::pair<int, int>> tree_edges;  // indices into bags
  int width = -1;                               // max bag size - 1
};

struct TreewidthResult {
  int width = -1;
  bool exact = false;
  TreeDecomposition decomposition;
};

/// Treewidth with a matching decomposition. Exact (subset dynamic program
/// over elimination prefixes) for n <= 20; min-fill heuristic upper bound
/// beyond that, flagged exact=false.
TreewidthResult treewidth(const Graph& g);

bool verify_tree_decomposition(const Graph& g, const TreeDecomposition& td);

/// Plan for gluing bag-local Gram factorizations along a k-tree: the root
/// bag is placed first, then each placement attaches one node to a k-clique
/// that is already placed.
struct KTreePlan {
  int k = 0;
  std::vector<int> root_bag;  // k+1 nodes (all nodes when n <= k+1)
  struct Placement {
    int node;
    std::vector<int> parent_clique;  // k nodes, already placed
  };
  std::vector<Placement> placements;
  Graph ktree;
  TreeDecomposition decomposition;
};

/// Embeds G into a k-tree on the same node set. Requires treewidth(G) <= k
/// (certified exactly for n <= 20, by the heuristic bound otherwise). For
/// n <= k+1 the result degenerates to the complete graph.
KTreePlan plan_ktree_embedding(const Graph& g, int k);

Graph embed_in_ktree(const Graph& g, int k);

}  // namespace gramforge
