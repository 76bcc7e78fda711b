#pragma once

#include <optional>
#include <vector>

#include "gramforge/graph.hpp"

namespace gramforge {

/// Witness that H is a minor of G: one connected branch set per H-node,
/// pairwise disjoint, with a G-edge between the sets of every H-edge.
struct MinorModel {
  std::vector<std::vector<int>> branch_sets;  // indexed by H-node
};

/// Exhaustive branch-and-bound search for an H-minor of G. Seeds one vertex
/// per H-node (H-nodes in decreasing degree order) and grows branch sets on
/// demand to satisfy H-edges. Exponential in the worst case; intended for
/// small H (<= 10 nodes) and G up to a few dozen nodes. Requires n <= 64.
std::optional<MinorModel> has_minor(const Graph& g, const Graph& h);

/// Re-verifies a minor model against the definition.
bool verify_minor_model(const Graph& g, const Graph& h, const MinorModel& model);

}  // namespace gramforge
