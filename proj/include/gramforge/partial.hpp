#pragma once

#include <optional>
#include <vector>

#include "gramforge/config.hpp"
#include "gramforge/graph.hpp"
#include "gramforge/matrix.hpp"

namespace gramforge {

/// Partial symmetric matrix supported on the diagonal and the edges of a
/// graph. All n diagonal values are required; edge values align with
/// graph.edges() order.
struct PartialMatrix {
  Graph graph;
  std::vector<double> diag;
  std::vector<double> edge_values;

  PartialMatrix() = default;
  PartialMatrix(Graph g, std::vector<double> diag_values, std::vector<double> edge_vals);

  int n() const { return graph.node_count(); }
  double value(int i, int j) const;  // defined positions only
  bool specifies(int i, int j) const;

  /// Max |X_ij - value| over the specified positions.
  double residual_against(const SymmetricMatrix& x) const;

  /// Largest infinity-norm entry of the data, floored at 1 (scale for
  /// relative tolerances).
  double scale() const;
};

/// pi_{V union E}: keep diagonal and edge entries, forget the rest.
PartialMatrix project_to_graph(const SymmetricMatrix& x, const Graph& g);

/// If some fully specified clique block has an eigenvalue below -tol*scale,
/// returns that clique.
std::optional<std::vector<int>> find_non_psd_clique(const PartialMatrix& a, double tol = 1e-8);

/// Nonnegative-valued data on the edges of a graph (squared distances).
struct EdgeValues {
  Graph graph;
  std::vector<double> values;  // aligned with graph.edges()

  EdgeValues() = default;
  EdgeValues(Graph g, std::vector<double> vals);
  double value(int i, int j) const;
};

/// Covariance map: partial Gram data on G to squared-distance data on the
/// suspension of G (apex = node n): d_{i,apex} = x_ii and
/// d_ij = x_ii + x_jj - 2 x_ij on edges.
EdgeValues phi(const PartialMatrix& x);

/// Inverse of phi. The input graph must have a universal last node (the
/// apex) and nonnegative values.
PartialMatrix phi_inv(const EdgeValues& d);

/// Appends the origin to a configuration at the apex position (index n);
/// pairwise squared distances of the result realize phi(Gram(p)) entrywise
/// on the suspension's edges. Ambient dimension is kept (floored at 1).
GramConfiguration gram_to_edm_points(const GramConfiguration& p);

/// Extends x to the suspension of its graph with unit apex diagonal and
/// zero apex row.
PartialMatrix zero_extend(const PartialMatrix& x);

}  // namespace gramforge
