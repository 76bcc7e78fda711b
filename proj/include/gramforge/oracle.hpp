#pragma once

#include <cstdint>
#include <optional>

#include "gramforge/graph.hpp"
#include "gramforge/matrix.hpp"
#include "gramforge/partial.hpp"

namespace gramforge {

struct FitOptions {
  int restarts = 20;
  int iters = 2000;
  std::uint64_t seed = 0;
  double tol = 1e-10;  // residual threshold for convergence
  /// Optional extra start used as restart 0 (n x k, wider inputs are
  /// truncated to the leading columns, narrower ones zero-padded).
  std::optional<Eigen::MatrixXd> init;
};

struct FitResult {
  GramConfiguration points;
  double residual = 0;     // sum of squares, recomputed from the points
  int restarts_used = 0;   // index of the start that produced the points
  bool converged = false;
};

/// Sum of squared deviations of <p_i, p_j> from the data over the diagonal
/// and the graph's edges.
double gram_fit_residual(const GramConfiguration& p, const PartialMatrix& a);

/// Sum of squared deviations of ||p_i - p_j||^2 from the values over the
/// graph's edges.
double edm_fit_residual(const GramConfiguration& p, const EdgeValues& d);

/// Searches for n points in R^k whose Gram matrix matches a on diagonal and
/// edges: gradient descent with Barzilai-Borwein steps and backtracking,
/// over seeded random restarts plus one warm start from a feasibility
/// completion. Failure to converge is evidence, never a certificate.
FitResult lowrank_fit(const PartialMatrix& a, int k, const FitOptions& opt = {});

/// Same machinery for squared-distance data; the returned points are
/// translated so point 0 sits at the origin.
FitResult edm_fit(const EdgeValues& d, int k, const FitOptions& opt = {});

/// Smallest k <= kmax admitting unit vectors orthogonal across the
/// complement's edges (i.e. across non-adjacent pairs of g): runs
/// lowrank_fit on the complement with unit diagonal and zero edge values.
std::optional<int> orthogonality_dimension_search(const Graph& g, int kmax,
                                                  const FitOptions& opt = {});

/// Exhaustive clique and chromatic numbers, n <= 12.
int clique_number_bf(const Graph& g);
int chromatic_number_bf(const Graph& g);

}  // namespace gramforge
