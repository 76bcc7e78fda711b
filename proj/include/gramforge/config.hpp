#pragma once

#include <cstdint>

namespace gramforge {

/// Shared tolerance and determinism settings. Every module reads these from
/// the same record; the CLI overlays environment variables and flags on top.
struct RunConfig {
  double tol_rank = 1e-8;        // relative eigenvalue cutoff for numeric rank
  double tol_feas = 1e-7;        // entry agreement tolerance for completions
  double tol_gap = 1e-8;         // SDP duality gap tolerance
  double tol_comp = 1e-6;        // complementarity tolerance ||X * Omega||_F
  double tol_fit = 1e-10;        // fit oracle convergence threshold (sum of squares)
  double regularize_eps = 1e-6;  // diagonal regularization for boundary SDP data
  std::uint64_t seed = 0;
  int max_iters = 200;           // SDP iteration cap
};

}  // namespace gramforge
