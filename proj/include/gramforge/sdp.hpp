#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gramforge/config.hpp"
#include "gramforge/graph.hpp"
#include "gramforge/matrix.hpp"
#include "gramforge/partial.hpp"

namespace gramforge {

enum class SdpSense { Max, Min };

/// Linear SDP over one dense psd block:
///   optimize <objective, X>  subject to  <A_j, X> = b_j, X psd.
struct SdpProblem {
  int n = 0;
  SymmetricMatrix objective;
  std::vector<SymmetricMatrix> constraints;
  std::vector<double> rhs;
  SdpSense sense = SdpSense::Max;

  void add_constraint(SymmetricMatrix a, double b);
};

enum class SdpStatus { Optimal, MaxIterations, NumericalTrouble };

struct SdpIterate {
  double pobj, dobj, mu, feas_p, feas_d;
};

/// Primal and dual answers for the canonical max form; for sense=min the
/// reported objective values are negated back while X, y, S refer to the
/// internal max form (documented in the format notes).
struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalTrouble;
  SymmetricMatrix X;
  std::vector<double> y;
  SymmetricMatrix S;
  double primal_objective = 0;
  double dual_objective = 0;
  double gap = 0;      // |pobj-dobj| / (1+|pobj|+|dobj|)
  double feas_p = 0;   // max_j |<A_j,X>-b_j| / (1+max|b|)
  double feas_d = 0;   // ||sum y A - C - S||_F / (1+||C||_F)
  int iterations = 0;
  bool dropped_dependent_constraints = false;
  std::vector<SdpIterate> trace;
};

/// Dense Nesterov-Todd scaled predictor-corrector interior-point method.
/// Deterministic; intended scale n <= 50, m <= 300.
SdpSolution sdp_solve(const SdpProblem& p, const RunConfig& cfg = {});

/// Feasibility via eigenvalue maximization: solves
///   max t  s.t.  X matches a on diagonal+edges, X - t I psd,
/// as a linear SDP. Returns the maximizing completion when t* >= -tol,
/// nullopt otherwise (no psd completion exists).
struct FeasibilityResult {
  std::optional<SymmetricMatrix> completion;
  double min_eig_value = 0;  // the optimal t
  bool boundary = false;     // t* within tolerance of zero
};
FeasibilityResult psd_completion_feasible(const PartialMatrix& a, const RunConfig& cfg = {});

/// Dual stress certificate for a stretched pair: Omega = sum_{ij in V+E}
/// w_ij E_ij - E_{e0} psd with E_ij = (e_i e_j^T + e_j e_i^T)/2. Stress
/// values are reported as entries of Omega, so the stretched pair carries
/// -1/2 at each of its two symmetric positions.
struct StressCertificate {
  Edge e0;
  SymmetricMatrix omega;
  std::vector<double> w_diag;            // Omega_ii over nodes
  std::vector<double> w_edges;           // Omega_ij aligned with graph edges
  double complementarity = 0;            // ||X Omega||_F at the solution
  double dual_value = 0;
};

struct StretchResult {
  SdpSolution solution;
  StressCertificate certificate;
  double optimum = 0;
  bool regularized = false;
  double regularize_eps_used = 0;
};

/// Maximizes X_{e0} over psd completions of a (e0 a non-edge), with the
/// dual stress matrix. Boundary data (only singular completions) triggers a
/// flagged three-stage diagonal regularization continuation.
StretchResult stretch(const Graph& g, const PartialMatrix& a, Edge e0,
                      const RunConfig& cfg = {});

/// Non-edge suggestion for stretching: maximizes min(deg i, deg j),
/// lexicographic tie-break.
std::optional<Edge> suggest_stretch_pair(const Graph& g);

/// Max row norm of Omega * P over nodes: the force-balance residual of the
/// stress at configuration p.
double equilibrium_residual(const GramConfiguration& p, const StressCertificate& cert);

struct RankReduceResult {
  SymmetricMatrix X;
  int rank = 0;
  std::vector<int> rank_path;  // numeric rank after each successful step
  bool stalled = false;
};

/// Moves a feasible X along constraint-null directions supported on its
/// range to the psd boundary until rank r satisfies r(r+1)/2 <= m (m
/// counting the objective when preserve_objective).
RankReduceResult rank_reduce(const SdpProblem& p, const SymmetricMatrix& x,
                             bool preserve_objective = false, const RunConfig& cfg = {});

/// Max-cut relaxation of an unweighted graph: maximize <L/4, X> with unit
/// diagonal.
SdpProblem maxcut_relaxation(const Graph& g);

/// Union of the off-diagonal supports of objective and constraints.
Graph aggregated_sparsity(const SdpProblem& p);

}  // namespace gramforge
