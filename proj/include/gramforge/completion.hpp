#pragma once

#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gramforge/config.hpp"
#include "gramforge/graph.hpp"
#include "gramforge/matrix.hpp"
#include "gramforge/minor.hpp"
#include "gramforge/partial.hpp"
#include "gramforge/treewidth.hpp"

namespace gramforge {

struct CompletionResult {
  SymmetricMatrix X;
  int rank = 0;
  double residual = 0;  // max |X_ij - a_ij| over the specified positions
  std::string method;
};

/// Completes partial data on a graph; used to plug one completion routine
/// into another (contract_lift, apex_complete).
using Completer = std::function<CompletionResult(const PartialMatrix&, const RunConfig&)>;

/// Empty when the result is a valid completion of a: psd, rank as reported,
/// entries matching within tol_feas. Otherwise a description of the first
/// violated condition.
std::optional<std::string> completion_issue(const CompletionResult& r,
                                            const PartialMatrix& a,
                                            const RunConfig& cfg = {});

/// Throws a numerical-consistency error when completion_issue is nonempty.
void check_completion(const CompletionResult& r, const PartialMatrix& a,
                      const RunConfig& cfg = {});

/// Rank <= k+1 completion of partial data on a graph of treewidth <= k:
/// factor the bag blocks of one global psd completion x0 (computed by the
/// feasibility solve when absent) and glue them along the clique tree with
/// orthogonal alignments.
CompletionResult ktree_complete(const Graph& g, const PartialMatrix& a, int k,
                                const std::optional<SymmetricMatrix>& x0 = std::nullopt,
                                const RunConfig& cfg = {});

/// Node set and labeling of the clique sum: part-1 labels are kept, part-2
/// nodes outside the shared set are appended in increasing label order.
/// map2, when given, receives the part-2 -> union label map.
Graph clique_sum_union(const Graph& g1, const Graph& g2,
                       const std::vector<int>& shared1,
                       const std::vector<int>& shared2,
                       std::vector<int>* map2 = nullptr);

/// Completes the clique sum of two partial matrices glued along a common
/// clique (shared1 in a1's labels paired with shared2 in a2's labels) to
/// rank <= k. Parts are completed by ktree_complete at width k-1 unless
/// completions are supplied.
CompletionResult clique_sum_complete(const PartialMatrix& a1, const PartialMatrix& a2,
                                     const std::vector<int>& shared1,
                                     const std::vector<int>& shared2, int k,
                                     const std::optional<SymmetricMatrix>& x1 = std::nullopt,
                                     const std::optional<SymmetricMatrix>& x2 = std::nullopt,
                                     const RunConfig& cfg = {});

/// Completes data on G/e by lifting it to G (duplicated node data, contracted
/// edge carrying the diagonal value), completing there, and restricting back
/// to G/e's node set.
CompletionResult contract_lift(const Graph& g, Edge e, const PartialMatrix& a_contracted,
                               const Completer& completer, const RunConfig& cfg = {});

/// Completes data on a suspension through the Schur complement at the apex
/// (the last node, adjacent to all others): complete the complement data on
/// the base graph with inner, then border back. rank = inner rank + 1 when
/// the apex diagonal is positive.
CompletionResult apex_complete(const PartialMatrix& y, const Completer& inner, int k,
                               const RunConfig& cfg = {});

enum class UpperRule { Edgeless, Forest, NoK4, NoK5NoK222, TreewidthPlusOne, Barvinok };

const char* upper_rule_name(UpperRule r);

/// Certified interval lower <= gd(G) <= upper with re-verifiable witnesses.
struct Certificate {
  int lower = 0;
  int upper = 0;
  std::string lower_tag;                  // "K<r>-minor" or "K222-minor"
  std::optional<MinorModel> lower_model;  // absent only when lower == 1
  UpperRule upper_rule = UpperRule::Barvinok;
  TreewidthResult tw;
  int barvinok_m = 0;
  int barvinok_bound = 0;
};

/// Lower bound: largest complete-minor order (searched up to 8), pushed to 5
/// by an octahedron minor. Upper bound: least applicable of the edgeless /
/// forest / no-K4 / no-K5-no-octahedron rules, treewidth+1, and the
/// spectrahedron rank bound floor((sqrt(8m+1)-1)/2) with m = |V|+|E|.
Certificate certify(const Graph& g);

/// Re-derives every claim the certificate makes: minor models check out,
/// absence rules re-search, the decomposition validates, bounds recompute.
bool verify_certificate(const Graph& g, const Certificate& c);

/// The octahedron witness: the graph, the projected partial data x, its
/// unique psd completion X of rank 5, the singular fully specified block
/// {0,1,5} with kernel (-1/sqrt2, -1/sqrt2, 1), and the three unspecified
/// entries that the kernel forces to zero.
struct OctahedronWitness {
  Graph graph;
  PartialMatrix x;
  SymmetricMatrix X;
  std::vector<int> singular_block;
  Eigen::Vector3d kernel;
  std::vector<std::tuple<int, int, double>> forced;
};
OctahedronWitness k222_witness();

}  // namespace gramforge
