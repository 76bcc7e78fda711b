#include "gramforge/completion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gramforge/error.hpp"
#include "gramforge/numerics.hpp"
#include "gramforge/sdp.hpp"

namespace gramforge {

std::optional<std::string> completion_issue(const CompletionResult& r,
                                            const PartialMatrix& a,
                                            const RunConfig& cfg) {
  if (r.X.n() != a.n()) return "completion size differs from the data";
  if (!is_psd(r.X, cfg.tol_rank)) return "completion is not psd";
  int rank = numeric_rank(r.X, cfg.tol_rank);
  if (rank != r.rank)
    return "reported rank " + std::to_string(r.rank) + " but numeric rank is " +
           std::to_string(rank);
  double res = a.residual_against(r.X);
  if (res > cfg.tol_feas * a.scale())
    return "entry residual " + std::to_string(res) + " exceeds tolerance";
  return std::nullopt;
}

void check_completion(const CompletionResult& r, const PartialMatrix& a,
                      const RunConfig& cfg) {
  if (auto issue = completion_issue(r, a, cfg))
    fail(ErrorKind::NumericalConsistency, *issue);
}

namespace {

SymmetricMatrix principal_block(const Eigen::MatrixXd& x, const std::vector<int>& ids) {
  Eigen::MatrixXd b(ids.size(), ids.size());
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = 0; j < ids.size(); ++j) b(i, j) = x(ids[i], ids[j]);
  return SymmetricMatrix(b);
}

Eigen::MatrixXd factor_into(const SymmetricMatrix& block, int width, double tol_rank) {
  GramConfiguration f = gram_factor(block, tol_rank);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(block.n(), width);
  out.leftCols(std::min(width, f.dim())) = f.points.leftCols(std::min(width, f.dim()));
  if (f.dim() > width)
    fail(ErrorKind::NumericalConsistency, "bag block rank exceeds the ambient bound");
  return out;
}

SymmetricMatrix obtain_base_completion(const PartialMatrix& a,
                                       const std::optional<SymmetricMatrix>& x0,
                                       const RunConfig& cfg) {
  if (x0) {
    if (x0->n() != a.n())
      fail(ErrorKind::DimensionMismatch, "supplied completion has the wrong size");
    if (!is_psd(*x0, cfg.tol_rank))
      fail(ErrorKind::NotPsd, "supplied completion is not psd");
    if (a.residual_against(*x0) > cfg.tol_feas * a.scale())
      fail(ErrorKind::InfeasibleData, "supplied matrix does not complete the data");
    return *x0;
  }
  FeasibilityResult feas = psd_completion_feasible(a, cfg);
  if (!feas.completion)
    fail(ErrorKind::InfeasibleData, "data admits no psd completion");
  return *feas.completion;
}

}  // namespace

CompletionResult ktree_complete(const Graph& g, const PartialMatrix& a, int k,
                                const std::optional<SymmetricMatrix>& x0,
                                const RunConfig& cfg) {
  if (!(a.graph == g)) fail(ErrorKind::DimensionMismatch, "data graph mismatch");
  Eigen::MatrixXd base = obtain_base_completion(a, x0, cfg).mat();
  KTreePlan plan = plan_ktree_embedding(g, k);

  const int n = g.node_count();
  const int d = k + 1;
  Eigen::MatrixXd points = Eigen::MatrixXd::Zero(n, d);

  Eigen::MatrixXd root = factor_into(principal_block(base, plan.root_bag), d, cfg.tol_rank);
  for (size_t i = 0; i < plan.root_bag.size(); ++i)
    points.row(plan.root_bag[i]) = root.row(static_cast<int>(i));

  for (const auto& pl : plan.placements) {
    std::vector<int> ids = pl.parent_clique;
    ids.push_back(pl.node);
    Eigen::MatrixXd local = factor_into(principal_block(base, ids), d, cfg.tol_rank);

    const int s = static_cast<int>(pl.parent_clique.size());
    if (s == 0) {  // isolated placement: nothing to align against
      points.row(pl.node) = local.row(0);
      continue;
    }
    GramConfiguration from, onto;
    from.points = local.topRows(s);
    onto.points = Eigen::MatrixXd(s, d);
    for (int i = 0; i < s; ++i) onto.points.row(i) = points.row(pl.parent_clique[i]);
    std::vector<int> all(s);
    std::iota(all.begin(), all.end(), 0);
    Eigen::MatrixXd u = procrustes_align(from, onto, all);
    points.row(pl.node) = local.row(s) * u.transpose();
  }

  CompletionResult out;
  out.X = SymmetricMatrix(points * points.transpose());
  out.rank = numeric_rank(out.X, cfg.tol_rank);
  out.residual = a.residual_against(out.X);
  out.method = "ktree";
  if (out.residual > cfg.tol_feas * a.scale())
    fail(ErrorKind::NumericalConsistency, "glued completion drifted from the data");
  return out;
}

namespace {

void validate_shared_clique(const Graph& g, const std::vector<int>& shared,
                            const char* which) {
  std::set<int> seen;
  for (int v : shared) {
    if (v < 0 || v >= g.node_count())
      fail(ErrorKind::InvalidEdge, std::string("shared node out of range in ") + which);
    if (!seen.insert(v).second)
      fail(ErrorKind::InvalidEdge, std::string("duplicate shared node in ") + which);
  }
  if (!g.is_clique(shared))
    fail(ErrorKind::InvalidEdge, std::string("shared set is not a clique in ") + which);
}

}  // namespace

Graph clique_sum_union(const Graph& g1, const Graph& g2,
                       const std::vector<int>& shared1,
                       const std::vector<int>& shared2, std::vector<int>* map2) {
  if (shared1.size() != shared2.size())
    fail(ErrorKind::DimensionMismatch, "shared index lists differ in length");
  validate_shared_clique(g1, shared1, "part 1");
  validate_shared_clique(g2, shared2, "part 2");

  std::vector<int> to_union(g2.node_count(), -1);
  for (size_t t = 0; t < shared2.size(); ++t) to_union[shared2[t]] = shared1[t];
  int next = g1.node_count();
  for (int v = 0; v < g2.node_count(); ++v)
    if (to_union[v] < 0) to_union[v] = next++;

  std::set<Edge> edges(g1.edges().begin(), g1.edges().end());
  for (auto [u, v] : g2.edges()) edges.insert(normalized(to_union[u], to_union[v]));

  if (map2) *map2 = to_union;
  return Graph(next, std::vector<Edge>(edges.begin(), edges.end()));
}

CompletionResult clique_sum_complete(const PartialMatrix& a1, const PartialMatrix& a2,
                                     const std::vector<int>& shared1,
                                     const std::vector<int>& shared2, int k,
                                     const std::optional<SymmetricMatrix>& x1,
                                     const std::optional<SymmetricMatrix>& x2,
                                     const RunConfig& cfg) {
  if (k < 1) fail(ErrorKind::ParseError, "target rank must be at least 1");
  std::vector<int> to_union;
  Graph uni = clique_sum_union(a1.graph, a2.graph, shared1, shared2, &to_union);

  const double scale = std::max(a1.scale(), a2.scale());
  const double agree_tol = cfg.tol_feas * scale;
  const int s = static_cast<int>(shared1.size());
  for (int t = 0; t < s; ++t)
    if (std::abs(a1.diag[shared1[t]] - a2.diag[shared2[t]]) > agree_tol)
      fail(ErrorKind::InconsistentOverlap, "parts disagree on a shared diagonal entry");
  for (int t = 0; t < s; ++t)
    for (int u = t + 1; u < s; ++u)
      if (std::abs(a1.value(shared1[t], shared1[u]) - a2.value(shared2[t], shared2[u])) >
          agree_tol)
        fail(ErrorKind::InconsistentOverlap, "parts disagree on a shared edge entry");

  auto complete_part = [&](const PartialMatrix& a,
                           const std::optional<SymmetricMatrix>& x) -> CompletionResult {
    if (x) {
      CompletionResult r;
      r.X = SymmetricMatrix(obtain_base_completion(a, x, cfg).mat());
      r.rank = numeric_rank(r.X, cfg.tol_rank);
      r.residual = a.residual_against(r.X);
      r.method = "given";
      return r;
    }
    return ktree_complete(a.graph, a, k - 1, std::nullopt, cfg);
  };

  CompletionResult r1 = complete_part(a1, x1);
  if (s == a2.n()) return r1;  // part 2 adds no nodes and no edges
  CompletionResult r2 = complete_part(a2, x2);

  const int d = std::max({r1.rank, r2.rank, 1});
  Eigen::MatrixXd p1 = gram_factor(r1.X, cfg.tol_rank).padded(d).points;
  Eigen::MatrixXd p2 = gram_factor(r2.X, cfg.tol_rank).padded(d).points;

  GramConfiguration from, onto;
  from.points = Eigen::MatrixXd(s, d);
  onto.points = Eigen::MatrixXd(s, d);
  for (int t = 0; t < s; ++t) {
    from.points.row(t) = p2.row(shared2[t]);
    onto.points.row(t) = p1.row(shared1[t]);
  }
  std::vector<int> all(s);
  std::iota(all.begin(), all.end(), 0);
  Eigen::MatrixXd u = s > 0 ? procrustes_align(from, onto, all, 10 * cfg.tol_feas)
                            : Eigen::MatrixXd::Identity(d, d);

  Eigen::MatrixXd points(uni.node_count(), d);
  points.topRows(a1.n()) = p1;
  for (int v = 0; v < a2.n(); ++v)
    if (to_union[v] >= a1.n()) points.row(to_union[v]) = p2.row(v) * u.transpose();

  // combined data on the union graph, part 1 winning on the overlap
  std::vector<double> diag(uni.node_count());
  for (int i = 0; i < a1.n(); ++i) diag[i] = a1.diag[i];
  for (int v = 0; v < a2.n(); ++v)
    if (to_union[v] >= a1.n()) diag[to_union[v]] = a2.diag[v];
  std::vector<int> from2(uni.node_count(), -1);
  for (int v = 0; v < a2.n(); ++v) from2[to_union[v]] = v;
  std::vector<double> ev(uni.edge_count());
  for (int e = 0; e < uni.edge_count(); ++e) {
    auto [i, j] = uni.edges()[e];
    ev[e] = i < a1.n() && j < a1.n() && a1.graph.has_edge(i, j)
                ? a1.value(i, j)
                : a2.value(from2[i], from2[j]);
  }
  PartialMatrix combined(uni, std::move(diag), std::move(ev));

  CompletionResult out;
  out.X = SymmetricMatrix(points * points.transpose());
  out.rank = numeric_rank(out.X, cfg.tol_rank);
  out.residual = combined.residual_against(out.X);
  out.method = "clique-sum";
  if (out.residual > 10 * cfg.tol_feas * scale)
    fail(ErrorKind::NumericalConsistency, "glued parts drifted from the data");
  return out;
}

CompletionResult contract_lift(const Graph& g, Edge e, const PartialMatrix& a_contracted,
                               const Completer& completer, const RunConfig& cfg) {
  e = normalized(e.first, e.second);
  if (!g.has_edge(e.first, e.second))
    fail(ErrorKind::InvalidEdge, "contracted edge must exist in the host graph");
  Graph gc = contract_edge(g, e);
  if (!(a_contracted.graph == gc))
    fail(ErrorKind::DimensionMismatch, "data must live on the contracted graph");

  const int n = g.node_count();
  const auto [u, v] = e;
  auto down = [&, u = u, v = v](int i) {
    if (i == v) return u;
    if (i == n - 1 && v != n - 1) return v;
    return i;
  };

  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a_contracted.diag[down(i)];
  std::vector<double> ev(g.edge_count());
  for (int idx = 0; idx < g.edge_count(); ++idx) {
    auto [i, j] = g.edges()[idx];
    int mi = down(i), mj = down(j);
    ev[idx] = mi == mj ? a_contracted.diag[mi] : a_contracted.value(mi, mj);
  }
  PartialMatrix lifted(g, std::move(diag), std::move(ev));

  CompletionResult host = completer(lifted, cfg);

  std::vector<int> rep(n - 1);
  for (int w = 0; w < n - 1; ++w) rep[w] = (w == v && v != n - 1) ? n - 1 : w;
  Eigen::MatrixXd x(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) x(i, j) = host.X(rep[i], rep[j]);

  CompletionResult out;
  out.X = SymmetricMatrix(x);
  out.rank = numeric_rank(out.X, cfg.tol_rank);
  out.residual = a_contracted.residual_against(out.X);
  out.method = "contract-lift";
  return out;
}

CompletionResult apex_complete(const PartialMatrix& y, const Completer& inner, int,
                               const RunConfig& cfg) {
  const int total = y.n();
  if (total < 2) fail(ErrorKind::ParseError, "suspension needs at least two nodes");
  const int apex = total - 1;
  if (y.graph.degree(apex) != total - 1)
    fail(ErrorKind::ParseError, "apex (last node) must be adjacent to every other node");

  std::vector<int> base_ids(apex);
  std::iota(base_ids.begin(), base_ids.end(), 0);
  Graph base = y.graph.induced_subgraph(base_ids);

  const double alpha = y.diag[apex];
  const double scale = y.scale();
  const double tol = cfg.tol_feas * scale;
  if (alpha < -tol) fail(ErrorKind::NotPsd, "negative apex diagonal");

  Eigen::VectorXd border(apex);
  for (int i = 0; i < apex; ++i) border(i) = y.value(i, apex);

  Eigen::MatrixXd x(total, total);
  if (alpha <= tol) {
    for (int i = 0; i < apex; ++i) {
      double bound = std::sqrt(std::max(alpha, 0.0) * std::max(y.diag[i], 0.0));
      if (std::abs(border(i)) > bound + tol)
        fail(ErrorKind::NotPsd, "zero apex diagonal with a nonzero border entry");
    }
    std::vector<double> diag(y.diag.begin(), y.diag.begin() + apex);
    std::vector<double> ev(base.edge_count());
    for (int e = 0; e < base.edge_count(); ++e)
      ev[e] = y.value(base.edges()[e].first, base.edges()[e].second);
    CompletionResult z = inner(PartialMatrix(base, std::move(diag), std::move(ev)), cfg);
    x.setZero();
    x.topLeftCorner(apex, apex) = z.X.mat();
    x(apex, apex) = std::max(alpha, 0.0);
  } else {
    std::vector<double> diag(apex);
    for (int i = 0; i < apex; ++i) diag[i] = y.diag[i] - border(i) * border(i) / alpha;
    std::vector<double> ev(base.edge_count());
    for (int e = 0; e < base.edge_count(); ++e) {
      auto [i, j] = base.edges()[e];
      ev[e] = y.value(i, j) - border(i) * border(j) / alpha;
    }
    CompletionResult z = inner(PartialMatrix(base, std::move(diag), std::move(ev)), cfg);
    x.topLeftCorner(apex, apex) =
        z.X.mat() + border * border.transpose() / alpha;
    x.topRightCorner(apex, 1) = border;
    x.bottomLeftCorner(1, apex) = border.transpose();
    x(apex, apex) = alpha;
  }

  CompletionResult out;
  out.X = SymmetricMatrix(x);
  out.rank = numeric_rank(out.X, cfg.tol_rank);
  out.residual = y.residual_against(out.X);
  out.method = "apex";
  return out;
}

OctahedronWitness k222_witness() {
  const double r = std::sqrt(0.5);
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(6, 6);
  x(0, 5) = x(5, 0) = r;
  x(1, 5) = x(5, 1) = r;

  OctahedronWitness w;
  w.graph = named_graph("K2,2,2");
  w.X = SymmetricMatrix(x);
  w.x = project_to_graph(w.X, w.graph);
  w.singular_block = {0, 1, 5};
  w.kernel = Eigen::Vector3d(-r, -r, 1.0);
  // block-side endpoint first: row i sits in the singular block, so the
  // kernel identity along column j solves for the one unknown X(i, j)
  w.forced = {{0, 3, 0.0}, {1, 4, 0.0}, {5, 2, 0.0}};
  return w;
}

}  // namespace gramforge
