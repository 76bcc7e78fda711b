#include "gramforge/partial.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "gramforge/error.hpp"
#include "gramforge/numerics.hpp"

namespace gramforge {

PartialMatrix::PartialMatrix(Graph g, std::vector<double> diag_values,
                             std::vector<double> edge_vals)
    : graph(std::move(g)), diag(std::move(diag_values)), edge_values(std::move(edge_vals)) {
  if (static_cast<int>(diag.size()) != graph.node_count())
    fail(ErrorKind::ParseError, "need one diagonal value per node");
  if (static_cast<int>(edge_values.size()) != graph.edge_count())
    fail(ErrorKind::ParseError, "need one value per graph edge");
}

double PartialMatrix::value(int i, int j) const {
  if (i == j) {
    if (i < 0 || i >= n()) fail(ErrorKind::DimensionMismatch, "node out of range");
    return diag[i];
  }
  int e = graph.edge_index(i, j);
  if (e < 0) fail(ErrorKind::InvalidEdge, "entry not specified by the graph");
  return edge_values[e];
}

bool PartialMatrix::specifies(int i, int j) const {
  if (i == j) return i >= 0 && i < n();
  return graph.has_edge(i, j);
}

double PartialMatrix::residual_against(const SymmetricMatrix& x) const {
  if (x.n() != n()) fail(ErrorKind::DimensionMismatch, "size mismatch");
  double r = 0;
  for (int i = 0; i < n(); ++i) r = std::max(r, std::abs(x(i, i) - diag[i]));
  const auto& es = graph.edges();
  for (size_t e = 0; e < es.size(); ++e)
    r = std::max(r, std::abs(x(es[e].first, es[e].second) - edge_values[e]));
  return r;
}

double PartialMatrix::scale() const {
  double s = 1.0;
  for (double v : diag) s = std::max(s, std::abs(v));
  for (double v : edge_values) s = std::max(s, std::abs(v));
  return s;
}

PartialMatrix project_to_graph(const SymmetricMatrix& x, const Graph& g) {
  if (x.n() != g.node_count()) fail(ErrorKind::DimensionMismatch, "size mismatch");
  std::vector<double> diag(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) diag[i] = x(i, i);
  std::vector<double> ev;
  ev.reserve(g.edge_count());
  for (auto [i, j] : g.edges()) ev.push_back(x(i, j));
  return PartialMatrix(g, std::move(diag), std::move(ev));
}

namespace {

// Bron-Kerbosch with pivoting, maximal cliques as sorted vertex lists.
void bron_kerbosch(const Graph& g, std::uint64_t r, std::uint64_t p, std::uint64_t x,
                   std::vector<std::vector<int>>& out) {
  if (p == 0 && x == 0) {
    std::vector<int> clique;
    std::uint64_t s = r;
    while (s) {
      int v = std::countr_zero(s);
      s &= s - 1;
      clique.push_back(v);
    }
    out.push_back(clique);
    return;
  }
  std::uint64_t px = p | x;
  int pivot = std::countr_zero(px);
  std::uint64_t candidates = p & ~g.adjacency_mask(pivot);
  while (candidates) {
    int v = std::countr_zero(candidates);
    candidates &= candidates - 1;
    std::uint64_t bit = std::uint64_t{1} << v;
    std::uint64_t nb = g.adjacency_mask(v);
    bron_kerbosch(g, r | bit, p & nb, x & nb, out);
    p &= ~bit;
    x |= bit;
  }
}

}  // namespace

std::optional<std::vector<int>> find_non_psd_clique(const PartialMatrix& a, double tol) {
  const Graph& g = a.graph;
  std::vector<std::vector<int>> cliques;
  std::uint64_t all =
      g.node_count() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.node_count()) - 1;
  bron_kerbosch(g, 0, all, 0, cliques);
  double s = a.scale();
  for (const auto& clique : cliques) {
    int m = static_cast<int>(clique.size());
    Eigen::MatrixXd block(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) block(r, c) = a.value(clique[r], clique[c]);
    if (!is_psd(SymmetricMatrix(block), tol * s)) return clique;
  }
  return std::nullopt;
}

EdgeValues::EdgeValues(Graph g, std::vector<double> vals)
    : graph(std::move(g)), values(std::move(vals)) {
  if (static_cast<int>(values.size()) != graph.edge_count())
    fail(ErrorKind::ParseError, "need one value per graph edge");
}

double EdgeValues::value(int i, int j) const {
  int e = graph.edge_index(i, j);
  if (e < 0) fail(ErrorKind::InvalidEdge, "entry not specified by the graph");
  return values[e];
}

EdgeValues phi(const PartialMatrix& x) {
  const Graph& g = x.graph;
  int n = g.node_count();
  Graph sg = suspension(g);
  std::vector<double> vals(sg.edge_count());
  for (int e = 0; e < sg.edge_count(); ++e) {
    auto [i, j] = sg.edges()[e];
    if (j == n)
      vals[e] = x.diag[i];
    else
      vals[e] = x.diag[i] + x.diag[j] - 2.0 * x.value(i, j);
  }
  return EdgeValues(sg, std::move(vals));
}

PartialMatrix phi_inv(const EdgeValues& d) {
  const Graph& sg = d.graph;
  int apex = sg.node_count() - 1;
  if (sg.node_count() < 2 || sg.degree(apex) != apex)
    fail(ErrorKind::InvalidEdmData, "last node must be adjacent to all others");
  for (double v : d.values)
    if (v < 0) fail(ErrorKind::InvalidEdmData, "squared distances must be nonnegative");

  std::vector<Edge> base_edges;
  for (auto [i, j] : sg.edges())
    if (j != apex) base_edges.push_back({i, j});
  Graph g(apex, std::move(base_edges));

  std::vector<double> diag(apex);
  for (int i = 0; i < apex; ++i) diag[i] = d.value(i, apex);
  std::vector<double> ev;
  ev.reserve(g.edge_count());
  for (auto [i, j] : g.edges())
    ev.push_back(0.5 * (diag[i] + diag[j] - d.value(i, j)));
  return PartialMatrix(std::move(g), std::move(diag), std::move(ev));
}

GramConfiguration gram_to_edm_points(const GramConfiguration& p) {
  GramConfiguration out;
  out.points = Eigen::MatrixXd::Zero(p.n() + 1, std::max(p.dim(), 1));
  out.points.topRows(p.n()).leftCols(p.dim()) = p.points;
  return out;
}

PartialMatrix zero_extend(const PartialMatrix& x) {
  Graph sg = suspension(x.graph);
  std::vector<double> diag = x.diag;
  diag.push_back(1.0);
  int n = x.n();
  std::vector<double> ev(sg.edge_count());
  for (int e = 0; e < sg.edge_count(); ++e) {
    auto [i, j] = sg.edges()[e];
    ev[e] = (j == n) ? 0.0 : x.value(i, j);
  }
  return PartialMatrix(std::move(sg), std::move(diag), std::move(ev));
}

}  // namespace gramforge
