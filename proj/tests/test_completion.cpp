#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "gramforge/completion.hpp"
#include "gramforge/config.hpp"
#include "gramforge/error.hpp"
#include "gramforge/graph.hpp"
#include "gramforge/matrix.hpp"
#include "gramforge/minor.hpp"
#include "gramforge/numerics.hpp"
#include "gramforge/partial.hpp"
#include "gramforge/sdp.hpp"
#include "gramforge/treewidth.hpp"

using namespace gramforge;

namespace {

template <typename F>
ErrorKind thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::ParseError;
}

SymmetricMatrix random_psd(int n, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd p(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) p(i, j) = gauss(rng);
  return SymmetricMatrix(p * p.transpose());
}

Graph random_graph(int n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

Graph path_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(n, std::move(edges));
}

// Random subgraph of a k-tree on n nodes: grow from K_{k+1} by attaching
// each new node to a random k-clique, then thin the edges.
Graph random_partial_ktree(int k, int n, double keep, std::mt19937_64& rng) {
  std::vector<Edge> edges;
  std::vector<std::vector<int>> cliques;
  int base = std::min(n, k + 1);
  for (int i = 0; i < base; ++i)
    for (int j = i + 1; j < base; ++j) edges.push_back({i, j});
  if (base == k + 1) {
    for (int skip = 0; skip <= k; ++skip) {
      std::vector<int> c;
      for (int i = 0; i <= k; ++i)
        if (i != skip) c.push_back(i);
      cliques.push_back(c);
    }
  }
  for (int v = base; v < n; ++v) {
    std::uniform_int_distribution<size_t> pick(0, cliques.size() - 1);
    std::vector<int> host = cliques[pick(rng)];
    for (int u : host) edges.push_back({u, v});
    for (size_t skip = 0; skip < host.size(); ++skip) {
      std::vector<int> c = host;
      c[skip] = v;
      cliques.push_back(c);
    }
  }
  std::bernoulli_distribution coin(keep);
  std::vector<Edge> kept;
  for (const Edge& e : edges)
    if (coin(rng)) kept.push_back(e);
  return Graph(n, std::move(kept));
}

Completer ktree_completer(int k) {
  return [k](const PartialMatrix& a, const RunConfig& cfg) {
    return ktree_complete(a.graph, a, k, std::nullopt, cfg);
  };
}

double max_abs_diff(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  return (a.mat() - b.mat()).cwiseAbs().maxCoeff();
}

// Same lift construction contract_lift documents: contracted-node data on
// both endpoints, the contracted edge carrying its diagonal value, the last
// label filling v's slot on the way back down.
PartialMatrix lift_to_host(const Graph& g, Edge e, const PartialMatrix& ac) {
  const int n = g.node_count();
  const auto [u, v] = e;
  auto down = [&, u = u, v = v](int i) {
    if (i == v) return u;
    if (i == n - 1 && v != n - 1) return v;
    return i;
  };
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = ac.diag[down(i)];
  std::vector<double> ev(g.edge_count());
  for (int idx = 0; idx < g.edge_count(); ++idx) {
    auto [i, j] = g.edges()[idx];
    int mi = down(i), mj = down(j);
    ev[idx] = mi == mj ? ac.diag[mi] : ac.value(mi, mj);
  }
  return PartialMatrix(g, std::move(diag), std::move(ev));
}

// The Schur-complement data apex_complete hands to its inner completer.
PartialMatrix schur_data(const PartialMatrix& y) {
  const int apex = y.n() - 1;
  std::vector<int> ids(apex);
  std::iota(ids.begin(), ids.end(), 0);
  Graph base = y.graph.induced_subgraph(ids);
  const double alpha = y.diag[apex];
  std::vector<double> diag(apex);
  for (int i = 0; i < apex; ++i)
    diag[i] = y.diag[i] - y.value(i, apex) * y.value(i, apex) / alpha;
  std::vector<double> ev(base.edge_count());
  for (int e = 0; e < base.edge_count(); ++e) {
    auto [i, j] = base.edges()[e];
    ev[e] = y.value(i, j) - y.value(i, apex) * y.value(j, apex) / alpha;
  }
  return PartialMatrix(std::move(base), std::move(diag), std::move(ev));
}

}  // namespace

TEST_CASE("project_to_graph keeps the diagonal and edge positions") {
  Graph p3 = path_graph(3);
  PartialMatrix a = project_to_graph(SymmetricMatrix(Eigen::MatrixXd::Identity(3, 3)), p3);
  CHECK(a.graph == p3);
  for (double d : a.diag) CHECK(d == 1.0);
  for (double v : a.edge_values) CHECK(v == 0.0);
  CHECK(a.specifies(0, 1));
  CHECK(a.specifies(1, 1));
  CHECK_FALSE(a.specifies(0, 2));
  CHECK(a.value(1, 0) == 0.0);
  CHECK(a.residual_against(SymmetricMatrix(Eigen::MatrixXd::Identity(3, 3))) == 0.0);
  CHECK(a.scale() == 1.0);  // floored at 1

  OctahedronWitness w = k222_witness();
  PartialMatrix proj = project_to_graph(w.X, w.graph);
  CHECK(proj.diag == w.x.diag);
  CHECK(proj.edge_values == w.x.edge_values);
}

TEST_CASE("project then complete on a complete graph reproduces the matrix") {
  std::mt19937_64 rng(11);
  Graph k5 = named_graph("K5");
  SymmetricMatrix x = random_psd(5, 3, rng);
  PartialMatrix a = project_to_graph(x, k5);

  CompletionResult r = ktree_complete(k5, a, 4);
  CHECK(r.rank == 3);
  CHECK(r.residual <= 1e-8 * a.scale());
  CHECK(max_abs_diff(r.X, x) <= 1e-9 * a.scale());

  CompletionResult given = ktree_complete(k5, a, 4, x);
  CHECK(max_abs_diff(given.X, x) <= 1e-9 * a.scale());
  check_completion(given, a);
}

TEST_CASE("octahedron witness: rank, singular block, forced entries") {
  OctahedronWitness w = k222_witness();
  CHECK(w.graph == named_graph("K2,2,2"));
  CHECK(w.graph.edge_count() == 12);
  Graph comp = w.graph.complement();
  CHECK(comp.edges() == std::vector<Edge>{{0, 3}, {1, 4}, {2, 5}});

  const double r = std::sqrt(0.5);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(6, 6);
  expect(0, 5) = expect(5, 0) = r;
  expect(1, 5) = expect(5, 1) = r;
  CHECK((w.X.mat() - expect).cwiseAbs().maxCoeff() == 0.0);

  EigResult eig = eig_sym(w.X);
  Eigen::VectorXd spectrum(6);
  spectrum << 2, 1, 1, 1, 1, 0;
  CHECK((eig.values - spectrum).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(numeric_rank(w.X) == 5);

  CHECK(w.singular_block == std::vector<int>{0, 1, 5});
  Eigen::Matrix3d block;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) block(i, j) = w.X(w.singular_block[i], w.singular_block[j]);
  CHECK(std::abs(block.determinant()) <= 1e-15);
  CHECK((block * w.kernel).cwiseAbs().maxCoeff() <= 1e-15);

  REQUIRE(w.forced.size() == 3);
  for (auto [i, j, v] : w.forced) {
    CHECK(v == 0.0);
    CHECK_FALSE(w.x.specifies(i, j));
    CHECK(w.X(i, j) == 0.0);
  }
  CHECK(w.x.residual_against(w.X) == 0.0);
}

TEST_CASE("octahedron witness data has the unique completion") {
  OctahedronWitness w = k222_witness();
  FeasibilityResult feas = psd_completion_feasible(w.x);
  REQUIRE(feas.completion.has_value());
  for (auto [i, j, v] : w.forced) CHECK(std::abs((*feas.completion)(i, j) - v) <= 1e-6);
  CHECK(max_abs_diff(*feas.completion, w.X) <= 1e-5);

  CompletionResult r = ktree_complete(w.graph, w.x, 4);
  CHECK(r.rank == 5);  // the unique completion leaves no room below k+1
  CHECK(r.residual <= 1e-7 * w.x.scale());
  check_completion(r, w.x);
}

TEST_CASE("ktree_complete on a path stays at rank two") {
  Graph p3 = path_graph(3);
  PartialMatrix a(p3, {1, 1, 1}, {0.5, 0.5});
  CompletionResult r = ktree_complete(p3, a, 1);
  CHECK(r.method == "ktree");
  CHECK(r.rank <= 2);
  CHECK(r.residual <= 1e-8);
  CHECK(is_psd(r.X, 1e-8));
  CHECK(std::abs(r.X(0, 2)) <= 1.0 + 1e-9);  // Cauchy-Schwarz on unit diagonal
  CHECK_FALSE(completion_issue(r, a).has_value());
  check_completion(r, a);
}

TEST_CASE("ktree_complete reproduces fully specified cliques") {
  std::mt19937_64 rng(12);
  Graph k3 = named_graph("K3");
  SymmetricMatrix x = random_psd(3, 2, rng);
  PartialMatrix a = project_to_graph(x, k3);
  CompletionResult r = ktree_complete(k3, a, 2);
  CHECK(r.rank == 2);
  CHECK(max_abs_diff(r.X, x) <= 1e-9 * a.scale());
}

TEST_CASE("ktree_complete on random partial k-trees meets the rank bound") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> size(5, 10);
  for (int k : {2, 3}) {
    const int instances = k == 2 ? 10 : 5;
    for (int t = 0; t < instances; ++t) {
      int n = size(rng);
      Graph g = random_partial_ktree(k, n, 0.7, rng);
      REQUIRE(treewidth(g).width <= k);
      PartialMatrix a = project_to_graph(random_psd(n, n, rng), g);
      CompletionResult r = ktree_complete(g, a, k);
      CHECK(r.rank <= k + 1);
      CHECK(r.residual <= 1e-7 * a.scale());
      check_completion(r, a);
    }
  }
}

TEST_CASE("ktree_complete matches the certificate when treewidth binds") {
  std::mt19937_64 rng(14);
  Graph k5 = named_graph("K5");
  Certificate c = certify(k5);
  CHECK(c.upper == 5);
  CHECK(c.upper_rule == UpperRule::TreewidthPlusOne);
  PartialMatrix a = project_to_graph(random_psd(5, 5, rng), k5);
  CompletionResult r = ktree_complete(k5, a, c.tw.width);
  CHECK(r.rank <= c.upper);
}

TEST_CASE("ktree_complete rejects bad inputs") {
  std::mt19937_64 rng(15);
  Graph k5 = named_graph("K5");
  PartialMatrix full = project_to_graph(random_psd(5, 5, rng), k5);
  CHECK(thrown_kind([&] { ktree_complete(k5, full, 3); }) == ErrorKind::InfeasibleWidth);

  Graph k2 = named_graph("K2");
  PartialMatrix bad(k2, {1, 1}, {2});
  CHECK(thrown_kind([&] { ktree_complete(k2, bad, 1); }) == ErrorKind::InfeasibleData);

  PartialMatrix ok(k2, {1, 1}, {0.5});
  CHECK(thrown_kind([&] {
          ktree_complete(k2, ok, 1, SymmetricMatrix(Eigen::MatrixXd::Identity(3, 3)));
        }) == ErrorKind::DimensionMismatch);
  CHECK(thrown_kind([&] {
          ktree_complete(k2, ok, 1, SymmetricMatrix(-Eigen::MatrixXd::Identity(2, 2)));
        }) == ErrorKind::NotPsd);
  CHECK(thrown_kind([&] {
          ktree_complete(k2, ok, 1, SymmetricMatrix(Eigen::MatrixXd::Identity(2, 2)));
        }) == ErrorKind::InfeasibleData);

  PartialMatrix other(path_graph(3), {1, 1, 1}, {0, 0});
  CHECK(thrown_kind([&] { ktree_complete(named_graph("K3"), other, 2); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("completion checker flags corrupted results") {
  Graph p3 = path_graph(3);
  PartialMatrix a(p3, {1, 1, 1}, {0.5, 0.5});
  CompletionResult r = ktree_complete(p3, a, 1);
  CHECK_FALSE(completion_issue(r, a).has_value());

  CompletionResult wrong_rank = r;
  wrong_rank.rank += 1;
  CHECK(completion_issue(wrong_rank, a).has_value());

  CompletionResult wrong_entry = r;
  Eigen::MatrixXd m = r.X.mat();
  m(0, 1) = m(1, 0) = 5.0;
  wrong_entry.X = SymmetricMatrix(m);
  CHECK(completion_issue(wrong_entry, a).has_value());
  CHECK(thrown_kind([&] { check_completion(wrong_entry, a); }) ==
        ErrorKind::NumericalConsistency);

  CompletionResult not_psd = r;
  not_psd.X = SymmetricMatrix(-Eigen::MatrixXd::Identity(3, 3));
  CHECK(completion_issue(not_psd, a).has_value());
}

TEST_CASE("clique_sum_union keeps part-1 labels and appends the rest") {
  Graph k3 = named_graph("K3");
  std::vector<int> map2;
  Graph uni = clique_sum_union(k3, k3, {1, 2}, {0, 1}, &map2);
  CHECK(uni.node_count() == 4);
  CHECK(uni.edges() == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(map2 == std::vector<int>{1, 2, 3});

  CHECK(thrown_kind([&] { clique_sum_union(k3, k3, {1, 2}, {0}, nullptr); }) ==
        ErrorKind::DimensionMismatch);
  Graph p3 = path_graph(3);
  CHECK(thrown_kind([&] { clique_sum_union(p3, k3, {0, 2}, {0, 1}, nullptr); }) ==
        ErrorKind::InvalidEdge);
  CHECK(thrown_kind([&] { clique_sum_union(k3, k3, {1, 3}, {0, 1}, nullptr); }) ==
        ErrorKind::InvalidEdge);
  CHECK(thrown_kind([&] { clique_sum_union(k3, k3, {1, 1}, {0, 1}, nullptr); }) ==
        ErrorKind::InvalidEdge);
}

TEST_CASE("clique_sum_complete glues two triangles along an edge") {
  Graph k3 = named_graph("K3");
  PartialMatrix a1(k3, {1, 1, 1}, {0, 0, 0});
  PartialMatrix a2 = a1;
  CompletionResult r = clique_sum_complete(a1, a2, {1, 2}, {0, 1}, 3);
  CHECK(r.method == "clique-sum");
  CHECK(r.X.n() == 4);
  CHECK(r.rank <= 3);
  CHECK(r.residual <= 1e-6);
  CHECK(is_psd(r.X, 1e-8));
}

TEST_CASE("clique_sum_complete returns part 1 when part 2 adds nothing") {
  Graph k3 = named_graph("K3");
  Graph k2 = named_graph("K2");
  PartialMatrix a1(k3, {1, 1, 1}, {0.2, 0.2, 0.2});
  PartialMatrix a2(k2, {1, 1}, {0.2});
  CompletionResult r = clique_sum_complete(a1, a2, {0, 1}, {0, 1}, 3);
  CHECK(r.X.n() == 3);
  CHECK(r.method == "ktree");
  CHECK(r.residual <= 1e-7);
}

TEST_CASE("clique_sum_complete reassembles blocks of a ground truth") {
  std::mt19937_64 rng(16);
  SymmetricMatrix truth = random_psd(5, 4, rng);
  Graph k4 = named_graph("K4");
  Eigen::MatrixXd b1 = truth.mat().topLeftCorner(4, 4);
  Eigen::MatrixXd b2 = truth.mat().bottomRightCorner(4, 4);
  PartialMatrix a1 = project_to_graph(SymmetricMatrix(b1), k4);
  PartialMatrix a2 = project_to_graph(SymmetricMatrix(b2), k4);
  std::vector<int> shared1{1, 2, 3}, shared2{0, 1, 2};

  CompletionResult r = clique_sum_complete(a1, a2, shared1, shared2, 4);
  CHECK(r.X.n() == 5);
  CHECK(r.rank <= 4);
  CHECK(r.residual <= 1e-6 * truth.mat().cwiseAbs().maxCoeff());

  // supplying the part completions takes the "given" route
  CompletionResult given = clique_sum_complete(a1, a2, shared1, shared2, 4,
                                               SymmetricMatrix(b1), SymmetricMatrix(b2));
  CHECK(given.rank <= std::max(numeric_rank(SymmetricMatrix(b1)),
                               numeric_rank(SymmetricMatrix(b2))));
  CHECK(given.residual <= 1e-6 * truth.mat().cwiseAbs().maxCoeff());
}

TEST_CASE("clique_sum_complete rejects disagreeing overlaps") {
  Graph k3 = named_graph("K3");
  PartialMatrix a1(k3, {1, 1, 1}, {0.3, 0.3, 0.3});
  PartialMatrix a2 = a1;
  a2.edge_values[0] += 1e-3;  // edge (0,1), inside the shared pair
  CHECK(thrown_kind([&] { clique_sum_complete(a1, a2, {1, 2}, {0, 1}, 3); }) ==
        ErrorKind::InconsistentOverlap);

  PartialMatrix a3 = a1;
  a3.diag[0] += 1e-3;
  CHECK(thrown_kind([&] { clique_sum_complete(a1, a3, {1, 2}, {0, 1}, 3); }) ==
        ErrorKind::InconsistentOverlap);

  CHECK(thrown_kind([&] { clique_sum_complete(a1, a2, {1, 2}, {0, 1}, 0); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("contract_lift on a single edge") {
  Graph k2 = named_graph("K2");
  PartialMatrix c(Graph(1, {}), {0.7}, {});
  CompletionResult r = contract_lift(k2, {0, 1}, c, ktree_completer(1));
  CHECK(r.X.n() == 1);
  CHECK(r.X(0, 0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(r.rank == 1);
  CHECK(r.method == "contract-lift");
}

TEST_CASE("contract_lift restricts the host completion") {
  Graph c4 = named_graph("C4");
  Edge e{0, 1};
  Graph gc = contract_edge(c4, e);
  CHECK(gc == named_graph("K3"));
  PartialMatrix ac(gc, {1, 1, 1}, {0.3, 0.3, 0.3});

  CompletionResult r = contract_lift(c4, e, ac, ktree_completer(2));
  CompletionResult host = ktree_completer(2)(lift_to_host(c4, e, ac), RunConfig{});

  // merged node keeps label 0, old node 3 fills slot 1
  std::vector<int> rep{0, 3, 2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(r.X(i, j) - host.X(rep[i], rep[j])) <= 1e-13);
  CHECK(r.rank <= host.rank);
  CHECK(r.residual <= 1e-7 * ac.scale());

  CHECK(thrown_kind([&] { contract_lift(c4, {0, 2}, ac, ktree_completer(2)); }) ==
        ErrorKind::InvalidEdge);
  PartialMatrix wrong(path_graph(3), {1, 1, 1}, {0, 0});
  CHECK(thrown_kind([&] { contract_lift(c4, e, wrong, ktree_completer(2)); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("contract_lift never increases the rank") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(4, 7);
  int done = 0;
  while (done < 50) {
    Graph g = random_graph(size(rng), 0.6, rng);
    if (g.edge_count() == 0) continue;
    std::uniform_int_distribution<int> pick(0, g.edge_count() - 1);
    Edge e = g.edges()[pick(rng)];
    Graph gc = contract_edge(g, e);
    PartialMatrix ac = project_to_graph(random_psd(gc.node_count(), gc.node_count(), rng), gc);
    int k = treewidth(g).width;

    CompletionResult r = contract_lift(g, e, ac, ktree_completer(k));
    CompletionResult host = ktree_completer(k)(lift_to_host(g, e, ac), RunConfig{});
    CHECK(r.rank <= host.rank);
    CHECK(r.residual <= 1e-6 * ac.scale());
    CHECK(is_psd(r.X, 1e-7));
    ++done;
  }
}

TEST_CASE("apex_complete borders the inner completion") {
  Graph two = Graph(2, {});
  Graph star = suspension(two);
  PartialMatrix y(star, {0, 0, 1}, {0, 0});
  CompletionResult r = apex_complete(y, ktree_completer(0), 1);
  CHECK(r.method == "apex");
  CHECK(r.rank == 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(r.X(i, j) == (i == 2 && j == 2 ? 1.0 : 0.0));

  PartialMatrix zero(star, {0, 0, 0}, {0, 0});
  CompletionResult rz = apex_complete(zero, ktree_completer(0), 1);
  CHECK(rz.rank == 0);
  CHECK(rz.residual == 0.0);
}

TEST_CASE("apex_complete rejects non-psd apex data") {
  Graph star = suspension(Graph(2, {}));
  PartialMatrix neg(star, {0, 0, -1}, {0, 0});
  CHECK(thrown_kind([&] { apex_complete(neg, ktree_completer(0), 1); }) == ErrorKind::NotPsd);

  PartialMatrix border(star, {1, 1, 0}, {0.5, 0});
  CHECK(thrown_kind([&] { apex_complete(border, ktree_completer(0), 1); }) ==
        ErrorKind::NotPsd);

  PartialMatrix tiny(Graph(1, {}), {1}, {});
  CHECK(thrown_kind([&] { apex_complete(tiny, ktree_completer(0), 1); }) ==
        ErrorKind::ParseError);
  PartialMatrix notapex(path_graph(3), {1, 1, 1}, {0, 0});
  CHECK(thrown_kind([&] { apex_complete(notapex, ktree_completer(1), 1); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("apex_complete adds exactly one to the inner rank") {
  std::mt19937_64 rng(18);
  std::uniform_int_distribution<int> size(2, 5);
  int done = 0;
  while (done < 12) {
    int nb = size(rng);
    Graph sg = suspension(random_graph(nb, 0.5, rng));
    std::uniform_int_distribution<int> rank(1, nb + 1);
    SymmetricMatrix m = random_psd(nb + 1, rank(rng), rng);
    if (m(nb, nb) < 0.1) continue;
    PartialMatrix y = project_to_graph(m, sg);

    std::vector<int> ids(nb);
    std::iota(ids.begin(), ids.end(), 0);
    int k = treewidth(sg.induced_subgraph(ids)).width;
    CompletionResult r = apex_complete(y, ktree_completer(k), k + 1);
    CompletionResult z = ktree_completer(k)(schur_data(y), RunConfig{});
    CHECK(r.rank == z.rank + 1);
    CHECK(r.residual <= 1e-6 * y.scale());
    CHECK(is_psd(r.X, 1e-7));
    ++done;
  }
}

TEST_CASE("apex_complete over a tree stays at rank three") {
  std::mt19937_64 rng(19);
  Graph tree(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
  Graph sg = suspension(tree);
  for (int t = 0; t < 3; ++t) {
    SymmetricMatrix m = random_psd(6, 6, rng);
    PartialMatrix y = project_to_graph(m, sg);
    CompletionResult r = apex_complete(y, ktree_completer(1), 2);
    CHECK(r.rank <= 3);
    CHECK(r.residual <= 1e-6 * y.scale());
  }
}

TEST_CASE("zero_extend builds the suspension data") {
  PartialMatrix one(Graph(1, {}), {1}, {});
  PartialMatrix y = zero_extend(one);
  CHECK(y.graph == named_graph("K2"));
  CHECK(y.diag == std::vector<double>{1, 1});
  CHECK(y.edge_values == std::vector<double>{0});

  Graph p3 = path_graph(3);
  PartialMatrix x(p3, {1, 2, 3}, {0.5, -0.5});
  PartialMatrix ext = zero_extend(x);
  CHECK(ext.graph == suspension(p3));
  CHECK(ext.diag == std::vector<double>{1, 2, 3, 1});
  CHECK(ext.value(0, 1) == 0.5);
  CHECK(ext.value(1, 2) == -0.5);
  for (int i = 0; i < 3; ++i) CHECK(ext.value(i, 3) == 0.0);
}

TEST_CASE("phi on the worked examples") {
  Graph k2 = named_graph("K2");
  EdgeValues d1 = phi(PartialMatrix(k2, {1, 1}, {1}));
  CHECK(d1.graph == suspension(k2));
  CHECK(d1.value(0, 1) == 0.0);
  CHECK(d1.value(0, 2) == 1.0);
  CHECK(d1.value(1, 2) == 1.0);

  EdgeValues d2 = phi(PartialMatrix(k2, {1, 4}, {1}));
  CHECK(d2.value(0, 1) == 3.0);
  CHECK(d2.value(0, 2) == 1.0);
  CHECK(d2.value(1, 2) == 4.0);
}

TEST_CASE("phi_inv validates its input") {
  Graph k3 = named_graph("K3");  // suspension of K2
  CHECK(thrown_kind([&] { phi_inv(EdgeValues(k3, {1, -0.1, 1})); }) ==
        ErrorKind::InvalidEdmData);
  CHECK(thrown_kind([&] { phi_inv(EdgeValues(path_graph(3), {1, 1})); }) ==
        ErrorKind::InvalidEdmData);
  CHECK(thrown_kind([&] { phi_inv(EdgeValues(Graph(1, {}), {})); }) ==
        ErrorKind::InvalidEdmData);
}

TEST_CASE("phi and phi_inv are exact mutual inverses") {
  // Entries drawn on a dyadic grid: the affine map then rounds nowhere,
  // making bitwise equality the correct assertion.
  std::mt19937_64 rng(20);
  std::uniform_int_distribution<int> size(2, 8), tick(-2048, 2048);
  for (int t = 0; t < 100; ++t) {
    int n = size(rng);
    Graph g = random_graph(n, 0.5, rng);
    Eigen::MatrixXd p(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) p(i, j) = tick(rng) / 1024.0;
    PartialMatrix x = project_to_graph(SymmetricMatrix(p * p.transpose()), g);

    EdgeValues d = phi(x);
    for (double v : d.values) CHECK(v >= 0.0);
    PartialMatrix back = phi_inv(d);
    CHECK(back.graph == x.graph);
    CHECK(back.diag == x.diag);
    CHECK(back.edge_values == x.edge_values);
  }

  std::uniform_int_distribution<int> nonneg(0, 4096);
  for (int t = 0; t < 100; ++t) {
    Graph sg = suspension(random_graph(size(rng) - 1, 0.5, rng));
    std::vector<double> vals(sg.edge_count());
    for (double& v : vals) v = nonneg(rng) / 1024.0;
    EdgeValues d(sg, std::move(vals));
    EdgeValues again = phi(phi_inv(d));
    CHECK(again.graph == d.graph);
    CHECK(again.values == d.values);
  }
}

TEST_CASE("gram_to_edm_points realizes the covariance map") {
  GramConfiguration single;
  single.points = Eigen::MatrixXd::Ones(1, 1);
  GramConfiguration out = gram_to_edm_points(single);
  CHECK(out.n() == 2);
  CHECK(out.dim() == 1);
  CHECK(out.points(0, 0) == 1.0);
  CHECK(out.points(1, 0) == 0.0);

  OctahedronWitness w = k222_witness();
  GramConfiguration p = gram_factor(w.X);
  REQUIRE(p.dim() == 5);
  GramConfiguration q = gram_to_edm_points(p);
  CHECK(q.n() == 7);
  CHECK(q.dim() == 5);
  EdgeValues d = phi(w.x);
  for (auto [i, j] : d.graph.edges()) {
    double dist = (q.points.row(i) - q.points.row(j)).squaredNorm();
    CHECK(std::abs(dist - d.value(i, j)) <= 1e-9);
  }

  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd pts(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) pts(i, j) = gauss(rng);
  GramConfiguration conf;
  conf.points = pts;
  PartialMatrix x = project_to_graph(SymmetricMatrix(pts * pts.transpose()),
                                     named_graph("K6"));
  GramConfiguration ext = gram_to_edm_points(conf);
  CHECK(ext.dim() == 3);
  EdgeValues dd = phi(x);
  for (auto [i, j] : dd.graph.edges()) {
    double dist = (ext.points.row(i) - ext.points.row(j)).squaredNorm();
    CHECK(std::abs(dist - dd.value(i, j)) <= 1e-12);
  }
}

TEST_CASE("certify pins the classical families") {
  for (int n = 1; n <= 8; ++n) {
    Certificate c = certify(named_graph("K" + std::to_string(n)));
    CHECK(c.lower == n);
    CHECK(c.upper == n);
    CHECK(verify_certificate(named_graph("K" + std::to_string(n)), c));
  }
  for (int n = 1; n <= 3; ++n)
    for (int m = n; m <= 5; ++m) {
      Graph g = named_graph("K" + std::to_string(n) + "," + std::to_string(m));
      Certificate c = certify(g);
      CHECK(c.lower == n + 1);
      CHECK(c.upper == n + 1);
      CHECK(verify_certificate(g, c));
    }

  Certificate oct = certify(named_graph("K2,2,2"));
  CHECK(oct.lower == 5);
  CHECK(oct.upper == 5);
  CHECK(oct.lower_tag == "K222-minor");
  CHECK(oct.upper_rule == UpperRule::TreewidthPlusOne);
  CHECK(oct.tw.width == 4);
  REQUIRE(oct.lower_model.has_value());
  CHECK(verify_minor_model(named_graph("K2,2,2"), named_graph("K2,2,2"), *oct.lower_model));
  CHECK(verify_certificate(named_graph("K2,2,2"), oct));

  for (const char* name : {"V8", "C5xC2"}) {
    Graph g = named_graph(name);
    Certificate c = certify(g);
    CHECK(c.lower == 4);
    CHECK(c.upper == 4);
    CHECK(c.lower_tag == "K4-minor");
    CHECK(c.upper_rule == UpperRule::NoK5NoK222);
    CHECK(verify_certificate(g, c));
  }

  Certificate pet = certify(named_graph("petersen"));
  CHECK(pet.lower == 5);
  CHECK(pet.upper == 5);
  CHECK(verify_certificate(named_graph("petersen"), pet));

  Certificate c5 = certify(named_graph("C5"));
  CHECK(c5.lower == 3);
  CHECK(c5.upper == 3);
  CHECK(c5.upper_rule == UpperRule::NoK4);

  Certificate lone = certify(Graph(3, {}));
  CHECK(lone.lower == 1);
  CHECK(lone.upper == 1);
  CHECK(lone.upper_rule == UpperRule::Edgeless);
  CHECK_FALSE(lone.lower_model.has_value());

  Certificate star = certify(named_graph("K1,3"));
  CHECK(star.upper == 2);
  CHECK(star.upper_rule == UpperRule::Forest);
}

TEST_CASE("verify_certificate rejects tampered claims") {
  Graph v8 = named_graph("V8");
  Certificate good = certify(v8);
  REQUIRE(verify_certificate(v8, good));

  Certificate c = good;
  c.lower = 5;
  CHECK_FALSE(verify_certificate(v8, c));

  c = good;
  c.upper = 3;
  CHECK_FALSE(verify_certificate(v8, c));

  c = good;
  REQUIRE(c.lower_model.has_value());
  c.lower_model->branch_sets[0].clear();
  CHECK_FALSE(verify_certificate(v8, c));

  c = good;
  c.tw.width = 2;
  CHECK_FALSE(verify_certificate(v8, c));
}

TEST_CASE("certify is monotone under taking minors") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> size(3, 8), ops(1, 4);
  std::uniform_real_distribution<double> dens(0.3, 0.8);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 100; ++t) {
    Graph g = random_graph(size(rng), dens(rng), rng);
    Graph h = g;
    int steps = ops(rng);
    for (int s = 0; s < steps; ++s) {
      if (coin(rng) && h.node_count() > 1) {
        std::uniform_int_distribution<int> node(0, h.node_count() - 1);
        int drop = node(rng);
        std::vector<int> keep;
        for (int v = 0; v < h.node_count(); ++v)
          if (v != drop) keep.push_back(v);
        h = h.induced_subgraph(keep);
      } else if (h.edge_count() > 0) {
        std::uniform_int_distribution<int> pick(0, h.edge_count() - 1);
        Edge e = h.edges()[pick(rng)];
        h = coin(rng) ? delete_edge(h, e) : contract_edge(h, e);
      }
    }
    Certificate cg = certify(g);
    Certificate ch = certify(h);
    CHECK(cg.lower <= cg.upper);
    CHECK(ch.lower <= ch.upper);
    CHECK(ch.lower <= cg.upper);
  }
}
