#include <doctest.h>

#include <cmath>
#include <random>

#include "gramforge/error.hpp"
#include "gramforge/numerics.hpp"
#include "gramforge/partial.hpp"
#include "gramforge/sdp.hpp"

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

Eigen::MatrixXd random_unit_rows(int n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd p(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) p(i, j) = normal(rng);
    p.row(i) /= p.row(i).norm();
  }
  return p;
}

double lambda_min(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Independent oracle for the single-unknown stretch: ascending scan for the
// upper end of the feasibility interval, then bisection on the eigenvalue
// test. Usable whenever exactly one entry is unspecified.
double bisect_max_entry(Eigen::MatrixXd base, int i, int j) {
  auto feasible = [&](double x) {
    base(i, j) = base(j, i) = x;
    return lambda_min(base) >= -1e-13;
  };
  double lo = std::nan("");
  for (double x = -2.0; x <= 2.0; x += 0.01)
    if (feasible(x)) lo = x;
  REQUIRE(std::isfinite(lo));
  double hi = lo + 0.01;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

PartialMatrix partial_from_dense(const Graph& g, const Eigen::MatrixXd& m) {
  return project_to_graph(SymmetricMatrix(m), g);
}

}  // namespace

TEST_CASE("one-dimensional problems solve to machine accuracy") {
  SdpProblem p;
  p.n = 1;
  p.objective = SymmetricMatrix(Eigen::MatrixXd::Identity(1, 1));
  p.add_constraint(SymmetricMatrix(Eigen::MatrixXd::Identity(1, 1)), 2.0);
  SdpSolution s = sdp_solve(p);
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(s.primal_objective == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(s.dual_objective == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(s.X(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(s.gap <= 1e-8);
  CHECK(s.feas_p <= 1e-8);

  p.sense = SdpSense::Min;
  SdpSolution m = sdp_solve(p);
  CHECK(m.primal_objective == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("min sense negates objectives back") {
  // min <I, X> s.t. X_00 = 1: infimum 1 with X = e_0 e_0^T
  SdpProblem p;
  p.n = 2;
  p.sense = SdpSense::Min;
  p.objective = SymmetricMatrix(Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd e00 = Eigen::MatrixXd::Zero(2, 2);
  e00(0, 0) = 1;
  p.add_constraint(SymmetricMatrix(e00), 1.0);
  SdpSolution s = sdp_solve(p);
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.X(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(s.X(1, 1)) <= 1e-5);
}

TEST_CASE("reported objective and feasibility agree with recomputation") {
  SdpProblem p = maxcut_relaxation(named_graph("C5"));
  SdpSolution s = sdp_solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  double pobj = (p.objective.mat().cwiseProduct(s.X.mat())).sum();
  CHECK(pobj == doctest::Approx(s.primal_objective).epsilon(1e-10));
  double worst = 0;
  for (std::size_t j = 0; j < p.constraints.size(); ++j)
    worst = std::max(worst,
                     std::abs((p.constraints[j].mat().cwiseProduct(s.X.mat())).sum() - p.rhs[j]));
  CHECK(worst <= 10 * s.feas_p + 1e-12);
  // weak duality at the solution (both sides near-feasible)
  CHECK(s.primal_objective <= s.dual_objective + 1e-6 * (1 + std::abs(s.dual_objective)));
}

TEST_CASE("dependent constraints are dropped; inconsistent duplicates are infeasible") {
  SdpProblem p;
  p.n = 2;
  p.objective = SymmetricMatrix(Eigen::MatrixXd::Identity(2, 2));
  p.add_constraint(SymmetricMatrix(Eigen::MatrixXd::Identity(2, 2)), 3.0);
  p.add_constraint(SymmetricMatrix(2 * Eigen::MatrixXd::Identity(2, 2)), 6.0);
  SdpSolution s = sdp_solve(p);
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(s.dropped_dependent_constraints);
  CHECK(s.y.size() == 2);
  CHECK(s.primal_objective == doctest::Approx(3.0).epsilon(1e-7));

  SdpProblem bad = p;
  bad.rhs[1] = 7.0;  // same span, contradictory right-hand side
  CHECK(thrown_kind([&] { sdp_solve(bad); }) == ErrorKind::InfeasibleData);
}

TEST_CASE("max-cut relaxation of C4 is 4") {
  SdpProblem p = maxcut_relaxation(named_graph("C4"));
  CHECK(p.n == 4);
  CHECK(p.constraints.size() == 4);
  SdpSolution s = sdp_solve(p);
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(s.primal_objective == doctest::Approx(4.0).epsilon(1e-7));
  for (int i = 0; i < 4; ++i) CHECK(s.X(i, i) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(is_psd(s.X, 1e-7));
  // off-diagonal support of the relaxation is the graph itself
  CHECK(aggregated_sparsity(p) == named_graph("C4"));
}

TEST_CASE("iteration cap is honored") {
  RunConfig cfg;
  cfg.max_iters = 3;
  SdpSolution s = sdp_solve(maxcut_relaxation(named_graph("C5")), cfg);
  CHECK(s.iterations <= 3);
  CHECK(s.trace.size() <= 4);
}

TEST_CASE("feasibility value on complete graphs is the smallest eigenvalue") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd p0 = random_unit_rows(3, 3, rng);
  Eigen::MatrixXd m = p0 * p0.transpose() + 0.5 * Eigen::MatrixXd::Identity(3, 3);
  PartialMatrix a = partial_from_dense(named_graph("K3"), m);
  FeasibilityResult r = psd_completion_feasible(a);
  REQUIRE(r.completion.has_value());
  CHECK(r.min_eig_value == doctest::Approx(lambda_min(m)).epsilon(1e-6));
  CHECK(!r.boundary);
  CHECK(a.residual_against(*r.completion) <= 1e-9);

  // indefinite data on a complete graph
  Eigen::MatrixXd bad = m;
  bad(0, 1) = bad(1, 0) = 2.5;
  PartialMatrix ab = partial_from_dense(named_graph("K3"), bad);
  FeasibilityResult rb = psd_completion_feasible(ab);
  CHECK(!rb.completion.has_value());
  CHECK(rb.min_eig_value == doctest::Approx(lambda_min(bad)).epsilon(1e-5));
}

TEST_CASE("feasibility on C4: interior data maximizes the smallest eigenvalue") {
  Graph c4 = named_graph("C4");
  PartialMatrix a(c4, {1, 1, 1, 1}, {0, 0, 0, 0});
  FeasibilityResult r = psd_completion_feasible(a);
  REQUIRE(r.completion.has_value());
  // the identity completion is optimal: t* = 1
  CHECK(r.min_eig_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(!r.boundary);
  CHECK(std::abs((*r.completion)(0, 2)) <= 1e-6);
  CHECK(std::abs((*r.completion)(1, 3)) <= 1e-6);

  // all-ones data has the unique completion J (rank one): boundary
  PartialMatrix ones(c4, {1, 1, 1, 1}, {1, 1, 1, 1});
  FeasibilityResult rb = psd_completion_feasible(ones);
  REQUIRE(rb.completion.has_value());
  CHECK(rb.boundary);
  CHECK(std::abs(rb.min_eig_value) <= 1e-6);
  CHECK((*rb.completion)(0, 2) == doctest::Approx(1.0).epsilon(1e-5));

  // an edge value beyond the psd range of its own block
  PartialMatrix infeas(Graph(2, {{0, 1}}), {1, 1}, {2});
  FeasibilityResult ri = psd_completion_feasible(infeas);
  CHECK(!ri.completion.has_value());
  CHECK(ri.min_eig_value == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("stretch on C4: the analytic optimum and dual stress") {
  Graph c4 = named_graph("C4");
  PartialMatrix a(c4, {1, 1, 1, 1}, {0, 0, 0, 0});
  StretchResult r = stretch(c4, a, {0, 2});
  CHECK(r.solution.status == SdpStatus::Optimal);
  CHECK(!r.regularized);
  CHECK(r.optimum == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.certificate.w_diag[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.certificate.w_diag[2] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(r.certificate.w_diag[1]) <= 1e-6);
  CHECK(std::abs(r.certificate.w_diag[3]) <= 1e-6);
  for (double we : r.certificate.w_edges) CHECK(std::abs(we) <= 1e-6);
  CHECK(r.certificate.omega(0, 2) == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(is_psd(r.certificate.omega, 1e-7));
  CHECK(r.certificate.complementarity <= 1e-6);
  GramConfiguration pts = gram_factor(r.solution.X, 1e-6);
  CHECK(equilibrium_residual(pts, r.certificate) <= 1e-7);
}

TEST_CASE("equilibrium residual matches its defining formula") {
  Graph c4 = named_graph("C4");
  PartialMatrix a(c4, {1, 1, 1, 1}, {0, 0, 0, 0});
  StretchResult r = stretch(c4, a, {0, 2});
  GramConfiguration pts = gram_factor(r.solution.X, 1e-6);
  Eigen::MatrixXd force = r.certificate.omega.mat() * pts.points;
  double direct = 0;
  for (int i = 0; i < pts.n(); ++i) direct = std::max(direct, force.row(i).norm());
  CHECK(equilibrium_residual(pts, r.certificate) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("stretch agrees with the bisection oracle on single-unknown instances") {
  std::mt19937_64 rng(101);
  for (int n : {4, 5, 6}) {
    Graph g = delete_edge(named_graph("K" + std::to_string(n)), {0, 1});
    Eigen::MatrixXd p0 = random_unit_rows(n, n, rng);
    Eigen::MatrixXd m = p0 * p0.transpose();
    PartialMatrix a = partial_from_dense(g, m);
    StretchResult r = stretch(g, a, {0, 1});
    Eigen::MatrixXd base = m;
    double oracle = bisect_max_entry(base, 0, 1);
    CHECK(r.optimum == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(is_psd(r.certificate.omega, 1e-6));
    CHECK(r.certificate.complementarity <= 1e-5);
    // the maximum dominates any feasible completion's entry
    FeasibilityResult f = psd_completion_feasible(a);
    REQUIRE(f.completion.has_value());
    CHECK(r.optimum >= (*f.completion)(0, 1) - 1e-7);
  }
}

TEST_CASE("stretch input validation and infeasible data") {
  Graph c4 = named_graph("C4");
  PartialMatrix a(c4, {1, 1, 1, 1}, {0, 0, 0, 0});
  CHECK(thrown_kind([&] { stretch(c4, a, {0, 1}); }) == ErrorKind::InvalidEdge);
  CHECK(thrown_kind([&] { stretch(c4, a, {0, 4}); }) == ErrorKind::InvalidEdge);
  PartialMatrix infeas(c4, {1, 1, 1, 1}, {2, 0, 0, 0});
  CHECK(thrown_kind([&] { stretch(c4, infeas, {0, 2}); }) == ErrorKind::InfeasibleData);
}

TEST_CASE("stretch on boundary data regularizes and flags it") {
  Graph c4 = named_graph("C4");
  PartialMatrix ones(c4, {1, 1, 1, 1}, {1, 1, 1, 1});  // unique completion J
  StretchResult r = stretch(c4, ones, {0, 2});
  CHECK(r.regularized);
  CHECK(r.regularize_eps_used > 0);
  CHECK(r.optimum == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("stretch pair suggestion") {
  auto s = suggest_stretch_pair(named_graph("C4"));
  REQUIRE(s.has_value());
  CHECK(*s == Edge{0, 2});
  CHECK(!suggest_stretch_pair(named_graph("K4")).has_value());
  auto star = suggest_stretch_pair(named_graph("K1,3"));
  REQUIRE(star.has_value());
  CHECK(*star == Edge{1, 2});
}

TEST_CASE("octahedron data: the returned completion carries the forced zeros") {
  Graph oct = named_graph("K2,2,2");
  std::vector<double> diag(6, 1.0);
  std::vector<double> ev(oct.edge_count(), 0.0);
  double r = std::sqrt(0.5);
  for (int e = 0; e < oct.edge_count(); ++e) {
    auto [i, j] = oct.edges()[e];
    if ((i == 0 && j == 5) || (i == 1 && j == 5)) ev[e] = r;
  }
  PartialMatrix a(oct, diag, ev);
  FeasibilityResult f = psd_completion_feasible(a);
  REQUIRE(f.completion.has_value());
  CHECK(f.boundary);
  for (Edge e : {Edge{0, 3}, Edge{1, 4}, Edge{2, 5}})
    CHECK(std::abs((*f.completion)(e.first, e.second)) <= 1e-6);
}

TEST_CASE("rank reduction: identity with a trace constraint collapses to rank one") {
  SdpProblem p;
  p.n = 3;
  p.objective = SymmetricMatrix(Eigen::MatrixXd::Zero(3, 3));
  p.add_constraint(SymmetricMatrix(Eigen::MatrixXd::Identity(3, 3)), 3.0);
  RankReduceResult r = rank_reduce(p, SymmetricMatrix(Eigen::MatrixXd::Identity(3, 3)));
  CHECK(r.rank == 1);
  CHECK(!r.stalled);
  CHECK(r.X.mat().trace() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(is_psd(r.X, 1e-9));
  CHECK(numeric_rank(r.X) == 1);
  REQUIRE(!r.rank_path.empty());
  for (std::size_t i = 1; i < r.rank_path.size(); ++i)
    CHECK(r.rank_path[i] < r.rank_path[i - 1]);
}

TEST_CASE("rank reduction hits the Barvinok-Pataki bound and keeps constraints") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal;
  const int n = 6, m = 4;
  Eigen::MatrixXd p0 = random_unit_rows(n, n, rng);
  SymmetricMatrix xtrue(p0 * p0.transpose());
  SdpProblem p;
  p.n = n;
  p.objective = SymmetricMatrix(Eigen::MatrixXd::Zero(n, n));
  for (int j = 0; j < m; ++j) {
    Eigen::MatrixXd aj(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) aj(r, c) = normal(rng);
    SymmetricMatrix a(aj);
    p.add_constraint(a, (a.mat().cwiseProduct(xtrue.mat())).sum());
  }
  RankReduceResult r = rank_reduce(p, xtrue);
  CHECK(r.rank * (r.rank + 1) / 2 <= m);
  CHECK(is_psd(r.X, 1e-8));
  for (int j = 0; j < m; ++j)
    CHECK(std::abs((p.constraints[j].mat().cwiseProduct(r.X.mat())).sum() - p.rhs[j]) <= 1e-7);
}

TEST_CASE("rank reduction can preserve the objective value") {
  std::mt19937_64 rng(78);
  const int n = 5;
  Eigen::MatrixXd p0 = random_unit_rows(n, n, rng);
  SymmetricMatrix xtrue(p0 * p0.transpose());
  SdpProblem p;
  p.n = n;
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
  c(0, 1) = c(1, 0) = 0.5;
  p.objective = SymmetricMatrix(c);
  p.add_constraint(SymmetricMatrix(Eigen::MatrixXd::Identity(n, n)), xtrue.mat().trace());
  double before = (p.objective.mat().cwiseProduct(xtrue.mat())).sum();
  RankReduceResult r = rank_reduce(p, xtrue, /*preserve_objective=*/true);
  double after = (p.objective.mat().cwiseProduct(r.X.mat())).sum();
  CHECK(std::abs(after - before) <= 1e-7 * (1 + std::abs(before)));
  CHECK(r.rank * (r.rank + 1) / 2 <= 2);  // one constraint plus the objective
}
