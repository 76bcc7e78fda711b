#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "gramforge/completion.hpp"
#include "gramforge/error.hpp"
#include "gramforge/graph.hpp"
#include "gramforge/numerics.hpp"
#include "gramforge/sdp.hpp"
#include "gramforge/treewidth.hpp"

using namespace gramforge;

static Eigen::MatrixXd pairm(int n, int i, int j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  if (i == j)
    e(i, i) = 1.0;
  else
    e(i, j) = e(j, i) = 0.5;
  return e;
}

int main() {
  // instance 2 shape: C4-like degenerate lift, but with richer data
  // rebuild instance 2 exactly by replaying the rng
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(4, 7);
  Graph g(1, {});
  Edge e{0, 0};
  PartialMatrix ac(Graph(1, {}), {1.0}, {});
  int found = 0;
  while (true) {
    std::bernoulli_distribution coin(0.6);
    int n = size(rng);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (coin(rng)) edges.push_back({i, j});
    Graph cand(n, std::move(edges));
    if (cand.edge_count() == 0) continue;
    std::uniform_int_distribution<int> pick(0, cand.edge_count() - 1);
    Edge ce = cand.edges()[pick(rng)];
    Graph gc = contract_edge(cand, ce);
    std::normal_distribution<double> normal(0.0, 1.0);
    int m = gc.node_count();
    Eigen::MatrixXd pts(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) pts(i, j) = normal(rng);
    pts /= std::sqrt(double(m));
    if (found == 2) {
      g = cand;
      e = ce;
      ac = project_to_graph(SymmetricMatrix(pts * pts.transpose()), gc);
      break;
    }
    ++found;
  }

  const int n = g.node_count();
  auto [u, v] = e;
  std::printf("n=%d edge (%d,%d)\n", n, u, v);
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
  PartialMatrix lifted(g, diag, ev);

  // mirror the feasibility formulation
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a0(i, i) = lifted.diag[i];
  for (int idx = 0; idx < g.edge_count(); ++idx) {
    auto [i, j] = g.edges()[idx];
    a0(i, j) = a0(j, i) = lifted.edge_values[idx];
  }
  SdpProblem p;
  p.n = n;
  p.sense = SdpSense::Max;
  p.objective = SymmetricMatrix(-a0);
  std::vector<Edge> nonedges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!g.has_edge(i, j)) nonedges.push_back({i, j});
  for (auto [i, j] : nonedges) p.add_constraint(SymmetricMatrix(pairm(n, i, j)), 0.0);
  p.add_constraint(SymmetricMatrix(-Eigen::MatrixXd::Identity(n, n)), -1.0);

  RunConfig cfg;
  SdpSolution sol = sdp_solve(p, cfg);
  std::printf("status=%d iters=%d gap=%.2e feas_p=%.2e feas_d=%.2e\n", int(sol.status),
              sol.iterations, sol.gap, sol.feas_p, sol.feas_d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.X.mat());
  std::printf("primal Xt spectrum:");
  for (int i = 0; i < n; ++i) std::printf(" %.3e", es.eigenvalues()(i));
  std::printf("\n");

  // spectral split scan as dual_face_correction does
  const Eigen::VectorXd& evs = es.eigenvalues();
  int r = 0;
  double best_ratio = 0;
  for (int k = 1; k < n; ++k) {
    double ratio = std::max(evs(k), 1e-300) / std::max(evs(k - 1), 1e-300);
    if (ratio >= best_ratio) {
      best_ratio = ratio;
      r = n - k;
    }
  }
  std::printf("best_ratio=%.3e r=%d\n", best_ratio, r);

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  z(u) = 1;
  z(v) = -1;
  z.normalize();
  Eigen::VectorXd top = es.eigenvectors().col(n - 1);
  std::printf("|<top, z>| = %.6f\n", std::abs(top.dot(z)));
  return 0;
}
