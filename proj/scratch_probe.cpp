#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "gramforge/completion.hpp"
#include "gramforge/graph.hpp"
#include "gramforge/numerics.hpp"
#include "gramforge/sdp.hpp"
#include "gramforge/treewidth.hpp"
#include "gramforge/error.hpp"

using namespace gramforge;

static Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

static SymmetricMatrix random_psd(int n, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = normal(rng);
  g /= std::sqrt(double(rank));
  return SymmetricMatrix(g * g.transpose());
}

int main() {
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

    // replicate the lift
    const int n = g.node_count();
    auto [u, v] = e;
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

    FeasibilityResult f = psd_completion_feasible(lifted);
    if (!f.completion) {
      std::printf("inst %2d: INFEASIBLE?!\n", done);
      ++done;
      continue;
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    z(u) = 1;
    z(v) = -1;
    double viol = (f.completion->mat() * z).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.completion->mat());
    if (viol > 1e-9) {
      std::printf("inst %2d: n=%d k=%d t*=% .2e viol=%.2e lmin=% .2e scale=%.2f\n", done, n,
                  k, f.min_eig_value, viol, es.eigenvalues().minCoeff(), ac.scale());
      double res = -1;
      const char* what = "ok";
      try {
        CompletionResult host = ktree_complete(g, lifted, k);
        res = host.residual;
        Eigen::MatrixXd x(n - 1, n - 1);
        std::vector<int> rep(n - 1);
        for (int w = 0; w < n - 1; ++w) rep[w] = (w == v && v != n - 1) ? n - 1 : w;
        for (int i = 0; i < n - 1; ++i)
          for (int j = 0; j < n - 1; ++j) x(i, j) = host.X(rep[i], rep[j]);
        std::printf("          host res=%.2e restricted res=%.2e\n", res,
                    ac.residual_against(SymmetricMatrix(x)));
      } catch (const Error& err) {
        what = err.what();
        std::printf("          ktree threw: %s\n", what);
      }
    }
    ++done;
  }
  return 0;
}
