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

static Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

int main() {
  std::mt19937_64 rng(8800);
  int found = 0, attempts = 0;
  while (found < 10 && attempts < 2000) {
    ++attempts;
    std::uniform_int_distribution<int> size(6, 8);
    int n = size(rng);
    Graph g = random_graph(n, 0.45, rng);
    Certificate cert = certify(g);
    if (cert.upper != 4 || !cert.tw.exact || cert.tw.width > 3) continue;
    ++found;

    SdpProblem p = maxcut_relaxation(g);
    SdpSolution s = sdp_solve(p);
    PartialMatrix partial = project_to_graph(s.X, g);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(s.X.mat());
    std::printf("g%02d n=%d m=%d gap=%.1e Xev:", found, n, g.edge_count(), s.gap);
    for (int i = 0; i < n; ++i) std::printf(" %.1e", ex.eigenvalues()(i));
    std::printf("\n");

    FeasibilityResult f = psd_completion_feasible(partial);
    if (!f.completion) {
      std::printf("   feas: INFEASIBLE t*=%.2e\n", f.min_eig_value);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(f.completion->mat());
    double resid = partial.residual_against(*f.completion);
    std::printf("   feas: t*=%.2e lmin=%.2e data-resid=%.2e\n", f.min_eig_value,
                e2.eigenvalues().minCoeff(), resid);

    try {
      CompletionResult comp = ktree_complete(g, partial, 3);
      std::printf("   ktree: rank=%d residual=%.2e\n", comp.rank, comp.residual);
    } catch (const Error& err) {
      std::printf("   ktree THREW: %s\n", err.what());
    }
  }
  return 0;
}
