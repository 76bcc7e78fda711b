#include "gramforge/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "gramforge/error.hpp"
#include "gramforge/numerics.hpp"
#include "gramforge/sdp.hpp"

namespace gramforge {

double gram_fit_residual(const GramConfiguration& p, const PartialMatrix& a) {
  double f = 0;
  for (int i = 0; i < a.n(); ++i) {
    double r = p.points.row(i).squaredNorm() - a.diag[i];
    f += r * r;
  }
  for (int e = 0; e < a.graph.edge_count(); ++e) {
    auto [i, j] = a.graph.edges()[e];
    double r = p.points.row(i).dot(p.points.row(j)) - a.edge_values[e];
    f += r * r;
  }
  return f;
}

double edm_fit_residual(const GramConfiguration& p, const EdgeValues& d) {
  double f = 0;
  for (int e = 0; e < d.graph.edge_count(); ++e) {
    auto [i, j] = d.graph.edges()[e];
    double r = (p.points.row(i) - p.points.row(j)).squaredNorm() - d.values[e];
    f += r * r;
  }
  return f;
}

namespace {

struct Objective {
  std::function<double(const Eigen::MatrixXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> gradient;
};

/// Barzilai-Borwein gradient descent with Armijo backtracking.
double descend(Eigen::MatrixXd& p, const Objective& obj, int iters, double tol) {
  double f = obj.value(p);
  Eigen::MatrixXd g = obj.gradient(p);
  double step = 1.0 / (1.0 + g.norm());
  Eigen::MatrixXd p_prev, g_prev;

  for (int it = 0; it < iters && f > tol; ++it) {
    if (it > 0) {
      Eigen::MatrixXd s = p - p_prev;
      Eigen::MatrixXd y = g - g_prev;
      double sy = (s.cwiseProduct(y)).sum();
      if (sy > 1e-300) step = std::clamp((s.cwiseProduct(s)).sum() / sy, 1e-12, 1e8);
    }
    double gnorm2 = g.squaredNorm();
    if (gnorm2 < 1e-24 * (1.0 + f)) break;

    double t = step;
    Eigen::MatrixXd cand;
    double fc = f;
    for (int bt = 0; bt < 50; ++bt) {
      cand = p - t * g;
      fc = obj.value(cand);
      if (fc <= f - 1e-4 * t * gnorm2) break;
      t *= 0.5;
    }
    if (fc >= f) break;  // no descent found
    p_prev = p;
    g_prev = g;
    p = cand;
    f = fc;
    g = obj.gradient(p);
  }
  return obj.value(p);
}

Eigen::MatrixXd shape_init(const Eigen::MatrixXd& given, int n, int k) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, k);
  int c = std::min<int>(k, static_cast<int>(given.cols()));
  out.leftCols(c) = given.leftCols(c);
  return out;
}

FitResult run_fit(int n, int k, const Objective& obj,
                  const std::vector<Eigen::MatrixXd>& warm_starts,
                  const std::vector<double>& row_scale, const FitOptions& opt) {
  FitResult best;
  best.residual = std::numeric_limits<double>::infinity();

  int total = std::max<int>(opt.restarts, static_cast<int>(warm_starts.size()));
  for (int r = 0; r < total; ++r) {
    Eigen::MatrixXd p;
    if (r < static_cast<int>(warm_starts.size())) {
      p = shape_init(warm_starts[r], n, k);
    } else {
      std::seed_seq seq{opt.seed, static_cast<std::uint64_t>(r)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal(0.0, 1.0);
      p.resize(n, k);
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < k; ++c) p(i, c) = normal(rng) * row_scale[i];
    }
    descend(p, obj, opt.iters, opt.tol);

    GramConfiguration cfg;
    cfg.points = p;
    double f = obj.value(p);
    if (f < best.residual) {
      best.residual = f;
      best.points = cfg;
      best.restarts_used = r;
    }
    if (best.residual < opt.tol) break;
  }
  best.converged = best.residual < opt.tol;
  return best;
}

}  // namespace

FitResult lowrank_fit(const PartialMatrix& a, int k, const FitOptions& opt) {
  if (k < 1) fail(ErrorKind::ParseError, "target dimension must be at least 1");
  const int n = a.n();
  const Graph& g = a.graph;

  Objective obj;
  obj.value = [&](const Eigen::MatrixXd& p) {
    GramConfiguration c;
    c.points = p;
    return gram_fit_residual(c, a);
  };
  obj.gradient = [&, n](const Eigen::MatrixXd& p) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, k);
    for (int i = 0; i < n; ++i) {
      double r = p.row(i).squaredNorm() - a.diag[i];
      grad.row(i) += 4.0 * r * p.row(i);
    }
    for (int e = 0; e < g.edge_count(); ++e) {
      auto [i, j] = g.edges()[e];
      double r = p.row(i).dot(p.row(j)) - a.edge_values[e];
      grad.row(i) += 2.0 * r * p.row(j);
      grad.row(j) += 2.0 * r * p.row(i);
    }
    return grad;
  };

  std::vector<Eigen::MatrixXd> warm;
  if (opt.init) warm.push_back(*opt.init);
  try {
    FeasibilityResult feas = psd_completion_feasible(a);
    if (feas.completion) warm.push_back(gram_factor(*feas.completion).points);
  } catch (const Error&) {
    // no feasibility-based start; random restarts remain
  }

  std::vector<double> scale(n);
  for (int i = 0; i < n; ++i) scale[i] = std::sqrt(std::max(a.diag[i], 1e-3) / k);
  return run_fit(n, k, obj, warm, scale, opt);
}

FitResult edm_fit(const EdgeValues& d, int k, const FitOptions& opt) {
  if (k < 1) fail(ErrorKind::ParseError, "target dimension must be at least 1");
  for (double v : d.values)
    if (v < 0) fail(ErrorKind::InvalidEdmData, "squared distances must be nonnegative");
  const int n = d.graph.node_count();
  const Graph& g = d.graph;

  Objective obj;
  obj.value = [&](const Eigen::MatrixXd& p) {
    GramConfiguration c;
    c.points = p;
    return edm_fit_residual(c, d);
  };
  obj.gradient = [&, n](const Eigen::MatrixXd& p) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, k);
    for (int e = 0; e < g.edge_count(); ++e) {
      auto [i, j] = g.edges()[e];
      Eigen::RowVectorXd diff = p.row(i) - p.row(j);
      double r = diff.squaredNorm() - d.values[e];
      grad.row(i) += 4.0 * r * diff;
      grad.row(j) -= 4.0 * r * diff;
    }
    return grad;
  };

  std::vector<Eigen::MatrixXd> warm;
  if (opt.init) warm.push_back(*opt.init);

  double mean = 1.0;
  for (double v : d.values) mean += v;
  mean /= std::max(1, g.edge_count());
  std::vector<double> scale(n, std::sqrt(mean / k));

  FitResult res = run_fit(n, k, obj, warm, scale, opt);
  res.points.points.rowwise() -= res.points.points.row(0).eval();
  return res;
}

std::optional<int> orthogonality_dimension_search(const Graph& g, int kmax,
                                                  const FitOptions& opt) {
  if (g.node_count() > 10)
    fail(ErrorKind::SizeGuard, "brute-force regime is limited to 10 nodes");
  Graph h = g.complement();
  PartialMatrix a(h, std::vector<double>(h.node_count(), 1.0),
                  std::vector<double>(h.edge_count(), 0.0));
  for (int k = 1; k <= kmax; ++k)
    if (lowrank_fit(a, k, opt).converged) return k;
  return std::nullopt;
}

int clique_number_bf(const Graph& g) {
  const int n = g.node_count();
  if (n > 12) fail(ErrorKind::SizeGuard, "exhaustive search is limited to 12 nodes");
  std::vector<std::uint64_t> adj(n);
  for (int v = 0; v < n; ++v) adj[v] = g.adjacency_mask(v);

  int best = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    int size = std::popcount(mask);
    if (size <= best) continue;
    bool clique = true;
    for (std::uint64_t m = mask; m && clique; m &= m - 1) {
      int v = std::countr_zero(m);
      clique = (adj[v] & mask) == (mask & ~(std::uint64_t{1} << v));
    }
    if (clique) best = size;
  }
  return best;
}

namespace {

bool colorable(const Graph& g, const std::vector<int>& order, int k) {
  std::vector<int> color(g.node_count(), -1);
  std::function<bool(int, int)> place = [&](int idx, int used) {
    if (idx == static_cast<int>(order.size())) return true;
    int v = order[idx];
    int limit = std::min(k, used + 1);
    for (int c = 0; c < limit; ++c) {
      bool ok = true;
      for (int u : g.neighbors(v))
        if (color[u] == c) {
          ok = false;
          break;
        }
      if (!ok) continue;
      color[v] = c;
      if (place(idx + 1, std::max(used, c + 1))) return true;
      color[v] = -1;
    }
    return false;
  };
  return place(0, 0);
}

}  // namespace

int chromatic_number_bf(const Graph& g) {
  const int n = g.node_count();
  if (n > 12) fail(ErrorKind::SizeGuard, "exhaustive search is limited to 12 nodes");
  if (n == 0) return 0;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return g.degree(a) > g.degree(b); });

  for (int k = clique_number_bf(g); k < n; ++k)
    if (colorable(g, order, k)) return k;
  return n;
}

}  // namespace gramforge
