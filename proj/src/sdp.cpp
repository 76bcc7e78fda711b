#include "gramforge/sdp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "gramforge/error.hpp"
#include "gramforge/numerics.hpp"

namespace gramforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd svec(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  const double r2 = std::sqrt(2.0);
  int t = 0;
  for (int i = 0; i < n; ++i) {
    v(t++) = a(i, i);
    for (int j = i + 1; j < n; ++j) v(t++) = r2 * a(i, j);
  }
  return v;
}

Eigen::MatrixXd unsvec(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd a(n, n);
  const double inv_r2 = std::sqrt(0.5);
  int t = 0;
  for (int i = 0; i < n; ++i) {
    a(i, i) = v(t++);
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = a(j, i) = inv_r2 * v(t++);
    }
  }
  return a;
}

struct EigParts {
  Eigen::VectorXd values;  // ascending, Eigen order
  Eigen::MatrixXd vectors;
  bool positive_definite = false;

  Eigen::MatrixXd power(double e) const {
    Eigen::VectorXd d = values;
    for (int i = 0; i < d.size(); ++i) d(i) = std::pow(std::max(d(i), 1e-300), e);
    return vectors * d.asDiagonal() * vectors.transpose();
  }
};

EigParts eig_parts(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::NumericalFailure, "eigendecomposition failed inside the SDP solver");
  EigParts p;
  p.values = es.eigenvalues();
  p.vectors = es.eigenvectors();
  p.positive_definite = p.values(0) > 0;
  return p;
}

// Largest alpha >= 0 with M + alpha * D psd, given M^{-1/2}.
double step_to_boundary(const Eigen::MatrixXd& invhalf, const Eigen::MatrixXd& d) {
  Eigen::MatrixXd b = invhalf * d * invhalf;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()),
                                                    Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues()(0);
  if (lmin >= -1e-14) return kInf;
  return -1.0 / lmin;
}

struct Preprocessed {
  std::vector<Eigen::MatrixXd> a;
  Eigen::VectorXd b;
  std::vector<int> kept;  // original indices
  bool dropped = false;
};

Preprocessed drop_dependent(const SdpProblem& p) {
  const int m = static_cast<int>(p.constraints.size());
  const int d = p.n * (p.n + 1) / 2;
  Eigen::MatrixXd v(d, m);
  for (int j = 0; j < m; ++j) v.col(j) = svec(p.constraints[j].mat());

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());

  Preprocessed out;
  if (rank == m) {
    out.a.reserve(m);
    for (int j = 0; j < m; ++j) out.a.push_back(p.constraints[j].mat());
    out.b.resize(m);
    for (int j = 0; j < m; ++j) out.b(j) = p.rhs[j];
    out.kept.resize(m);
    for (int j = 0; j < m; ++j) out.kept[j] = j;
    return out;
  }

  out.dropped = true;
  auto perm = qr.colsPermutation().indices();
  std::vector<bool> keep(m, false);
  for (int t = 0; t < rank; ++t) keep[perm(t)] = true;

  Eigen::MatrixXd vkept(d, rank);
  Eigen::VectorXd bkept(rank);
  int c = 0;
  for (int j = 0; j < m; ++j)
    if (keep[j]) {
      vkept.col(c) = v.col(j);
      bkept(c) = p.rhs[j];
      out.kept.push_back(j);
      ++c;
    }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qrk(vkept);

  double bscale = 1.0;
  for (int j = 0; j < m; ++j) bscale = std::max(bscale, std::abs(p.rhs[j]));
  for (int j = 0; j < m; ++j) {
    if (keep[j]) continue;
    Eigen::VectorXd coef = qrk.solve(v.col(j));
    if (std::abs(bkept.dot(coef) - p.rhs[j]) > 1e-8 * bscale)
      fail(ErrorKind::InfeasibleData,
           "dependent constraint with inconsistent right-hand side");
  }
  for (int j : out.kept) out.a.push_back(p.constraints[j].mat());
  out.b = bkept;
  return out;
}

}  // namespace

void SdpProblem::add_constraint(SymmetricMatrix a, double bval) {
  if (a.n() != n) fail(ErrorKind::DimensionMismatch, "constraint size mismatch");
  constraints.push_back(std::move(a));
  rhs.push_back(bval);
}

SdpSolution sdp_solve(const SdpProblem& prob, const RunConfig& cfg) {
  const int n = prob.n;
  if (n < 1) fail(ErrorKind::ParseError, "problem needs n >= 1");
  if (prob.objective.n() != n) fail(ErrorKind::DimensionMismatch, "objective size mismatch");
  if (prob.constraints.size() != prob.rhs.size())
    fail(ErrorKind::ParseError, "constraint/rhs count mismatch");
  if (prob.constraints.empty()) fail(ErrorKind::ParseError, "need at least one constraint");
  for (const auto& a : prob.constraints)
    if (a.n() != n) fail(ErrorKind::DimensionMismatch, "constraint size mismatch");

  const double sign = prob.sense == SdpSense::Max ? 1.0 : -1.0;
  const Eigen::MatrixXd C = sign * prob.objective.mat();

  Preprocessed pre = drop_dependent(prob);
  const auto& A = pre.a;
  const Eigen::VectorXd& b = pre.b;
  const int m = static_cast<int>(A.size());

  double norm_a = 1e-12, norm_b = 0;
  for (const auto& a : A) norm_a = std::max(norm_a, a.norm());
  for (int j = 0; j < m; ++j) norm_b = std::max(norm_b, std::abs(b(j)));
  const double norm_c = C.norm();

  double xi_p = std::max({1.0, std::sqrt(double(n)), double(n) * norm_b / (1.0 + norm_a)});
  double xi_d = std::max({1.0, std::sqrt(double(n)), norm_c / std::sqrt(double(n)) + norm_a});

  Eigen::MatrixXd X = xi_p * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd S = xi_d * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  SdpSolution sol;
  sol.trace.reserve(cfg.max_iters);
  double best_score = kInf;
  Eigen::MatrixXd bestX = X, bestS = S;
  Eigen::VectorXd besty = y;

  const double tau = 0.98;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    Eigen::VectorXd ax(m);
    for (int j = 0; j < m; ++j) ax(j) = (A[j].cwiseProduct(X)).sum();
    Eigen::VectorXd rp = b - ax;
    Eigen::MatrixXd Rd = -C - S;
    for (int j = 0; j < m; ++j) Rd += y(j) * A[j];

    double pobj = (C.cwiseProduct(X)).sum();
    double dobj = b.dot(y);
    double mu = (X.cwiseProduct(S)).sum() / n;
    double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    double feas_p = rp.cwiseAbs().maxCoeff() / (1.0 + norm_b);
    double feas_d = Rd.norm() / (1.0 + norm_c);
    sol.trace.push_back({pobj, dobj, mu, feas_p, feas_d});

    double score = std::max({gap, feas_p, feas_d});
    if (score < best_score) {
      best_score = score;
      bestX = X;
      bestS = S;
      besty = y;
    }
    if (gap <= cfg.tol_gap && feas_p <= cfg.tol_feas && feas_d <= cfg.tol_feas) {
      sol.status = SdpStatus::Optimal;
      bestX = X;
      bestS = S;
      besty = y;
      break;
    }

    EigParts ex = eig_parts(X);
    EigParts es = eig_parts(S);
    if (!ex.positive_definite || !es.positive_definite) {
      sol.status = SdpStatus::NumericalTrouble;
      break;
    }
    Eigen::MatrixXd Xh = ex.power(0.5);
    Eigen::MatrixXd Xih = ex.power(-0.5);
    Eigen::MatrixXd Sih = es.power(-0.5);

    // Nesterov-Todd scaling: W S W = X
    Eigen::MatrixXd Bm = Xh * S * Xh;
    EigParts eb = eig_parts(0.5 * (Bm + Bm.transpose()));
    if (!eb.positive_definite) {
      sol.status = SdpStatus::NumericalTrouble;
      break;
    }
    Eigen::MatrixXd W = Xh * eb.power(-0.5) * Xh;
    Eigen::MatrixXd Sinv = Xh * eb.power(-1.0) * Xh;

    std::vector<Eigen::MatrixXd> T(m);
    Eigen::MatrixXd M(m, m);
    for (int j = 0; j < m; ++j) T[j] = W * A[j] * W;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        M(i, j) = (A[i].cwiseProduct(T[j])).sum();
        M(j, i) = M(i, j);
      }
    Eigen::VectorXd svec_s(m), wvec(m);
    for (int j = 0; j < m; ++j) {
      svec_s(j) = (A[j].cwiseProduct(Sinv)).sum();
      wvec(j) = (T[j].cwiseProduct(Rd)).sum();
    }

    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) {
      M.diagonal().array() += 1e-12 * M.trace() / m + 1e-300;
      llt.compute(M);
      if (llt.info() != Eigen::Success) {
        sol.status = SdpStatus::NumericalTrouble;
        break;
      }
    }

    auto direction = [&](double sigma_mu, Eigen::MatrixXd& dX, Eigen::VectorXd& dy,
                         Eigen::MatrixXd& dS) {
      Eigen::VectorXd rhs = sigma_mu * svec_s - b - wvec;
      dy = llt.solve(rhs);
      dS = Rd;
      for (int j = 0; j < m; ++j) dS += dy(j) * A[j];
      dX = sigma_mu * Sinv - X - W * dS * W;
      dX = 0.5 * (dX + dX.transpose()).eval();
    };

    Eigen::MatrixXd dXa, dSa;
    Eigen::VectorXd dya;
    direction(0.0, dXa, dya, dSa);
    double ap = std::min(1.0, step_to_boundary(Xih, dXa));
    double ad = std::min(1.0, step_to_boundary(Sih, dSa));
    double mu_aff =
        ((X + ap * dXa).cwiseProduct(S + ad * dSa)).sum() / n;
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
    sigma = std::clamp(sigma, 1e-8, 0.99);

    Eigen::MatrixXd dX, dS;
    Eigen::VectorXd dy;
    direction(sigma * mu, dX, dy, dS);
    double sp = step_to_boundary(Xih, dX);
    double sd = step_to_boundary(Sih, dS);
    double alpha_p = std::min(1.0, tau * sp);
    double alpha_d = std::min(1.0, tau * sd);

    X += alpha_p * dX;
    y += alpha_d * dy;
    S += alpha_d * dS;

    if (alpha_p < 1e-10 && alpha_d < 1e-10) {
      sol.status = SdpStatus::NumericalTrouble;
      break;
    }
  }

  if (it >= cfg.max_iters) sol.status = SdpStatus::MaxIterations;

  sol.X = SymmetricMatrix(bestX);
  sol.S = SymmetricMatrix(bestS);
  sol.y.assign(prob.constraints.size(), 0.0);
  for (int j = 0; j < m; ++j) sol.y[pre.kept[j]] = besty(j);
  sol.dropped_dependent_constraints = pre.dropped;
  sol.iterations = it;

  Eigen::VectorXd ax(m);
  for (int j = 0; j < m; ++j) ax(j) = (A[j].cwiseProduct(bestX)).sum();
  Eigen::MatrixXd Rd = -C - bestS;
  for (int j = 0; j < m; ++j) Rd += besty(j) * A[j];
  double pobj = (C.cwiseProduct(bestX)).sum();
  double dobj = b.dot(besty);
  sol.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  sol.feas_p = (b - ax).cwiseAbs().maxCoeff() / (1.0 + norm_b);
  sol.feas_d = Rd.norm() / (1.0 + norm_c);
  sol.primal_objective = sign * pobj;
  sol.dual_objective = sign * dobj;
  return sol;
}

namespace {

Eigen::MatrixXd pair_matrix(int n, int i, int j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  if (i == j) {
    e(i, i) = 1.0;
  } else {
    e(i, j) = e(j, i) = 0.5;
  }
  return e;
}

// Minimum-norm correction d to the dual vector y such that the corrected
// slack annihilates the primal range: (sum_j (y+d)_j A_j - C) V = 0 in least
// squares, with b'd = 0 so the dual objective stays put. V is read off the
// primal spectrum; nullopt when no clean spectral split exists (then the
// complementary face is not identifiable and any fit would be guesswork).
std::optional<Eigen::VectorXd> dual_face_correction(const SdpProblem& p,
                                                    const Eigen::MatrixXd& primal,
                                                    const Eigen::MatrixXd& slack) {
  const int n = p.n;
  const int m = static_cast<int>(p.constraints.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(primal);
  const Eigen::VectorXd& ev = ex.eigenvalues();  // ascending
  if (n < 2 || ev(n - 1) <= 0) return std::nullopt;
  int r = 0;
  double best_ratio = 0;
  for (int k = 1; k < n; ++k) {
    double ratio = std::max(ev(k), 1e-300) / std::max(ev(k - 1), 1e-300);
    if (ratio >= best_ratio) {
      best_ratio = ratio;
      r = n - k;
    }
  }
  if (best_ratio < 1e3) return std::nullopt;

  Eigen::MatrixXd V = ex.eigenvectors().rightCols(r);
  Eigen::MatrixXd J(n * r, m);
  for (int j = 0; j < m; ++j) {
    Eigen::MatrixXd aj = p.constraints[j].mat() * V;
    J.col(j) = Eigen::Map<Eigen::VectorXd>(aj.data(), n * r);
  }
  Eigen::MatrixXd res = slack * V;
  Eigen::VectorXd r0 = Eigen::Map<Eigen::VectorXd>(res.data(), n * r);
  Eigen::VectorXd b(m);
  for (int j = 0; j < m; ++j) b(j) = p.rhs[j];

  if (m > 1 && b.norm() > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd z = q.rightCols(m - 1);  // basis of b-perp: b'd stays 0
    return Eigen::VectorXd(z * (J * z).completeOrthogonalDecomposition().solve(-r0));
  }
  return Eigen::VectorXd(J.completeOrthogonalDecomposition().solve(-r0));
}

// Maximal cliques of g as bitmasks (Bron-Kerbosch with pivoting).
void max_cliques(const Graph& g, std::uint64_t r, std::uint64_t p, std::uint64_t x,
                 std::vector<std::uint64_t>& out) {
  if (!p && !x) {
    out.push_back(r);
    return;
  }
  int pivot = std::countr_zero(p | x);
  std::uint64_t cand = p & ~g.adjacency_mask(pivot);
  for (std::uint64_t m = p | x; m; m &= m - 1) {
    int u = std::countr_zero(m);
    std::uint64_t c = p & ~g.adjacency_mask(u);
    if (std::popcount(c) < std::popcount(cand)) {
      pivot = u;
      cand = c;
    }
  }
  for (std::uint64_t m = cand; m; m &= m - 1) {
    int v = std::countr_zero(m);
    std::uint64_t nv = g.adjacency_mask(v);
    max_cliques(g, r | (std::uint64_t{1} << v), p & nv, x & nv, out);
    p &= ~(std::uint64_t{1} << v);
    x |= std::uint64_t{1} << v;
  }
}

// Orthonormal basis of the kernel the data forces on every psd completion:
// a null vector of a specified clique block extends by positive
// semidefiniteness to a null vector of the whole matrix, whatever the fills.
// These directions live entirely in the data, so they are exact in a way
// nothing read off the solver can be.
Eigen::MatrixXd forced_directions(const PartialMatrix& a) {
  const Graph& g = a.graph;
  const int n = g.node_count();
  if (n < 1 || n > 64) return Eigen::MatrixXd(n, 0);

  std::vector<std::uint64_t> cliques;
  std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  max_cliques(g, 0, all, 0, cliques);

  const double tol = 1e-10 * std::max(1.0, a.scale());
  std::vector<Eigen::VectorXd> dirs;
  for (std::uint64_t c : cliques) {
    std::vector<int> q;
    for (std::uint64_t m = c; m; m &= m - 1) q.push_back(std::countr_zero(m));
    const int s = static_cast<int>(q.size());
    Eigen::MatrixXd b(s, s);
    for (int i = 0; i < s; ++i) {
      b(i, i) = a.diag[q[i]];
      for (int j = i + 1; j < s; ++j) b(i, j) = b(j, i) = a.value(q[i], q[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    for (int k = 0; k < s && es.eigenvalues()(k) <= tol; ++k) {
      if (es.eigenvalues()(k) < -tol) continue;  // infeasible block, not a kernel
      Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < s; ++i) w(q[i]) = es.eigenvectors()(i, k);
      dirs.push_back(std::move(w));
    }
  }
  if (dirs.empty()) return Eigen::MatrixXd(n, 0);

  Eigen::MatrixXd w(n, static_cast<int>(dirs.size()));
  for (int j = 0; j < w.cols(); ++j) w.col(j) = dirs[j];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w);
  qr.setThreshold(1e-8);
  const int rank = static_cast<int>(qr.rank());
  Eigen::MatrixXd full = qr.householderQ();
  return full.leftCols(rank);
}

}  // namespace

FeasibilityResult psd_completion_feasible(const PartialMatrix& a, const RunConfig& cfg) {
  const Graph& g = a.graph;
  const int n = g.node_count();

  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a0(i, i) = a.diag[i];
  for (int e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    a0(i, j) = a0(j, i) = a.edge_values[e];
  }

  // max t s.t. a0 + sum_e h_e E_e - t I psd, posed as the dual of
  //   max <-a0, Xt> s.t. <E_e, Xt> = 0 (non-edges), <-I, Xt> = -1.
  SdpProblem p;
  p.n = n;
  p.sense = SdpSense::Max;
  p.objective = SymmetricMatrix(-a0);
  std::vector<Edge> nonedges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!g.has_edge(i, j)) nonedges.push_back({i, j});
  for (auto [i, j] : nonedges) p.add_constraint(SymmetricMatrix(pair_matrix(n, i, j)), 0.0);
  p.add_constraint(SymmetricMatrix(-Eigen::MatrixXd::Identity(n, n)), -1.0);

  SdpSolution sol = sdp_solve(p, cfg);
  if (sol.status == SdpStatus::NumericalTrouble)
    fail(ErrorKind::NumericalFailure, "feasibility SDP did not converge");

  FeasibilityResult res;
  res.min_eig_value = sol.y.back();

  const double scale = a.scale();
  if (res.min_eig_value < -cfg.tol_feas * scale) return res;

  Eigen::MatrixXd x = a0;
  for (size_t e = 0; e < nonedges.size(); ++e) {
    auto [i, j] = nonedges[e];
    x(i, j) = x(j, i) = 0.5 * sol.y[e];
  }

  // The unspecified values are dual variables here and inherit sqrt-of-gap
  // error whenever the data sits on a degenerate boundary face. Exactly then
  // the data forces kernel directions (null vectors of specified clique
  // blocks), and every completion must annihilate them: correcting the fills
  // in least squares against (x + D) W = 0 is consistent, so it pulls the
  // fills onto the forced face at machine precision. Generic interior data
  // has no forced directions and is left untouched.
  Eigen::MatrixXd w = forced_directions(a);
  if (!nonedges.empty() && w.cols() > 0) {
    const int q = static_cast<int>(w.cols());
    const int ne = static_cast<int>(nonedges.size());
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n * q, ne);
    for (int e = 0; e < ne; ++e) {
      auto [i, j] = nonedges[e];
      Eigen::MatrixXd ew = Eigen::MatrixXd::Zero(n, q);
      ew.row(i) = w.row(j);
      ew.row(j) = w.row(i);
      jac.col(e) = Eigen::Map<Eigen::VectorXd>(ew.data(), n * q);
    }
    Eigen::MatrixXd xw = x * w;
    Eigen::VectorXd r0 = Eigen::Map<Eigen::VectorXd>(xw.data(), n * q);
    auto cod = jac.completeOrthogonalDecomposition();
    cod.setThreshold(1e-9);
    Eigen::VectorXd d = cod.solve(-r0);

    Eigen::MatrixXd xp = x;
    for (int e = 0; e < ne; ++e) {
      auto [i, j] = nonedges[e];
      xp(i, j) = xp(j, i) = x(i, j) + d(e);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex0(x), ex1(xp);
    double lo_old = ex0.eigenvalues().minCoeff();
    double lo = ex1.eigenvalues().minCoeff(), hi = ex1.eigenvalues().maxCoeff();
    // keep the correction unless it made the matrix meaningfully less psd
    if (lo >= std::min(lo_old, 0.0) - 1e-10 * std::max(1.0, std::abs(hi)))
      x = std::move(xp);
  }

  res.completion = SymmetricMatrix(x);
  res.boundary = res.min_eig_value <= cfg.tol_feas * scale;
  return res;
}

namespace {

Eigen::MatrixXd stress_from_dual(const Graph& g, Edge e0, const std::vector<double>& y) {
  const int n = g.node_count();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) omega(i, i) = y[i];
  for (int e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    omega(i, j) = omega(j, i) = 0.5 * y[n + e];
  }
  omega(e0.first, e0.second) -= 0.5;
  omega(e0.second, e0.first) -= 0.5;
  return omega;
}

// The solver stops once the duality gap is small, which still leaves the
// stress acting on range(X) at roughly sqrt(gap) scale. Project y onto the
// complementary face (Omega annihilating the range, b'y held fixed) and keep
// the projection only when it tightens the certificate.
void polish_stress(const Graph& g, Edge e0, const SdpProblem& p, SdpSolution& sol,
                   Eigen::MatrixXd& omega) {
  auto d = dual_face_correction(p, sol.X.mat(), omega);
  if (!d) return;

  std::vector<double> y_pol(sol.y);
  for (size_t j = 0; j < y_pol.size(); ++j) y_pol[j] += (*d)(static_cast<int>(j));
  Eigen::MatrixXd omega_pol = stress_from_dual(g, e0, y_pol);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eo(omega_pol);
  double lo = eo.eigenvalues().minCoeff(), hi = eo.eigenvalues().maxCoeff();
  double comp_old = (sol.X.mat() * omega).norm();
  double comp_pol = (sol.X.mat() * omega_pol).norm();
  if (comp_pol > comp_old || lo < -1e-8 * std::max(1.0, std::abs(hi))) return;

  sol.y = std::move(y_pol);
  sol.S = SymmetricMatrix(omega_pol);
  omega = std::move(omega_pol);
}

StretchResult stretch_once(const Graph& g, const PartialMatrix& a, Edge e0,
                           const RunConfig& cfg) {
  const int n = g.node_count();
  SdpProblem p;
  p.n = n;
  p.sense = SdpSense::Max;
  p.objective = SymmetricMatrix(pair_matrix(n, e0.first, e0.second));
  for (int i = 0; i < n; ++i)
    p.add_constraint(SymmetricMatrix(pair_matrix(n, i, i)), a.diag[i]);
  for (int e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    p.add_constraint(SymmetricMatrix(pair_matrix(n, i, j)), a.edge_values[e]);
  }

  StretchResult out;
  out.solution = sdp_solve(p, cfg);

  Eigen::MatrixXd omega = stress_from_dual(g, e0, out.solution.y);
  if (out.solution.status == SdpStatus::Optimal)
    polish_stress(g, e0, p, out.solution, omega);

  StressCertificate cert;
  cert.e0 = e0;
  cert.w_diag.resize(n);
  for (int i = 0; i < n; ++i) cert.w_diag[i] = omega(i, i);
  cert.w_edges.resize(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    cert.w_edges[e] = omega(i, j);
  }
  cert.omega = SymmetricMatrix(omega);
  cert.complementarity = (out.solution.X.mat() * cert.omega.mat()).norm();
  cert.dual_value = out.solution.dual_objective;
  out.certificate = cert;
  out.optimum = out.solution.primal_objective;
  return out;
}

}  // namespace

StretchResult stretch(const Graph& g, const PartialMatrix& a, Edge e0,
                      const RunConfig& cfg) {
  e0 = normalized(e0.first, e0.second);
  if (e0.first == e0.second || e0.first < 0 || e0.second >= g.node_count())
    fail(ErrorKind::InvalidEdge, "stretch pair out of range");
  if (g.has_edge(e0.first, e0.second))
    fail(ErrorKind::InvalidEdge, "stretch pair must be a non-edge");
  if (a.graph.node_count() != g.node_count() || !(a.graph == g))
    fail(ErrorKind::DimensionMismatch, "data graph mismatch");

  FeasibilityResult feas = psd_completion_feasible(a, cfg);
  if (!feas.completion)
    fail(ErrorKind::InfeasibleData, "data admits no psd completion");

  if (!feas.boundary) {
    StretchResult res = stretch_once(g, a, e0, cfg);
    if (res.solution.status == SdpStatus::Optimal) return res;
  }

  // boundary data: three-stage diagonal regularization, eps -> 0 geometrically
  const double scale = a.scale();
  StretchResult res;
  double eps = cfg.regularize_eps * scale;
  for (int stage = 0; stage < 3; ++stage) {
    PartialMatrix reg = a;
    for (double& v : reg.diag) v += eps;
    res = stretch_once(g, reg, e0, cfg);
    res.regularized = true;
    res.regularize_eps_used = eps;
    if (stage < 2) eps *= 1e-2;
  }
  if (res.solution.status == SdpStatus::NumericalTrouble)
    fail(ErrorKind::NumericalFailure, "stretch SDP did not converge");
  return res;
}

std::optional<Edge> suggest_stretch_pair(const Graph& g) {
  std::optional<Edge> best;
  int best_score = -1;
  for (int i = 0; i < g.node_count(); ++i)
    for (int j = i + 1; j < g.node_count(); ++j) {
      if (g.has_edge(i, j)) continue;
      int score = std::min(g.degree(i), g.degree(j));
      if (score > best_score) {
        best_score = score;
        best = Edge{i, j};
      }
    }
  return best;
}

double equilibrium_residual(const GramConfiguration& p, const StressCertificate& cert) {
  if (p.n() != cert.omega.n())
    fail(ErrorKind::DimensionMismatch, "configuration size mismatch");
  Eigen::MatrixXd r = cert.omega.mat() * p.points;
  double worst = 0;
  for (int i = 0; i < p.n(); ++i) worst = std::max(worst, r.row(i).norm());
  return worst;
}

RankReduceResult rank_reduce(const SdpProblem& p, const SymmetricMatrix& x,
                             bool preserve_objective, const RunConfig& cfg) {
  if (x.n() != p.n) fail(ErrorKind::DimensionMismatch, "matrix size mismatch");
  std::vector<Eigen::MatrixXd> A;
  for (const auto& a : p.constraints) A.push_back(a.mat());
  if (preserve_objective) A.push_back(p.objective.mat());
  const int m = static_cast<int>(A.size());

  RankReduceResult res;
  Eigen::MatrixXd X = x.mat();

  for (int guard = 0; guard <= x.n(); ++guard) {
    auto eig = eig_sym(SymmetricMatrix(X));
    double cutoff = cfg.tol_rank * std::max(1.0, eig.values(0));
    int r = 0;
    while (r < x.n() && eig.values(r) > cutoff) ++r;
    res.rank = r;
    if (r == 0) break;

    Eigen::MatrixXd F(x.n(), r);
    for (int c = 0; c < r; ++c) F.col(c) = std::sqrt(eig.values(c)) * eig.vectors.col(c);

    const int rr2 = r * (r + 1) / 2;
    Eigen::MatrixXd B(m, rr2);
    for (int j = 0; j < m; ++j)
      B.row(j) = svec((F.transpose() * A[j] * F).eval()).transpose();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
    // rr2 > m guarantees a null direction; at or below the bound we keep
    // reducing only while the reduced system is actually rank-deficient
    bool have_null = rr2 > m;
    if (!have_null) {
      const auto& sv = svd.singularValues();
      have_null = sv(rr2 - 1) <= cfg.tol_rank * std::max(1.0, sv(0));
    }
    if (!have_null) break;
    Eigen::VectorXd null_dir = svd.matrixV().col(rr2 - 1);
    Eigen::MatrixXd delta = unsvec(null_dir, r);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(delta);
    double lo = ed.eigenvalues()(0), hi = ed.eigenvalues()(r - 1);
    double lam = std::abs(hi) >= std::abs(lo) ? hi : lo;
    if (std::abs(lam) < 1e-12) {
      res.stalled = true;
      break;
    }
    double t = -1.0 / lam;

    Eigen::MatrixXd Xnew = F * (Eigen::MatrixXd::Identity(r, r) + t * delta) * F.transpose();
    Xnew = 0.5 * (Xnew + Xnew.transpose()).eval();
    int rnew = numeric_rank(SymmetricMatrix(Xnew), cfg.tol_rank);
    if (rnew >= r) {
      res.stalled = true;
      break;
    }
    X = Xnew;
    res.rank_path.push_back(rnew);
  }

  res.X = SymmetricMatrix(X);
  res.rank = numeric_rank(res.X, cfg.tol_rank);
  return res;
}

SdpProblem maxcut_relaxation(const Graph& g) {
  const int n = g.node_count();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges()) {
    lap(i, i) += 1;
    lap(j, j) += 1;
    lap(i, j) -= 1;
    lap(j, i) -= 1;
  }
  SdpProblem p;
  p.n = n;
  p.sense = SdpSense::Max;
  p.objective = SymmetricMatrix(0.25 * lap);
  for (int i = 0; i < n; ++i) p.add_constraint(SymmetricMatrix(pair_matrix(n, i, i)), 1.0);
  return p;
}

Graph aggregated_sparsity(const SdpProblem& p) {
  std::vector<Edge> edges;
  for (int i = 0; i < p.n; ++i)
    for (int j = i + 1; j < p.n; ++j) {
      bool hit = p.objective.n() == p.n && p.objective(i, j) != 0.0;
      for (const auto& a : p.constraints) {
        if (hit) break;
        hit = a(i, j) != 0.0;
      }
      if (hit) edges.push_back({i, j});
    }
  return Graph(p.n, std::move(edges));
}

}  // namespace gramforge
