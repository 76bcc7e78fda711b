#include "gramforge/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "gramforge/error.hpp"

namespace gramforge {

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "matrix must be square");
  m_ = 0.5 * (m + m.transpose());
}

GramConfiguration GramConfiguration::padded(int k) const {
  if (k < dim()) fail(ErrorKind::DimensionMismatch, "cannot pad to a smaller dimension");
  GramConfiguration out;
  out.points = Eigen::MatrixXd::Zero(n(), k);
  out.points.leftCols(dim()) = points;
  return out;
}

EigResult eig_sym(const SymmetricMatrix& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.mat());
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::NumericalFailure, "symmetric eigendecomposition did not converge");
  int n = x.n();
  EigResult r;
  r.values.resize(n);
  r.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    r.values(i) = solver.eigenvalues()(n - 1 - i);
    r.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return r;
}

int numeric_rank(const SymmetricMatrix& x, double tol_rel) {
  if (x.n() == 0) return 0;
  auto eig = eig_sym(x);
  double cutoff = tol_rel * std::max(1.0, eig.values(0));
  int rank = 0;
  for (int i = 0; i < x.n(); ++i)
    if (eig.values(i) > cutoff) ++rank;
  return rank;
}

bool is_psd(const SymmetricMatrix& x, double tol) {
  if (x.n() == 0) return true;
  auto eig = eig_sym(x);
  double lmax = eig.values(0);
  double lmin = eig.values(x.n() - 1);
  return lmin >= -tol * (1.0 + std::abs(lmax));
}

GramConfiguration gram_factor(const SymmetricMatrix& x, double tol_rel) {
  auto eig = eig_sym(x);
  int n = x.n();
  double lmax = n > 0 ? eig.values(0) : 0.0;
  double cutoff = tol_rel * std::max(1.0, lmax);
  if (n > 0 && eig.values(n - 1) < -std::max(cutoff, tol_rel))
    fail(ErrorKind::NotPsd, "matrix has a negative eigenvalue beyond tolerance");
  int k = 0;
  for (int i = 0; i < n; ++i)
    if (eig.values(i) > cutoff) ++k;
  GramConfiguration out;
  out.points.resize(n, k);
  for (int c = 0; c < k; ++c)
    out.points.col(c) = std::sqrt(eig.values(c)) * eig.vectors.col(c);
  return out;
}

Eigen::MatrixXd procrustes_align(const GramConfiguration& p, const GramConfiguration& q,
                                 const std::vector<int>& shared, double tol) {
  if (p.dim() != q.dim())
    fail(ErrorKind::DimensionMismatch, "configurations must share their ambient dimension");
  int d = p.dim();
  for (int h : shared)
    if (h < 0 || h >= p.n() || h >= q.n())
      fail(ErrorKind::DimensionMismatch, "shared index out of range");

  double scale = 1.0;
  for (int h : shared) {
    scale = std::max(scale, p.points.row(h).norm());
    scale = std::max(scale, q.points.row(h).norm());
  }
  for (size_t a = 0; a < shared.size(); ++a)
    for (size_t b = a; b < shared.size(); ++b) {
      double gp = p.points.row(shared[a]).dot(p.points.row(shared[b]));
      double gq = q.points.row(shared[a]).dot(q.points.row(shared[b]));
      if (std::abs(gp - gq) > tol * std::max(1.0, scale * scale))
        fail(ErrorKind::AlignmentInfeasible,
             "shared Gram blocks disagree beyond tolerance");
    }

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int h : shared) m += q.points.row(h).transpose() * p.points.row(h);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

SymmetricMatrix schur_complement(const SymmetricMatrix& x, int pivot_index) {
  int n = x.n();
  if (pivot_index < 0 || pivot_index >= n)
    fail(ErrorKind::DimensionMismatch, "pivot index out of range");
  if (n == 1) return SymmetricMatrix(Eigen::MatrixXd(0, 0));
  std::vector<int> rest;
  rest.reserve(n - 1);
  for (int i = 0; i < n; ++i)
    if (i != pivot_index) rest.push_back(i);

  Eigen::MatrixXd a(n - 1, n - 1);
  Eigen::VectorXd border(n - 1);
  for (int r = 0; r < n - 1; ++r) {
    border(r) = x(rest[r], pivot_index);
    for (int c = 0; c < n - 1; ++c) a(r, c) = x(rest[r], rest[c]);
  }
  double alpha = x(pivot_index, pivot_index);
  if (alpha > 1e-12) return SymmetricMatrix(a - border * border.transpose() / alpha);

  double scale = 1.0 + x.mat().cwiseAbs().maxCoeff();
  if (border.cwiseAbs().maxCoeff() <= 1e-9 * scale) return SymmetricMatrix(a);
  fail(ErrorKind::RankStructure, "zero pivot with nonzero border");
}

}  // namespace gramforge
