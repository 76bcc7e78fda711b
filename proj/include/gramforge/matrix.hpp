#pragma once

#include <Eigen/Dense>

namespace gramforge {

/// Dense real symmetric matrix; symmetry is enforced on construction by
/// averaging with the transpose.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Eigen::MatrixXd& m);

  int n() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& mat() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

/// Points p_1..p_n in R^k, one per matrix row.
struct GramConfiguration {
  Eigen::MatrixXd points;  // n x k

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  SymmetricMatrix gram() const { return SymmetricMatrix(points * points.transpose()); }

  /// Same points in a wider ambient space, extra coordinates zero.
  GramConfiguration padded(int k) const;
};

}  // namespace gramforge
