#pragma once

#include <vector>

#include "gramforge/matrix.hpp"

namespace gramforge {

struct EigResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, orthonormal, matching order
};

EigResult eig_sym(const SymmetricMatrix& x);

/// Count of eigenvalues above tol_rel * max(1, lambda_max). Intended for
/// psd matrices.
int numeric_rank(const SymmetricMatrix& x, double tol_rel = 1e-8);

bool is_psd(const SymmetricMatrix& x, double tol = 1e-8);

/// Rank-revealing psd factorization X = P P^T with P of width
/// numeric_rank(X). Throws not-psd when X has a significantly negative
/// eigenvalue.
GramConfiguration gram_factor(const SymmetricMatrix& x, double tol_rel = 1e-8);

/// Orthogonal U (d x d, reflections allowed) minimizing
/// sum_{h in shared} ||U p_h - q_h||^2. Configurations must share their
/// ambient dimension (pad the smaller first) and must agree on the shared
/// Gram block within tolerance, else alignment-infeasible.
Eigen::MatrixXd procrustes_align(const GramConfiguration& p, const GramConfiguration& q,
                                 const std::vector<int>& shared, double tol = 1e-8);

/// One-step Schur complement at pivot_index. A zero pivot is accepted only
/// when its whole row is zero (the row is then dropped unchanged); a zero
/// pivot with nonzero border is a rank-structure violation.
SymmetricMatrix schur_complement(const SymmetricMatrix& x, int pivot_index);

}  // namespace gramforge
