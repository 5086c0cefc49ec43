#pragma once

#include <Eigen/Dense>

namespace aeca {

// Thin SVD A = U * diag(sigma) * V^T with sigma sorted descending.
// U is m x n', V is n x n', n' = min(m, n).
struct SvdResult {
    Eigen::MatrixXd U;
    Eigen::VectorXd sigma;
    Eigen::MatrixXd V;
    int sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD. Columns are rotated pairwise until every
/// pair is orthogonal to working precision, which gives singular vectors that
/// are orthonormal to high relative accuracy even for tiny singular values.
/// Wide matrices are handled through the transpose.
/// Throws Error(SvdFailure) if max_sweeps is exhausted.
SvdResult jacobi_svd(const Eigen::MatrixXd& a, int max_sweeps = 80);

}  // namespace aeca
