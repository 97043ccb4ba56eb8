#pragma once

#include <Eigen/Dense>

namespace sketch_infer {

/// Factor of a Gram matrix AᵀA = P RᵀR Pᵀ kept as the triangular factor of a
/// column-pivoted QR of A, so nothing downstream forms an explicit inverse.
class GramFactor {
 public:
  GramFactor() = default;

  /// Factor of AᵀA from the tall matrix A. Throws RankDeficient when
  /// min|R_ii| / max|R_ii| < 1e-10.
  static GramFactor from_design(const Eigen::MatrixXd& a);
  /// Factor of a symmetric positive-definite matrix G (Cholesky, no pivoting).
  static GramFactor from_gram(const Eigen::MatrixXd& g);
  /// Factor taken from an existing column-pivoted QR of A.
  static GramFactor from_qr(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr);

  int dim() const { return static_cast<int>(r_.rows()); }
  const Eigen::MatrixXd& r() const { return r_; }
  const Eigen::VectorXi& permutation() const { return perm_; }

  /// (AᵀA)⁻¹ v
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;
  /// [(AᵀA)⁻¹]_jj
  double inv_diag(int j) const;
  /// vᵀ (AᵀA) v
  double quad(const Eigen::VectorXd& v) const;
  /// mᵀ (AᵀA)⁻¹ m
  double inv_quad(const Eigen::VectorXd& m) const;
  Eigen::MatrixXd gram() const;
  Eigen::MatrixXd inverse() const;
  /// log det(AᵀA)
  double log_det() const;

 private:
  Eigen::VectorXd to_factor_order(const Eigen::VectorXd& v) const;
  Eigen::VectorXd from_factor_order(const Eigen::VectorXd& v) const;

  Eigen::MatrixXd r_;    // upper triangular p×p
  Eigen::VectorXi perm_; // factor column c holds original column perm_[c]
};

struct LeastSquares {
  Eigen::VectorXd beta;
  double ssr = 0.0;  // squared residual norm from the orthogonal factor
  GramFactor factor;
};

/// min ‖b − A x‖ via column-pivoted Householder QR.
LeastSquares least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Symmetric square root and inverse square root from the eigendecomposition.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& g);
Eigen::MatrixXd symmetric_inv_sqrt(const Eigen::MatrixXd& g);

bool all_finite(const Eigen::MatrixXd& a);

}  // namespace sketch_infer
