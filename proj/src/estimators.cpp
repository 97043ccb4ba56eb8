#include "sketch_infer/estimators.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "sketch_infer/error.hpp"

namespace sketch_infer {

namespace {

void check_sketch(const SketchedData& sk) {
  require(sk.Xs.rows() == sk.ys.size() && sk.Xs.cols() == sk.p, ErrorCode::DimensionMismatch,
          "sketched data dimensions are inconsistent");
  require(sk.k() > sk.p, ErrorCode::RankDeficient,
          "need k > p (k=" + std::to_string(sk.k()) + ", p=" + std::to_string(sk.p) + ")");
}

// Whitening by the Cholesky factor of W★: returns (L⁻¹X_s, L⁻¹y_s).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> whiten(const SketchedData& sk) {
  require(sk.W_star.has_value(), ErrorCode::MissingWStar, "W* = SSᵀ was not retained for this sketch");
  const Eigen::MatrixXd& w = *sk.W_star;
  require(w.rows() == sk.k() && w.cols() == sk.k(), ErrorCode::DimensionMismatch, "W* has the wrong size");
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite, "W* is not positive definite");
  Eigen::MatrixXd xw = llt.matrixL().solve(sk.Xs);
  Eigen::VectorXd yw = llt.matrixL().solve(sk.ys);
  return {std::move(xw), std::move(yw)};
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Complete: return "complete";
    case EstimatorKind::Partial: return "partial";
    case EstimatorKind::EfficientStar: return "efficient";
  }
  return "unknown";
}

PartialInputs PartialInputs::from(const DataSet& data) {
  return {data.X().transpose() * data.y(), data.y().squaredNorm()};
}

void PartialInputs::validate() const {
  require(Xty.allFinite() && std::isfinite(yty), ErrorCode::NonFinite, "partial inputs contain NaN or Inf");
  require(yty >= 0.0, ErrorCode::DomainError, "yᵀy must be nonnegative");
}

SketchFit fit_complete(const SketchedData& sk) {
  check_sketch(sk);
  const LeastSquares ls = least_squares(sk.Xs, sk.ys);
  SketchFit fit;
  fit.beta = ls.beta;
  fit.kind = EstimatorKind::Complete;
  fit.SSR_s = ls.ssr;
  fit.gram_s_factor = ls.factor;
  fit.n = sk.n;
  fit.k = sk.k();
  fit.p = sk.p;
  return fit;
}

SketchFit fit_partial(const SketchedData& sk, const PartialInputs& partial) {
  check_sketch(sk);
  partial.validate();
  require(partial.Xty.size() == sk.p, ErrorCode::DimensionMismatch, "Xᵀy length differs from p");
  const int k = sk.k();
  require(k > sk.p + 1, ErrorCode::GammaNonpositive,
          "partial sketch needs k > p + 1 so that gamma = (k-p-1)/k > 0");
  SketchFit fit;
  fit.kind = EstimatorKind::Partial;
  fit.gamma = static_cast<double>(k - sk.p - 1) / static_cast<double>(k);
  fit.gram_s_factor = GramFactor::from_design(sk.Xs);
  fit.beta = *fit.gamma * fit.gram_s_factor.solve(partial.Xty);
  fit.SSM_p = partial.Xty.dot(fit.beta);
  fit.n = sk.n;
  fit.k = k;
  fit.p = sk.p;
  return fit;
}

SketchFit fit_efficient_star(const SketchedData& sk) {
  check_sketch(sk);
  require(sk.k() <= sk.n, ErrorCode::DimensionMismatch, "W*-based estimator needs k <= n");
  const auto [xw, yw] = whiten(sk);
  const LeastSquares ls = least_squares(xw, yw);
  SketchFit fit;
  fit.beta = ls.beta;
  fit.kind = EstimatorKind::EfficientStar;
  fit.SSR_s = ls.ssr;
  fit.gram_s_factor = ls.factor;
  fit.n = sk.n;
  fit.k = sk.k();
  fit.p = sk.p;
  return fit;
}

SsrStar ssr_star_detailed(const SketchedData& sk, double yty) {
  check_sketch(sk);
  require(std::isfinite(yty) && yty >= 0.0, ErrorCode::DomainError, "yᵀy must be finite and nonnegative");
  const auto [xw, yw] = whiten(sk);
  const LeastSquares ls = least_squares(xw, yw);
  // ‖P ỹ‖² = ‖ỹ‖² − ‖(I − P) ỹ‖²
  SsrStar out;
  out.raw = yty - (yw.squaredNorm() - ls.ssr);
  out.value = std::max(0.0, out.raw);
  if (out.raw < -1e-8 * yty) {
    out.clamped = true;
    std::cerr << "warning: SSR* = " << out.raw << " is negative beyond rounding; clamped to 0\n";
  }
  return out;
}

double ssr_star(const SketchedData& sk, double yty) { return ssr_star_detailed(sk, yty).value; }

double sigma2_hat_complete(double SSR_s, int n, int k, int p) {
  require(n > p && k > p, ErrorCode::DomainError, "sigma2_hat_complete needs n > p and k > p");
  require(std::isfinite(SSR_s) && SSR_s >= 0.0, ErrorCode::DomainError, "SSR_s must be finite and >= 0");
  return SSR_s * k / (static_cast<double>(n - p) * static_cast<double>(k - p));
}

namespace {

double residual_expectation(double yty, double SSM_F, int k, int p, double extra) {
  require(k > p + 3, ErrorCode::DomainError, "partial residual expectation needs k > p + 3");
  require(p >= 1, ErrorCode::DomainError, "p must be >= 1");
  const double a = static_cast<double>(k - p);
  const double num = (a - 1.0) * (p + 1.0) + extra;
  return yty + SSM_F * (num / (a * (a - 3.0)) - 1.0);
}

}  // namespace

double partial_residual_ss_expectation(double yty, double SSM_F, int k, int p) {
  return residual_expectation(yty, SSM_F, k, p, 1.0);
}

double partial_residual_ss_expectation_corrected(double yty, double SSM_F, int k, int p) {
  return residual_expectation(yty, SSM_F, k, p, 2.0);
}

}  // namespace sketch_infer
