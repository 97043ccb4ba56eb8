#include "sketch_infer/linalg.hpp"

#include <cmath>

#include "sketch_infer/error.hpp"

namespace sketch_infer {

namespace {

constexpr double kRankTol = 1e-10;

void check_rank(const Eigen::MatrixXd& r) {
  const Eigen::VectorXd d = r.diagonal().cwiseAbs();
  const double mx = d.maxCoeff();
  const double mn = d.minCoeff();
  require(mx > 0.0 && mn / mx >= kRankTol, ErrorCode::RankDeficient,
          "triangular factor has min/max diagonal ratio " + std::to_string(mx > 0.0 ? mn / mx : 0.0) +
              " below 1e-10");
}

}  // namespace

GramFactor GramFactor::from_design(const Eigen::MatrixXd& a) {
  require(a.rows() >= a.cols() && a.cols() > 0, ErrorCode::DimensionMismatch,
          "design needs at least as many rows as columns");
  require(all_finite(a), ErrorCode::NonFinite, "design contains NaN or Inf");
  return from_qr(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(a));
}

GramFactor GramFactor::from_qr(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
  GramFactor f;
  const Eigen::Index p = qr.matrixQR().cols();
  f.r_ = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  f.perm_ = qr.colsPermutation().indices();
  check_rank(f.r_);
  return f;
}

GramFactor GramFactor::from_gram(const Eigen::MatrixXd& g) {
  require(g.rows() == g.cols() && g.rows() > 0, ErrorCode::DimensionMismatch, "Gram matrix must be square");
  require(all_finite(g), ErrorCode::NonFinite, "Gram matrix contains NaN or Inf");
  require((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + g.cwiseAbs().maxCoeff()),
          ErrorCode::DimensionMismatch, "Gram matrix is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite, "Gram matrix is not positive definite");
  GramFactor f;
  f.r_ = llt.matrixU();
  f.perm_ = Eigen::VectorXi::LinSpaced(g.rows(), 0, static_cast<int>(g.rows()) - 1);
  check_rank(f.r_);
  return f;
}

Eigen::VectorXd GramFactor::to_factor_order(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) out(c) = v(perm_(c));
  return out;
}

Eigen::VectorXd GramFactor::from_factor_order(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) out(perm_(c)) = v(c);
  return out;
}

Eigen::VectorXd GramFactor::solve(const Eigen::VectorXd& v) const {
  require(v.size() == dim(), ErrorCode::DimensionMismatch, "solve: vector length differs from factor");
  Eigen::VectorXd w = to_factor_order(v);
  r_.triangularView<Eigen::Upper>().transpose().solveInPlace(w);
  r_.triangularView<Eigen::Upper>().solveInPlace(w);
  return from_factor_order(w);
}

double GramFactor::inv_diag(int j) const {
  require(j >= 0 && j < dim(), ErrorCode::IndexOutOfRange, "inv_diag index out of range");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim());
  e(j) = 1.0;
  return inv_quad(e);
}

double GramFactor::quad(const Eigen::VectorXd& v) const {
  require(v.size() == dim(), ErrorCode::DimensionMismatch, "quad: vector length differs from factor");
  return (r_.triangularView<Eigen::Upper>() * to_factor_order(v)).squaredNorm();
}

double GramFactor::inv_quad(const Eigen::VectorXd& m) const {
  require(m.size() == dim(), ErrorCode::DimensionMismatch, "inv_quad: vector length differs from factor");
  Eigen::VectorXd w = to_factor_order(m);
  r_.triangularView<Eigen::Upper>().transpose().solveInPlace(w);
  return w.squaredNorm();
}

Eigen::MatrixXd GramFactor::gram() const {
  const Eigen::MatrixXd rtr = r_.transpose() * r_;
  Eigen::MatrixXd g(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) g(perm_(i), perm_(j)) = rtr(i, j);
  return g;
}

Eigen::MatrixXd GramFactor::inverse() const {
  Eigen::MatrixXd out(dim(), dim());
  for (int j = 0; j < dim(); ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim());
    e(j) = 1.0;
    out.col(j) = solve(e);
  }
  return 0.5 * (out + out.transpose());
}

double GramFactor::log_det() const { return 2.0 * r_.diagonal().cwiseAbs().array().log().sum(); }

LeastSquares least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  require(a.rows() == b.size(), ErrorCode::DimensionMismatch, "least_squares: row count differs from rhs");
  require(a.rows() >= a.cols() && a.cols() > 0, ErrorCode::DimensionMismatch,
          "least_squares needs at least as many rows as columns");
  require(all_finite(a) && b.allFinite(), ErrorCode::NonFinite, "least_squares input contains NaN or Inf");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index p = a.cols();
  LeastSquares out;
  out.factor = GramFactor::from_qr(qr);
  const Eigen::MatrixXd& r = out.factor.r();
  Eigen::VectorXd qtb = qr.householderQ().adjoint() * b;
  Eigen::VectorXd z = qtb.head(p);
  r.triangularView<Eigen::Upper>().solveInPlace(z);
  out.beta = qr.colsPermutation() * z;
  out.ssr = qtb.tail(a.rows() - p).squaredNorm();
  return out;
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0, ErrorCode::NotPositiveDefinite,
          "symmetric_sqrt needs a positive-definite matrix");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd symmetric_inv_sqrt(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0, ErrorCode::NotPositiveDefinite,
          "symmetric_inv_sqrt needs a positive-definite matrix");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

bool all_finite(const Eigen::MatrixXd& a) { return a.allFinite(); }

}  // namespace sketch_infer
