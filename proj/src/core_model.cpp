#include "sketch_infer/core_model.hpp"

#include <cmath>
#include <string>

#include "sketch_infer/distributions.hpp"
#include "sketch_infer/error.hpp"

namespace sketch_infer {

DataSet::DataSet(Eigen::MatrixXd x, Eigen::VectorXd y) : x_(std::move(x)), y_(std::move(y)) {
  require(x_.rows() == y_.size(), ErrorCode::DimensionMismatch,
          "X has " + std::to_string(x_.rows()) + " rows but y has " + std::to_string(y_.size()));
  require(x_.cols() >= 1, ErrorCode::DimensionMismatch, "X needs at least one column");
  require(x_.rows() > x_.cols(), ErrorCode::DimensionMismatch, "need n > p");
  require(x_.allFinite() && y_.allFinite(), ErrorCode::NonFinite, "data contain NaN or Inf");
  GramFactor::from_design(x_);  // rank check
}

void ModelTruth::validate() const {
  require(beta_0.size() > 0 && beta_0.allFinite(), ErrorCode::NonFinite, "beta_0 must be finite and nonempty");
  require(sigma2 > 0.0 && std::isfinite(sigma2), ErrorCode::DomainError, "sigma2 must be positive");
}

FullFit fit_full(const DataSet& data) {
  const LeastSquares ls = least_squares(data.X(), data.y());
  FullFit out;
  out.beta_F = ls.beta;
  out.SSR_F = ls.ssr;
  out.yty = data.y().squaredNorm();
  out.SSM_F = std::max(0.0, out.yty - out.SSR_F);
  out.Xty = data.X().transpose() * data.y();
  out.gram_factor = ls.factor;
  return out;
}

Eigen::VectorXd simulate_response(const Eigen::MatrixXd& X, const ModelTruth& truth, Engine& engine) {
  require(X.cols() == truth.beta_0.size(), ErrorCode::DimensionMismatch, "beta_0 length differs from X columns");
  require(truth.sigma2 >= 0.0 && std::isfinite(truth.sigma2), ErrorCode::DomainError, "sigma2 must be >= 0");
  Eigen::VectorXd y = X * truth.beta_0;
  if (truth.sigma2 == 0.0) return y;
  const double sigma = std::sqrt(truth.sigma2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sigma * draw_normal(engine);
  return y;
}

Eigen::VectorXd simulate_response(const Eigen::MatrixXd& X, const ModelTruth& truth, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  return simulate_response(X, truth, engine);
}

}  // namespace sketch_infer
