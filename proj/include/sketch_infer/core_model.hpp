#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "sketch_infer/linalg.hpp"
#include "sketch_infer/rng.hpp"

namespace sketch_infer {

/// Full-data design X (n×p, full column rank) and response y. Validated once
/// on construction and immutable afterwards.
class DataSet {
 public:
  DataSet(Eigen::MatrixXd x, Eigen::VectorXd y);

  const Eigen::MatrixXd& X() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  int n() const { return static_cast<int>(x_.rows()); }
  int p() const { return static_cast<int>(x_.cols()); }

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
};

struct FullFit {
  Eigen::VectorXd beta_F;
  double SSR_F = 0.0;
  double SSM_F = 0.0;
  double yty = 0.0;
  Eigen::VectorXd Xty;
  GramFactor gram_factor;  // of XᵀX
};

struct ModelTruth {
  Eigen::VectorXd beta_0;
  double sigma2 = 1.0;

  void validate() const;
};

FullFit fit_full(const DataSet& data);

/// Xβ₀ + σ z with z standard normal drawn from the seed. sigma2 = 0 is allowed
/// here and returns Xβ₀ exactly.
Eigen::VectorXd simulate_response(const Eigen::MatrixXd& X, const ModelTruth& truth, std::uint64_t seed);
Eigen::VectorXd simulate_response(const Eigen::MatrixXd& X, const ModelTruth& truth, Engine& engine);

}  // namespace sketch_infer
