#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "sketch_infer/core_model.hpp"
#include "sketch_infer/linalg.hpp"
#include "sketch_infer/sketch_ops.hpp"

namespace sketch_infer {

enum class EstimatorKind { Complete, Partial, EfficientStar };

std::string_view to_string(EstimatorKind kind);

struct SketchFit {
  Eigen::VectorXd beta;
  EstimatorKind kind = EstimatorKind::Complete;
  /// Complete: ‖y_s − X_s β_s‖². EfficientStar: the whitened residual ‖L⁻¹(y_s − X_s β)‖², W★ = LLᵀ.
  std::optional<double> SSR_s;
  /// Partial only: yᵀXβ_p.
  std::optional<double> SSM_p;
  /// Partial only: (k − p − 1)/k.
  std::optional<double> gamma;
  /// XsᵀXs, or XsᵀW★⁻¹Xs for EfficientStar.
  GramFactor gram_s_factor;
  int n = 0;
  int k = 0;
  int p = 0;
};

/// Full-data summaries a partial sketch is allowed to use.
struct PartialInputs {
  Eigen::VectorXd Xty;
  double yty = 0.0;

  static PartialInputs from(const DataSet& data);
  void validate() const;
};

SketchFit fit_complete(const SketchedData& sk);
SketchFit fit_partial(const SketchedData& sk, const PartialInputs& partial);
SketchFit fit_efficient_star(const SketchedData& sk);

struct SsrStar {
  double value = 0.0;  // clamped at 0
  double raw = 0.0;
  bool clamped = false;  // raw < −1e-8·yᵀy
};

/// yᵀy − ‖P ỹ_s‖², where ỹ_s = L⁻¹ y_s and P projects on the columns of L⁻¹X_s.
SsrStar ssr_star_detailed(const SketchedData& sk, double yty);
double ssr_star(const SketchedData& sk, double yty);

/// SSR_s·k / ((n − p)(k − p)).
double sigma2_hat_complete(double SSR_s, int n, int k, int p);

/// E‖y − Xβ_p‖² over Gaussian sketches, in the closed form
/// yᵀy + SSM_F·{((k−p−1)(p+1) + 1)/((k−p)(k−p−3)) − 1}. Requires k > p + 3.
double partial_residual_ss_expectation(double yty, double SSM_F, int k, int p);
/// Same form with numerator (k−p−1)(p+1) + 2, which is what the
/// inverse-Wishart second moment E[W⁻²] gives.
double partial_residual_ss_expectation_corrected(double yty, double SSM_F, int k, int p);

}  // namespace sketch_infer
