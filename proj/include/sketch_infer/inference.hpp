#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "sketch_infer/distributions.hpp"
#include "sketch_infer/estimators.hpp"
#include "sketch_infer/sketch_ops.hpp"

namespace sketch_infer {

enum class Target { BetaF, Beta0 };
enum class Regime { RepeatedSketch, RepeatedSample };
enum class TestMethod { CompleteT, CompleteF, CompleteChi2, WStarExact, PartialT, PartialChi2Univariate, MCCalibrated };

std::string_view to_string(Target t);
std::string_view to_string(Regime r);
std::string_view to_string(TestMethod m);
Regime parse_regime(std::string_view name);

struct TestResult {
  double statistic = 0.0;
  /// Reference law of the statistic under the null; empty for Monte Carlo calibration.
  std::optional<Law> pivot_law;
  std::string pivot_name;  // always set, e.g. "t(10)" or "mc(2000)"
  double p_value = 1.0;
  Target target = Target::BetaF;
  Regime regime = Regime::RepeatedSketch;
  TestMethod method = TestMethod::CompleteT;
  bool approximate = false;
};

struct ConfidenceInterval {
  int coefficient_index = 0;  // 0-based
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
};

/// Two-sided p-value 2·min(F, 1 − F).
double two_sided_p(const Law& law, double statistic);

/// Joint F test of β = beta_hyp from a complete sketch, F_{p,k−p}.
TestResult complete_joint_f_test(const SketchFit& fit, const SketchedData& sk, const Eigen::VectorXd& beta_hyp);

/// Marginal t test of β_j = beta_hyp_j (j 0-based), t_{k−p}. Target BetaF is the
/// repeated-sketching reading, Beta0 the approximate repeated-sampling one.
TestResult complete_marginal_t_test(const SketchFit& fit, const SketchedData& sk, int j, double beta_hyp_j,
                                    Target target);

ConfidenceInterval complete_marginal_ci(const SketchFit& fit, const SketchedData& sk, int j, double level);

/// Residual used in the denominator of the W★ F pivot.
enum class WStarResidual {
  /// SSR★ = yᵀy − ‖Pỹ_s‖² on n − p degrees of freedom. Its χ²_{n−p} law needs
  /// (I − Π)Xβ₀ = 0 for the rank-p projection Π, which holds at β₀ = 0.
  Full,
  /// Whitened sketched residual ‖L⁻¹(y_s − X_sβ★)‖² on k − p degrees of
  /// freedom. Exact for every β₀ because the whitened model is a classical
  /// Gaussian linear model with k rows.
  Sketched,
};

struct WStarTests {
  TestResult f;
  std::optional<TestResult> chi2;  // present when σ² is supplied
  double ssr_star = 0.0;
};

/// Exact tests of β₀ = beta_hyp from the efficient (W★-whitened) fit.
WStarTests wstar_exact_tests(const SketchFit& fit, const SketchedData& sk, double yty, const Eigen::VectorXd& beta_hyp,
                             std::optional<double> sigma2 = std::nullopt,
                             WStarResidual residual = WStarResidual::Full);

/// Marginal test of β₀_j = beta_hyp_j from the efficient fit, exact t_{k−p}
/// through the whitened residual.
TestResult wstar_marginal_t_test(const SketchFit& fit, const SketchedData& sk, int j, double beta_hyp_j);
ConfidenceInterval wstar_marginal_ci(const SketchFit& fit, const SketchedData& sk, int j, double level);

/// Marginal test of β₀_j under repeated sampling with W★ ≈ (n/k)I: same
/// statistic as the repeated-sketching test, flagged approximate.
TestResult complete_sampling_approx_test(const SketchFit& fit, const SketchedData& sk, int j, double beta_hyp_j);

/// Joint test of β₀ = beta_hyp calibrated by simulation. Observed statistic
/// (β_s − h)ᵀXᵀX(β_s − h)/p ÷ σ̂², σ̂² = SSR_s k/((n−p)(k−p)); reference draws
/// (V/p)(1 + V'/U)(n−p)(k−p)/(V'W) with V ~ χ²_p, U ~ χ²_{k−p+1}, V' ~ χ²_{n−p},
/// W ~ χ²_{k−p}, which is the exact joint law under Gaussian sketching.
/// p-value (1 + #{T ≥ t_obs})/(1 + mc_size).
TestResult mc_calibrated_sampling_test(const SketchFit& fit, const Eigen::MatrixXd& gram, int n, int k, int p,
                                       const Eigen::VectorXd& beta_hyp, int mc_size, std::uint64_t seed);

/// p = 1 partial sketch: (k−2)·beta_F_hyp/β_p against χ²_k, equal-tail two-sided.
TestResult partial_univariate_chi2_test(const SketchFit& fit, double beta_F_hyp, int k);

struct PartialTestOptions {
  Regime regime = Regime::RepeatedSketch;
  /// σ² used under RepeatedSample; defaults to SSR_s k/((n−p)(k−p)) from the sketch.
  std::optional<double> sigma2_proxy;
  /// Under RepeatedSample the σ² term enters as σ²·γ(k−p−1)·mᵀ(X_sᵀX_s)⁻¹m,
  /// the conditional variance of the noise part on the same scale as the other
  /// terms. true adds σ² alone.
  bool bare_sigma2_term = false;
};

/// Test of mᵀβ = 0 from a partial sketch, t_{k−p+1}.
TestResult partial_linear_combination_test(const SketchFit& fit, const SketchedData& sk, const Eigen::VectorXd& m_vec,
                                           const PartialTestOptions& options = {});
TestResult partial_marginal_t_test(const SketchFit& fit, const SketchedData& sk, int j,
                                   const PartialTestOptions& options = {});

}  // namespace sketch_infer
