#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sketch_infer/core_model.hpp"
#include "sketch_infer/rng.hpp"

namespace sketch_infer {

// ---------------------------------------------------------------------------
// Multivariate t

struct MultivariateTParams {
  double df = 1.0;
  Eigen::VectorXd location;
  Eigen::MatrixXd scale_matrix;

  void validate() const;
};

double mvt_log_pdf(const MultivariateTParams& params, const Eigen::VectorXd& b);
double mvt_pdf(const MultivariateTParams& params, const Eigen::VectorXd& b);

/// Law of β_s under repeated sketching with the data fixed:
/// t_p[k−p+1, β_F, (XᵀX)⁻¹ SSR_F/(k−p+1)].
MultivariateTParams complete_sketching_t(const FullFit& full, int k);

// ---------------------------------------------------------------------------
// Complete sketch under repeated sampling

/// Exact density of β_s when both y and S are random:
/// β_s = β₀ + σ R^{-1/2} (XᵀX)^{-1/2} Z, R ~ Beta((k−p+1)/2, (n−p)/2),
/// which integrates to a Kummer-M form in Q = (b−β₀)ᵀXᵀX(b−β₀).
double complete_sampling_log_pdf(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram,
                                 int n, int k, int p);
double complete_sampling_pdf(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram, int n,
                             int k, int p);

/// Marginal law of coordinate j of β_s under repeated sampling.
class CompleteSamplingMarginal {
 public:
  CompleteSamplingMarginal(const ModelTruth& truth, const Eigen::MatrixXd& gram, int n, int k, int p, int j);
  double pdf(double x) const;
  double cdf(double x) const;
  double location() const { return mu_; }
  double scale() const { return scale_; }  // σ √[(XᵀX)⁻¹]_jj

 private:
  double mu_, scale_, alpha_, eta_;
  std::vector<double> r_nodes_, r_weights_;
};

/// β_s ≈ t_p{k−p+1, β₀, σ²(n−p)/(k−p+1)·(XᵀX)⁻¹}.
MultivariateTParams complete_sampling_approx_t(int n, int k, int p, const ModelTruth& truth,
                                               const Eigen::MatrixXd& gram);

/// Draws of β_s via the stochastic representation β₀ + σ(1 + V/U)^{1/2}(XᵀX)^{-1/2}Z,
/// U ~ χ²_{k−p+1}, V ~ χ²_{n−p}.
Eigen::MatrixXd sample_complete_sampling_rep(const ModelTruth& truth, const Eigen::MatrixXd& gram, int n, int k,
                                             int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Gamma-conditional-gamma (H) law and the SSR_s law

struct HLawParams {
  double alpha = 1.0;
  double lambda = 1.0;

  void validate() const;
};

/// H(u | λ, α) = 2^{1−(λ+α)}/(Γ(α)Γ(λ)) u^{(λ+α)/2−1} K_{α−λ}(√u): the law of
/// the product of independent χ²_{2α} and χ²_{2λ} variables.
double h_law_log_pdf(double u, const HLawParams& params);
double h_law_pdf(double u, const HLawParams& params);
/// E[U^r] = 4^r Γ(r+α)Γ(r+λ)/(Γ(α)Γ(λ)).
double h_law_moment(double order, const HLawParams& params);
double sample_h_law(const HLawParams& params, Engine& engine);

/// Parameters of k·SSR_s/σ² under repeated sampling: λ = (n−p)/2, α = (k−p)/2.
HLawParams ssr_s_h_params(int n, int k, int p);
/// Density of k·SSR_s/σ².
double scaled_ssr_law_pdf(double v, int n, int k, int p);
/// Density of SSR_s/σ² (change of variables from the scaled law).
double ssr_s_law_pdf(double u, int n, int k, int p);

// ---------------------------------------------------------------------------
// Ratio laws

/// Density of Q/U with Q ~ Γ(φ, scale 2) independent of U ~ H(λ, α):
/// 2^{−λ}Γ(α+φ)Γ(λ+φ)/(Γ(φ)Γ(α)Γ(λ)) r^{−λ−1} U(λ+φ, λ−α+1, 1/(2r)).
double ratio_law_log_pdf(double r, double phi, const HLawParams& params);
double ratio_law_pdf(double r, double phi, const HLawParams& params);
/// The same law with the power r^{−φ} in place of r^{−λ−1}. Kept only so its
/// failure to normalize can be demonstrated.
double ratio_law_pdf_literal(double r, double phi, const HLawParams& params);

/// Law of the repeated-sampling pivot T = (β_s−β₀)ᵀX_sᵀX_s(β_s−β₀)/p ÷ (n σ̂²/k),
/// σ̂² = SSR_s k/((n−p)(k−p)), under W★ ≈ (n/k)I: T = (Q/p)(n−p)(k−p)/U'.
double approx_ratio_pivot_pdf(double t, int n, int k, int p);
/// The closed-form display for that pivot with constants
/// ((n−p)/p)^{p/2−1}Γ(n/2)Γ(k/2)/(2^{(n−p)/2}Γ(p/2)Γ((k−p)/2)Γ((n−p)/2)) r^{−p/2}
/// U(n/2, (n−k+2)/2+1, (n−p)/(2kr)), evaluated literally.
double approx_ratio_display_pdf_literal(double r, int n, int k, int p);

struct GridDensity {
  std::vector<double> values;
  std::string method;  // "quadrature" or "monte_carlo"
};

/// Density of Q/(V·U), V ~ Beta(κ, β), from f(r) = ∫₀¹ v f_{Q/U}(r v) Beta(v; κ, β) dv.
/// Falls back to a kernel estimate from mc_size draws when quadrature fails.
GridDensity ratio_beta_law_pdf_mc(const std::vector<double>& r_grid, double phi, double kappa, double beta_param,
                                  const HLawParams& params, int mc_size, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Partial sketch laws

/// Options for the repeated-sketching representation of mᵀβ_p:
/// (c/R)[mᵀβ_F + {(SSM_F mᵀ(XᵀX)⁻¹m − (mᵀβ_F)²)/(k−p+2)}^{1/2} T].
struct PartialSketchingOptions {
  /// How R is parameterized.
  ///  ChiSquareScaled: R = χ²_{k−p+1}/(k−p−1) (unbiased; default)
  ///  ShapeRate:       R ~ Gamma(shape k−p+1, rate k−p−1)
  ///  ShapeScale:      R ~ Gamma(shape k−p+1, scale k−p−1)
  enum class RLaw { ChiSquareScaled, ShapeRate, ShapeScale } r_law = RLaw::ChiSquareScaled;
  /// T ~ t_{k−p+2} by default; true selects t_{k−p+1}.
  bool t_df_k_minus_p_plus_1 = false;
};

/// Validated scalars of the representation.
struct PartialSketchingRep {
  double center = 0.0;  // mᵀβ_F
  double spread = 0.0;  // {·}^{1/2}
  int k = 0;
  int p = 0;
};

PartialSketchingRep partial_sketching_rep(const Eigen::VectorXd& m_vec, const FullFit& fullfit,
                                          const Eigen::MatrixXd& gram_inv, int k, int p);

std::vector<double> sample_partial_sketching_rep(const Eigen::VectorXd& m_vec, const FullFit& fullfit,
                                                 const Eigen::MatrixXd& gram_inv, int k, int p, int count,
                                                 std::uint64_t seed, const PartialSketchingOptions& options = {});

/// CDF and density of the default representation by one-dimensional quadrature over R.
class PartialSketchingLaw {
 public:
  explicit PartialSketchingLaw(const PartialSketchingRep& rep);
  double cdf(double x) const;
  double pdf(double x) const;

 private:
  PartialSketchingRep rep_;
  double t_df_;
  std::vector<double> w_nodes_, w_weights_;  // χ²_{k−p+1} nodes
};

struct PartialSamplingOptions {
  /// Multiplier numerator (k−p−1) by default; true uses (k−p+1).
  bool factor_k_minus_p_plus_1 = false;
};

/// Non-centrality δ = {β₀ᵀXᵀXβ₀ − (mᵀβ₀)²/(mᵀ(XᵀX)⁻¹m)}/σ².
double partial_sampling_noncentrality(const Eigen::VectorXd& m_vec, const ModelTruth& truth,
                                      const Eigen::MatrixXd& gram);

/// Draws of (c/R)[mᵀβ₀ + σ(1 + U/V)^{1/2}{mᵀ(XᵀX)⁻¹m}^{1/2} Z], R ~ χ²_{k−p+1},
/// V ~ χ²_{k−p+2}, U ~ χ²_{p−1}(δ), Z ~ N(0,1).
std::vector<double> sample_partial_sampling_rep(const Eigen::VectorXd& m_vec, const ModelTruth& truth,
                                                const Eigen::MatrixXd& gram, int k, int p, int count,
                                                std::uint64_t seed, const PartialSamplingOptions& options = {});

/// Approximate density of β_p under repeated sampling (generalized hyperbolic
/// type). With G = XᵀX, η = γσ², t = bᵀGβ₀, s = t²/σ⁴ + kγβ₀ᵀGβ₀/σ², μ = (k+2−p)/2:
/// f(b) = 2^{(p−k)/2}Γ_p((k+1)/2) k^{−p/2}|G|^{1/2} / ((πη)^{p/2}Γ_p(k/2)Γ((k−p)/2+1))
///        · e^{t/σ²} (1 + bᵀGb/(kη))^{−(k+1)/2} s^{μ/2} K_μ(√s).
double partial_approx_log_pdf(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram, int k,
                              int p);
double partial_approx_pdf(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram, int k,
                          int p);
/// The same density with constant k^{−p(k+1)/2}, no |G|^{1/2}, and Bessel
/// argument t²/(γσ⁴) + kβ₀ᵀGβ₀/σ². Kept only to demonstrate its normalization.
double partial_approx_pdf_literal(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram,
                                  int k, int p);

/// Draws from the model the approximate density describes, used as its oracle:
/// B ~ W_p(k, I/k), z | B ~ N(γB⁻¹G^{1/2}β₀, γσ²B⁻¹), β = G^{−1/2}z.
Eigen::MatrixXd sample_partial_approx_model(const ModelTruth& truth, const Eigen::MatrixXd& gram, int k, int count,
                                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Helpers shared with inference and the harness

/// Nodes and weights for E[g(X)] when X has quantile function q, built as
/// composite Gauss–Legendre in probability space.
void quantile_nodes(const std::function<double(double)>& quantile, int panels, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace sketch_infer
