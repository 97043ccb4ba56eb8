#include "sketch_infer/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketch_infer/error.hpp"
#include "sketch_infer/linalg.hpp"

namespace sketch_infer {

namespace {

void check_complete(const SketchFit& fit, const SketchedData& sk) {
  require(fit.kind == EstimatorKind::Complete, ErrorCode::DomainError, "test needs a complete-sketch fit");
  require(sk.p == fit.p && sk.k() == fit.k, ErrorCode::DimensionMismatch, "fit and sketch disagree on (k, p)");
  require(fit.SSR_s.has_value() && *fit.SSR_s > 0.0, ErrorCode::DegenerateSSR, "SSR_s must be positive");
}

void check_index(int j, int p) {
  require(j >= 0 && j < p, ErrorCode::IndexOutOfRange,
          "coefficient index " + std::to_string(j) + " outside [0, " + std::to_string(p) + ")");
}

double marginal_se(const SketchFit& fit, int j) {
  return std::sqrt(*fit.SSR_s / (fit.k - fit.p) * fit.gram_s_factor.inv_diag(j));
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string_view to_string(Target t) { return t == Target::BetaF ? "beta_F" : "beta_0"; }

std::string_view to_string(Regime r) {
  return r == Regime::RepeatedSketch ? "repeated_sketch" : "repeated_sample";
}

std::string_view to_string(TestMethod m) {
  switch (m) {
    case TestMethod::CompleteT: return "complete_t";
    case TestMethod::CompleteF: return "complete_f";
    case TestMethod::CompleteChi2: return "complete_chi2";
    case TestMethod::WStarExact: return "wstar_exact";
    case TestMethod::PartialT: return "partial_t";
    case TestMethod::PartialChi2Univariate: return "partial_chi2_univariate";
    case TestMethod::MCCalibrated: return "mc_calibrated";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  if (name == "repeated_sketch" || name == "sketch") return Regime::RepeatedSketch;
  if (name == "repeated_sample" || name == "sample") return Regime::RepeatedSample;
  fail(ErrorCode::ParseError, "unknown regime '" + std::string(name) + "' (valid: repeated_sketch, repeated_sample)");
}

double two_sided_p(const Law& law, double statistic) {
  const double lo = dist_cdf(law, statistic);
  const double hi = dist_sf(law, statistic);
  return clamp01(2.0 * std::min(lo, hi));
}

TestResult complete_joint_f_test(const SketchFit& fit, const SketchedData& sk, const Eigen::VectorXd& beta_hyp) {
  check_complete(fit, sk);
  require(beta_hyp.size() == fit.p, ErrorCode::DimensionMismatch, "beta_hyp must have length p");
  const int p = fit.p;
  const int k = fit.k;
  const double q = fit.gram_s_factor.quad(fit.beta - beta_hyp);
  TestResult r;
  r.statistic = (q / p) / (*fit.SSR_s / (k - p));
  const Law law = FisherF{static_cast<double>(p), static_cast<double>(k - p)};
  r.pivot_law = law;
  r.pivot_name = describe(law);
  r.p_value = clamp01(dist_sf(law, r.statistic));
  r.method = TestMethod::CompleteF;
  return r;
}

TestResult complete_marginal_t_test(const SketchFit& fit, const SketchedData& sk, int j, double beta_hyp_j,
                                    Target target) {
  check_complete(fit, sk);
  check_index(j, fit.p);
  TestResult r;
  r.statistic = (fit.beta(j) - beta_hyp_j) / marginal_se(fit, j);
  const Law law = StudentT{static_cast<double>(fit.k - fit.p)};
  r.pivot_law = law;
  r.pivot_name = describe(law);
  r.p_value = two_sided_p(law, r.statistic);
  r.target = target;
  r.regime = target == Target::BetaF ? Regime::RepeatedSketch : Regime::RepeatedSample;
  r.method = TestMethod::CompleteT;
  r.approximate = target == Target::Beta0;
  return r;
}

ConfidenceInterval complete_marginal_ci(const SketchFit& fit, const SketchedData& sk, int j, double level) {
  check_complete(fit, sk);
  check_index(j, fit.p);
  require(level > 0.0 && level < 1.0, ErrorCode::DomainError, "level must lie in (0, 1)");
  const double q = dist_quantile(StudentT{static_cast<double>(fit.k - fit.p)}, 0.5 * (1.0 + level));
  const double half = q * marginal_se(fit, j);
  return {j, fit.beta(j) - half, fit.beta(j) + half, level};
}

WStarTests wstar_exact_tests(const SketchFit& fit, const SketchedData& sk, double yty, const Eigen::VectorXd& beta_hyp,
                             std::optional<double> sigma2, WStarResidual residual) {
  require(sk.W_star.has_value(), ErrorCode::MissingWStar, "W* = SSᵀ was not retained for this sketch");
  require(fit.kind == EstimatorKind::EfficientStar, ErrorCode::DomainError, "W* tests need the efficient fit");
  require(beta_hyp.size() == fit.p, ErrorCode::DimensionMismatch, "beta_hyp must have length p");
  const int p = fit.p;
  const int n = fit.n;
  const int k = fit.k;
  const double q = fit.gram_s_factor.quad(fit.beta - beta_hyp);
  WStarTests out;
  out.ssr_star = ssr_star(sk, yty);
  double denom = 0.0;
  Law law = FisherF{static_cast<double>(p), static_cast<double>(n - p)};
  if (residual == WStarResidual::Full) {
    require(out.ssr_star > 0.0, ErrorCode::DegenerateSSR, "SSR* must be positive");
    denom = out.ssr_star / (n - p);
  } else {
    require(fit.SSR_s.has_value() && *fit.SSR_s > 0.0, ErrorCode::DegenerateSSR, "whitened SSR must be positive");
    denom = *fit.SSR_s / (k - p);
    law = FisherF{static_cast<double>(p), static_cast<double>(k - p)};
  }
  out.f.statistic = (q / p) / denom;
  out.f.pivot_law = law;
  out.f.pivot_name = describe(law);
  out.f.p_value = clamp01(dist_sf(law, out.f.statistic));
  out.f.target = Target::Beta0;
  out.f.regime = Regime::RepeatedSample;
  out.f.method = TestMethod::WStarExact;
  if (sigma2) {
    require(*sigma2 > 0.0 && std::isfinite(*sigma2), ErrorCode::DomainError, "sigma2 must be positive");
    TestResult c;
    c.statistic = q / *sigma2;
    const Law chi = Chi2{static_cast<double>(p)};
    c.pivot_law = chi;
    c.pivot_name = describe(chi);
    c.p_value = clamp01(dist_sf(chi, c.statistic));
    c.target = Target::Beta0;
    c.regime = Regime::RepeatedSample;
    c.method = TestMethod::CompleteChi2;
    out.chi2 = c;
  }
  return out;
}

namespace {

void check_efficient(const SketchFit& fit, const SketchedData& sk) {
  require(sk.W_star.has_value(), ErrorCode::MissingWStar, "W* = SSᵀ was not retained for this sketch");
  require(fit.kind == EstimatorKind::EfficientStar, ErrorCode::DomainError, "W* tests need the efficient fit");
  require(fit.SSR_s.has_value() && *fit.SSR_s > 0.0, ErrorCode::DegenerateSSR, "whitened SSR must be positive");
}

}  // namespace

TestResult wstar_marginal_t_test(const SketchFit& fit, const SketchedData& sk, int j, double beta_hyp_j) {
  check_efficient(fit, sk);
  check_index(j, fit.p);
  TestResult r;
  r.statistic = (fit.beta(j) - beta_hyp_j) / marginal_se(fit, j);
  const Law law = StudentT{static_cast<double>(fit.k - fit.p)};
  r.pivot_law = law;
  r.pivot_name = describe(law);
  r.p_value = two_sided_p(law, r.statistic);
  r.target = Target::Beta0;
  r.regime = Regime::RepeatedSample;
  r.method = TestMethod::WStarExact;
  return r;
}

ConfidenceInterval wstar_marginal_ci(const SketchFit& fit, const SketchedData& sk, int j, double level) {
  check_efficient(fit, sk);
  check_index(j, fit.p);
  require(level > 0.0 && level < 1.0, ErrorCode::DomainError, "level must lie in (0, 1)");
  const double q = dist_quantile(StudentT{static_cast<double>(fit.k - fit.p)}, 0.5 * (1.0 + level));
  const double half = q * marginal_se(fit, j);
  return {j, fit.beta(j) - half, fit.beta(j) + half, level};
}

TestResult complete_sampling_approx_test(const SketchFit& fit, const SketchedData& sk, int j, double beta_hyp_j) {
  return complete_marginal_t_test(fit, sk, j, beta_hyp_j, Target::Beta0);
}

TestResult mc_calibrated_sampling_test(const SketchFit& fit, const Eigen::MatrixXd& gram, int n, int k, int p,
                                       const Eigen::VectorXd& beta_hyp, int mc_size, std::uint64_t seed) {
  require(fit.kind == EstimatorKind::Complete, ErrorCode::DomainError, "test needs a complete-sketch fit");
  require(n > p && k > p && p >= 1, ErrorCode::DomainError, "need n > p, k > p");
  require(fit.p == p && gram.rows() == p && gram.cols() == p && beta_hyp.size() == p, ErrorCode::DimensionMismatch,
          "dimensions disagree with p");
  require(mc_size >= 1, ErrorCode::DomainError, "mc_size must be >= 1");
  require(fit.SSR_s.has_value() && *fit.SSR_s > 0.0, ErrorCode::DegenerateSSR, "SSR_s must be positive");
  const Eigen::VectorXd d = fit.beta - beta_hyp;
  const double sigma2_hat = sigma2_hat_complete(*fit.SSR_s, n, k, p);
  TestResult r;
  r.statistic = d.dot(gram * d) / p / sigma2_hat;
  const double scale = static_cast<double>(n - p) * (k - p) / p;
  Engine engine = make_engine(seed);
  long exceed = 0;
  for (int i = 0; i < mc_size; ++i) {
    const double v = draw_chi2(p, engine);
    const double u = draw_chi2(k - p + 1, engine);
    const double vp = draw_chi2(n - p, engine);
    const double w = draw_chi2(k - p, engine);
    if (v * (1.0 + vp / u) * scale / (vp * w) >= r.statistic) ++exceed;
  }
  r.p_value = (1.0 + exceed) / (1.0 + mc_size);
  r.pivot_name = "mc(" + std::to_string(mc_size) + ")";
  r.target = Target::Beta0;
  r.regime = Regime::RepeatedSample;
  r.method = TestMethod::MCCalibrated;
  return r;
}

TestResult partial_univariate_chi2_test(const SketchFit& fit, double beta_F_hyp, int k) {
  require(fit.kind == EstimatorKind::Partial, ErrorCode::DomainError, "test needs a partial-sketch fit");
  require(fit.p == 1, ErrorCode::DomainError, "the chi-square pivot is for p = 1 only");
  require(k == fit.k, ErrorCode::DimensionMismatch, "k differs from the fit");
  require(fit.beta(0) != 0.0, ErrorCode::DivideByZero, "beta_p is exactly zero");
  TestResult r;
  r.statistic = (k - 2) * beta_F_hyp / fit.beta(0);
  const Law law = Chi2{static_cast<double>(k)};
  r.pivot_law = law;
  r.pivot_name = describe(law);
  r.p_value = r.statistic <= 0.0 ? 0.0 : two_sided_p(law, r.statistic);
  r.method = TestMethod::PartialChi2Univariate;
  return r;
}

TestResult partial_linear_combination_test(const SketchFit& fit, const SketchedData& sk, const Eigen::VectorXd& m_vec,
                                           const PartialTestOptions& options) {
  require(fit.kind == EstimatorKind::Partial && fit.SSM_p && fit.gamma, ErrorCode::DomainError,
          "test needs a partial-sketch fit");
  require(m_vec.size() == fit.p && sk.p == fit.p, ErrorCode::DimensionMismatch, "m must have length p");
  require(m_vec.allFinite() && m_vec.norm() > 0.0, ErrorCode::DomainError, "m must be finite and nonzero");
  const int k = fit.k;
  const int p = fit.p;
  const double gamma = *fit.gamma;
  // Under repeated sketching the direction to avoid is Xᵀy = X_sᵀX_s β_p/γ;
  // under repeated sampling β_p stands in for the unknown β₀.
  const Eigen::VectorXd ref = options.regime == Regime::RepeatedSketch
                                  ? Eigen::VectorXd(fit.gram_s_factor.gram() * fit.beta / gamma)
                                  : fit.beta;
  const double nr = ref.norm();
  if (nr > 0.0) {
    const double cosine = std::abs(m_vec.dot(ref)) / (m_vec.norm() * nr);
    require(!(std::abs(1.0 - cosine) <= 1e-12), ErrorCode::AssumptionViolated,
            options.regime == Regime::RepeatedSketch
                ? "m is parallel to Xᵀy; then mᵀβ_p is proportional to SSM_p = γ yᵀX(X_sᵀX_s)⁻¹Xᵀy, which "
                  "follows an inverse gamma law, and the t pivot does not apply"
                : "m is parallel to beta_0 (estimated by beta_p); the t pivot does not apply");
  }
  const double mb = m_vec.dot(fit.beta);
  const double mam = fit.gram_s_factor.inv_quad(m_vec);
  double denom = *fit.SSM_p * gamma * mam - mb * mb;
  if (options.regime == Regime::RepeatedSample) {
    double s2 = 0.0;
    if (options.sigma2_proxy) {
      s2 = *options.sigma2_proxy;
    } else {
      require(sk.k() == k, ErrorCode::DimensionMismatch, "sketch and fit disagree on k");
      const LeastSquares ls = least_squares(sk.Xs, sk.ys);
      s2 = sigma2_hat_complete(ls.ssr, sk.n, k, p);
    }
    require(std::isfinite(s2) && s2 >= 0.0, ErrorCode::DomainError, "sigma2 proxy must be finite and >= 0");
    denom += options.bare_sigma2_term ? s2 : s2 * gamma * (k - p - 1) * mam;
  }
  require(denom > 0.0, ErrorCode::NegativeDenominator,
          "pivot denominator is " + std::to_string(denom) + " <= 0 for this sketch");
  TestResult r;
  r.statistic = mb * std::sqrt((k - p + 1) / denom);
  const Law law = StudentT{static_cast<double>(k - p + 1)};
  r.pivot_law = law;
  r.pivot_name = describe(law);
  r.p_value = two_sided_p(law, r.statistic);
  r.target = options.regime == Regime::RepeatedSketch ? Target::BetaF : Target::Beta0;
  r.regime = options.regime;
  r.method = TestMethod::PartialT;
  r.approximate = options.regime == Regime::RepeatedSample;
  return r;
}

TestResult partial_marginal_t_test(const SketchFit& fit, const SketchedData& sk, int j,
                                   const PartialTestOptions& options) {
  check_index(j, fit.p);
  return partial_linear_combination_test(fit, sk, Eigen::VectorXd::Unit(fit.p, j), options);
}

}  // namespace sketch_infer
