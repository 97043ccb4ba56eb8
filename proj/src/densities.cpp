#include "sketch_infer/densities.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "sketch_infer/distributions.hpp"
#include "sketch_infer/error.hpp"
#include "sketch_infer/linalg.hpp"
#include "sketch_infer/quadrature.hpp"
#include "sketch_infer/special_fn.hpp"

namespace sketch_infer {

namespace {

const double kLogPi = std::log(boost::math::constants::pi<double>());
const double kLog2 = std::log(2.0);

double safe_exp(double l) { return l < -745.0 ? 0.0 : std::exp(l); }

void check_gram(const Eigen::MatrixXd& gram, int p) {
  require(gram.rows() == p && gram.cols() == p, ErrorCode::DimensionMismatch, "Gram matrix must be p×p");
}

void check_truth(const ModelTruth& truth, int p) {
  truth.validate();
  require(truth.beta_0.size() == p, ErrorCode::DimensionMismatch, "beta_0 length differs from p");
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * boost::math::constants::pi<double>()); }

// Cholesky with a PD check.
Eigen::LLT<Eigen::MatrixXd> chol(const Eigen::MatrixXd& g, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite, std::string(what) + " is not positive definite");
  return llt;
}

double llt_log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

// ---------------------------------------------------------------------------

void quantile_nodes(const std::function<double(double)>& quantile, int panels, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  nodes.clear();
  weights.clear();
  const double pi = boost::math::constants::pi<double>();
  // Chebyshev-spaced panels crowd both ends, where quantiles are steep.
  for (int i = 0; i < panels; ++i) {
    const double a = 0.5 * (1.0 - std::cos(pi * i / panels));
    const double b = 0.5 * (1.0 - std::cos(pi * (i + 1) / panels));
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const auto& xs = Rule::abscissa();
    const auto& ws = Rule::weights();
    for (std::size_t j = 0; j < xs.size(); ++j) {
      for (double sign : {-1.0, 1.0}) {
        if (xs[j] == 0.0 && sign > 0.0) continue;
        const double u = mid + sign * half * xs[j];
        nodes.push_back(quantile(u));
        weights.push_back(half * ws[j]);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Multivariate t

void MultivariateTParams::validate() const {
  require(df > 0.0 && std::isfinite(df), ErrorCode::DomainError, "t df must be positive");
  require(location.size() > 0 && scale_matrix.rows() == location.size() && scale_matrix.cols() == location.size(),
          ErrorCode::DimensionMismatch, "t location and scale sizes disagree");
  chol(scale_matrix, "t scale matrix");
}

double mvt_log_pdf(const MultivariateTParams& params, const Eigen::VectorXd& b) {
  params.validate();
  require(b.size() == params.location.size(), ErrorCode::DimensionMismatch, "point has the wrong dimension");
  const auto llt = chol(params.scale_matrix, "t scale matrix");
  const double p = static_cast<double>(b.size());
  const double nu = params.df;
  const Eigen::VectorXd z = llt.matrixL().solve(b - params.location);
  const double delta = z.squaredNorm();
  return log_gamma(0.5 * (nu + p)) - log_gamma(0.5 * nu) - 0.5 * p * (std::log(nu) + kLogPi) -
         0.5 * llt_log_det(llt) - 0.5 * (nu + p) * std::log1p(delta / nu);
}

double mvt_pdf(const MultivariateTParams& params, const Eigen::VectorXd& b) {
  return safe_exp(mvt_log_pdf(params, b));
}

MultivariateTParams complete_sketching_t(const FullFit& full, int k) {
  const int p = full.gram_factor.dim();
  require(k > p - 1, ErrorCode::DomainError, "need k > p - 1");
  const double df = k - p + 1;
  return {df, full.beta_F, full.gram_factor.inverse() * (full.SSR_F / df)};
}

// ---------------------------------------------------------------------------
// Complete sketch under repeated sampling

double complete_sampling_log_pdf(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram,
                                 int n, int k, int p) {
  require(n > p && k > p - 1 && p >= 1, ErrorCode::DomainError, "need n > p and k > p - 1");
  check_truth(truth, p);
  check_gram(gram, p);
  require(b.size() == p, ErrorCode::DimensionMismatch, "point has the wrong dimension");
  const auto llt = chol(gram, "XᵀX");
  const Eigen::VectorXd d = b - truth.beta_0;
  const double q = (llt.matrixU() * d).squaredNorm();
  const double alpha = 0.5 * (k - p + 1);
  const double eta = 0.5 * (n - p);
  const double half_p = 0.5 * p;
  return 0.5 * llt_log_det(llt) - half_p * std::log(truth.sigma2) - half_p * (kLog2 + kLogPi) +
         log_gamma(alpha + half_p) + log_gamma(alpha + eta) - log_gamma(alpha) - log_gamma(alpha + eta + half_p) +
         log_kummer_m(alpha + half_p, alpha + eta + half_p, -q / (2.0 * truth.sigma2));
}

double complete_sampling_pdf(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram, int n,
                             int k, int p) {
  return safe_exp(complete_sampling_log_pdf(b, truth, gram, n, k, p));
}

CompleteSamplingMarginal::CompleteSamplingMarginal(const ModelTruth& truth, const Eigen::MatrixXd& gram, int n, int k,
                                                   int p, int j) {
  require(n > p && k > p - 1 && p >= 1, ErrorCode::DomainError, "need n > p and k > p - 1");
  check_truth(truth, p);
  check_gram(gram, p);
  require(j >= 0 && j < p, ErrorCode::IndexOutOfRange, "coefficient index out of range");
  const GramFactor f = GramFactor::from_gram(gram);
  mu_ = truth.beta_0(j);
  scale_ = std::sqrt(truth.sigma2 * f.inv_diag(j));
  alpha_ = 0.5 * (k - p + 1);
  eta_ = 0.5 * (n - p);
  const boost::math::beta_distribution<double> law(alpha_, eta_);
  quantile_nodes([&law](double u) { return boost::math::quantile(law, u); }, 64, r_nodes_, r_weights_);
}

double CompleteSamplingMarginal::cdf(double x) const {
  double acc = 0.0;
  const double z = (x - mu_) / scale_;
  for (std::size_t i = 0; i < r_nodes_.size(); ++i) acc += r_weights_[i] * std_normal_cdf(z * std::sqrt(r_nodes_[i]));
  return std::clamp(acc, 0.0, 1.0);
}

double CompleteSamplingMarginal::pdf(double x) const {
  double acc = 0.0;
  const double z = (x - mu_) / scale_;
  for (std::size_t i = 0; i < r_nodes_.size(); ++i) {
    const double sr = std::sqrt(r_nodes_[i]);
    acc += r_weights_[i] * sr * std_normal_pdf(z * sr);
  }
  return acc / scale_;
}

MultivariateTParams complete_sampling_approx_t(int n, int k, int p, const ModelTruth& truth,
                                               const Eigen::MatrixXd& gram) {
  require(k > p - 1 && n > p, ErrorCode::DomainError, "need k > p - 1 and n > p");
  check_gram(gram, p);
  const double df = k - p + 1;
  const GramFactor f = GramFactor::from_gram(gram);
  return {df, truth.beta_0, f.inverse() * (truth.sigma2 * (n - p) / df)};
}

Eigen::MatrixXd sample_complete_sampling_rep(const ModelTruth& truth, const Eigen::MatrixXd& gram, int n, int k,
                                             int count, std::uint64_t seed) {
  const int p = static_cast<int>(gram.rows());
  require(n > p && k > p - 1, ErrorCode::DomainError, "need n > p and k > p - 1");
  check_truth(truth, p);
  require(count >= 0, ErrorCode::DomainError, "count must be >= 0");
  const Eigen::MatrixXd root_inv = symmetric_inv_sqrt(gram);
  const double sigma = std::sqrt(truth.sigma2);
  Engine engine = make_engine(seed);
  Eigen::MatrixXd out(count, p);
  Eigen::VectorXd z(p);
  for (int i = 0; i < count; ++i) {
    const double u = draw_chi2(k - p + 1, engine);
    const double v = draw_chi2(n - p, engine);
    for (int c = 0; c < p; ++c) z(c) = draw_normal(engine);
    out.row(i) = (truth.beta_0 + sigma * std::sqrt(1.0 + v / u) * (root_inv * z)).transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------
// H law

void HLawParams::validate() const {
  require(alpha > 0.0 && lambda > 0.0 && std::isfinite(alpha) && std::isfinite(lambda), ErrorCode::DomainError,
          "H-law parameters must be positive");
}

double h_law_log_pdf(double u, const HLawParams& params) {
  params.validate();
  require(!std::isnan(u), ErrorCode::NonFinite, "h_law_pdf at NaN");
  if (u <= 0.0 || std::isinf(u)) return -std::numeric_limits<double>::infinity();
  const double a = params.alpha;
  const double l = params.lambda;
  return (1.0 - (l + a)) * kLog2 - log_gamma(a) - log_gamma(l) + (0.5 * (l + a) - 1.0) * std::log(u) +
         log_bessel_k(a - l, std::sqrt(u));
}

double h_law_pdf(double u, const HLawParams& params) { return safe_exp(h_law_log_pdf(u, params)); }

double h_law_moment(double order, const HLawParams& params) {
  params.validate();
  require(order + params.alpha > 0.0 && order + params.lambda > 0.0, ErrorCode::DomainError,
          "moment order too negative");
  return std::exp(2.0 * order * kLog2 + log_gamma(order + params.alpha) + log_gamma(order + params.lambda) -
                  log_gamma(params.alpha) - log_gamma(params.lambda));
}

double sample_h_law(const HLawParams& params, Engine& engine) {
  return draw_chi2(2.0 * params.alpha, engine) * draw_chi2(2.0 * params.lambda, engine);
}

HLawParams ssr_s_h_params(int n, int k, int p) {
  require(n > p && k > p, ErrorCode::DomainError, "need n > p and k > p");
  return {0.5 * (k - p), 0.5 * (n - p)};
}

double scaled_ssr_law_pdf(double v, int n, int k, int p) { return h_law_pdf(v, ssr_s_h_params(n, k, p)); }

double ssr_s_law_pdf(double u, int n, int k, int p) {
  const HLawParams h = ssr_s_h_params(n, k, p);
  return safe_exp(std::log(static_cast<double>(k)) + h_law_log_pdf(k * u, h));
}

// ---------------------------------------------------------------------------
// Ratio laws

namespace {

double ratio_log_constant(double phi, const HLawParams& params) {
  const double a = params.alpha;
  const double l = params.lambda;
  return -l * kLog2 + log_gamma(a + phi) + log_gamma(l + phi) - log_gamma(phi) - log_gamma(a) - log_gamma(l);
}

}  // namespace

double ratio_law_log_pdf(double r, double phi, const HLawParams& params) {
  params.validate();
  require(phi > 0.0, ErrorCode::DomainError, "phi must be positive");
  require(!std::isnan(r), ErrorCode::NonFinite, "ratio_law_pdf at NaN");
  // beyond r ~ 1e307 the argument 1/(2r) underflows and the density is nil
  if (r <= 0.0 || !(0.5 / r > 0.0)) return -std::numeric_limits<double>::infinity();
  const double l = params.lambda;
  return ratio_log_constant(phi, params) - (l + 1.0) * std::log(r) +
         log_kummer_u(l + phi, l - params.alpha + 1.0, 0.5 / r);
}

double ratio_law_pdf(double r, double phi, const HLawParams& params) {
  return safe_exp(ratio_law_log_pdf(r, phi, params));
}

double ratio_law_pdf_literal(double r, double phi, const HLawParams& params) {
  params.validate();
  require(phi > 0.0, ErrorCode::DomainError, "phi must be positive");
  if (r <= 0.0 || !(0.5 / r > 0.0)) return 0.0;
  const double l = params.lambda;
  return safe_exp(ratio_log_constant(phi, params) - phi * std::log(r) +
                  log_kummer_u(l + phi, l - params.alpha + 1.0, 0.5 / r));
}

double approx_ratio_pivot_pdf(double t, int n, int k, int p) {
  require(n > p && k > p && p >= 1, ErrorCode::DomainError, "need n > p, k > p, p >= 1");
  if (t <= 0.0 || std::isinf(t)) return 0.0;
  const double c = static_cast<double>(n - p) * (k - p) / p;
  return safe_exp(ratio_law_log_pdf(t / c, 0.5 * p, ssr_s_h_params(n, k, p)) - std::log(c));
}

double approx_ratio_display_pdf_literal(double r, int n, int k, int p) {
  require(n > p && k > p && p >= 1, ErrorCode::DomainError, "need n > p, k > p, p >= 1");
  if (r <= 0.0 || !((n - p) / (2.0 * k * r) > 0.0)) return 0.0;
  const double log_c = (0.5 * p - 1.0) * std::log(static_cast<double>(n - p) / p) + log_gamma(0.5 * n) +
                       log_gamma(0.5 * k) - 0.5 * (n - p) * kLog2 - log_gamma(0.5 * p) - log_gamma(0.5 * (k - p)) -
                       log_gamma(0.5 * (n - p));
  return safe_exp(log_c - 0.5 * p * std::log(r) +
                  log_kummer_u(0.5 * n, 0.5 * (n - k + 2) + 1.0, (n - p) / (2.0 * k * r)));
}

GridDensity ratio_beta_law_pdf_mc(const std::vector<double>& r_grid, double phi, double kappa, double beta_param,
                                  const HLawParams& params, int mc_size, std::uint64_t seed) {
  params.validate();
  require(phi > 0.0 && kappa > 0.0 && beta_param > 0.0, ErrorCode::DomainError,
          "phi, kappa and beta must be positive");
  GridDensity out;
  try {
    // v = logistic(s): the integrand in s is smooth and single-peaked, and the
    // peak moves to v ~ 1/r for large r, which the adaptive windows follow.
    const double log_beta_norm = log_gamma(kappa + beta_param) - log_gamma(kappa) - log_gamma(beta_param);
    auto log_integrand = [&](double r, double s) {
      const double log_v = -std::log1p(std::exp(-s));
      const double log_1mv = -std::log1p(std::exp(s));
      return log_v + ratio_law_log_pdf(r * std::exp(log_v), phi, params) + log_beta_norm + kappa * log_v +
             beta_param * log_1mv;
    };
    QuadratureSettings settings;
    settings.rel_tol = 1e-10;
    out.values.reserve(r_grid.size());
    for (double r : r_grid) {
      if (r <= 0.0) {
        out.values.push_back(0.0);
        continue;
      }
      const QuadratureResult q = log_integrate_peaked([&](double s) { return log_integrand(r, s); }, settings);
      require(q.converged && std::isfinite(q.value), ErrorCode::ConvergenceError, "Beta-mixture quadrature failed");
      out.values.push_back(safe_exp(q.value));
    }
    out.method = "quadrature";
    return out;
  } catch (const Error&) {
    out.values.clear();
  }
  require(mc_size >= 2, ErrorCode::ConvergenceError, "quadrature failed and mc_size < 2");
  // Kernel estimate on the log scale, mapped back by the Jacobian 1/r.
  Engine engine = make_engine(seed);
  std::vector<double> logs(static_cast<std::size_t>(mc_size));
  for (auto& v : logs) {
    const double qd = draw_chi2(2.0 * phi, engine);
    const double vd = draw(BetaLaw{kappa, beta_param}, engine);
    v = std::log(qd / (vd * sample_h_law(params, engine)));
  }
  double mean = 0.0;
  for (double v : logs) mean += v;
  mean /= logs.size();
  double var = 0.0;
  for (double v : logs) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / (logs.size() - 1));
  const double h = 1.06 * sd * std::pow(static_cast<double>(logs.size()), -0.2);
  require(h > 0.0, ErrorCode::ConvergenceError, "degenerate Monte Carlo sample");
  for (double r : r_grid) {
    if (r <= 0.0) {
      out.values.push_back(0.0);
      continue;
    }
    const double lr = std::log(r);
    double acc = 0.0;
    for (double v : logs) acc += std_normal_pdf((lr - v) / h);
    out.values.push_back(acc / (logs.size() * h * r));
  }
  out.method = "monte_carlo";
  return out;
}

// ---------------------------------------------------------------------------
// Partial sketch laws

namespace {

void check_not_parallel(const Eigen::VectorXd& m, const Eigen::VectorXd& v, const std::string& what,
                        const std::string& note) {
  const double nm = m.norm();
  const double nv = v.norm();
  require(nm > 0.0, ErrorCode::DomainError, "m must be nonzero");
  if (nv == 0.0) return;
  const double cosine = std::abs(m.dot(v)) / (nm * nv);
  require(!(std::abs(1.0 - cosine) <= 1e-12), ErrorCode::AssumptionViolated,
          "m is parallel to " + what + " (|cos| within 1e-12 of 1)" + note);
}

}  // namespace

PartialSketchingRep partial_sketching_rep(const Eigen::VectorXd& m_vec, const FullFit& fullfit,
                                          const Eigen::MatrixXd& gram_inv, int k, int p) {
  require(p >= 1 && m_vec.size() == p && fullfit.beta_F.size() == p, ErrorCode::DimensionMismatch,
          "m and beta_F must have length p");
  check_gram(gram_inv, p);
  require(k > p + 1, ErrorCode::DomainError, "representation needs k > p + 1");
  check_not_parallel(m_vec, fullfit.Xty, "Xᵀy",
                     "; in that case mᵀβ_p is proportional to SSM_p and follows an inverse gamma law");
  PartialSketchingRep rep;
  rep.center = m_vec.dot(fullfit.beta_F);
  const double num = fullfit.SSM_F * m_vec.dot(gram_inv * m_vec) - rep.center * rep.center;
  require(num >= 0.0, ErrorCode::NegativeVariance,
          "SSM_F·mᵀ(XᵀX)⁻¹m − (mᵀβ_F)² is negative (" + std::to_string(num) + ")");
  rep.spread = std::sqrt(num / (k - p + 2));
  rep.k = k;
  rep.p = p;
  return rep;
}

std::vector<double> sample_partial_sketching_rep(const Eigen::VectorXd& m_vec, const FullFit& fullfit,
                                                 const Eigen::MatrixXd& gram_inv, int k, int p, int count,
                                                 std::uint64_t seed, const PartialSketchingOptions& options) {
  const PartialSketchingRep rep = partial_sketching_rep(m_vec, fullfit, gram_inv, k, p);
  require(count >= 0, ErrorCode::DomainError, "count must be >= 0");
  const double shape = k - p + 1;
  const double c = k - p - 1;
  const double t_df = options.t_df_k_minus_p_plus_1 ? k - p + 1 : k - p + 2;
  Engine engine = make_engine(seed);
  boost::random::student_t_distribution<double> tdist(t_df);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& x : out) {
    double r = 0.0;
    switch (options.r_law) {
      case PartialSketchingOptions::RLaw::ChiSquareScaled: r = draw_chi2(shape, engine) / c; break;
      case PartialSketchingOptions::RLaw::ShapeRate:
        r = boost::random::gamma_distribution<double>(shape, 1.0 / c)(engine);
        break;
      case PartialSketchingOptions::RLaw::ShapeScale:
        r = boost::random::gamma_distribution<double>(shape, c)(engine);
        break;
    }
    x = (rep.center + rep.spread * tdist(engine)) / r;
  }
  return out;
}

PartialSketchingLaw::PartialSketchingLaw(const PartialSketchingRep& rep) : rep_(rep), t_df_(rep.k - rep.p + 2) {
  require(rep.spread > 0.0, ErrorCode::DomainError, "representation spread must be positive");
  const boost::math::chi_squared_distribution<double> law(rep.k - rep.p + 1);
  quantile_nodes([&law](double u) { return boost::math::quantile(law, u); }, 64, w_nodes_, w_weights_);
}

double PartialSketchingLaw::cdf(double x) const {
  // X = (c/W)(a + sT): P(X <= x) = E_W[F_T((xW/c − a)/s)].
  const boost::math::students_t_distribution<double> t(t_df_);
  const double c = rep_.k - rep_.p - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < w_nodes_.size(); ++i)
    acc += w_weights_[i] * boost::math::cdf(t, (x * w_nodes_[i] / c - rep_.center) / rep_.spread);
  return std::clamp(acc, 0.0, 1.0);
}

double PartialSketchingLaw::pdf(double x) const {
  const boost::math::students_t_distribution<double> t(t_df_);
  const double c = rep_.k - rep_.p - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < w_nodes_.size(); ++i) {
    const double w = w_nodes_[i];
    acc += w_weights_[i] * (w / (c * rep_.spread)) * boost::math::pdf(t, (x * w / c - rep_.center) / rep_.spread);
  }
  return acc;
}

double partial_sampling_noncentrality(const Eigen::VectorXd& m_vec, const ModelTruth& truth,
                                      const Eigen::MatrixXd& gram) {
  const int p = static_cast<int>(gram.rows());
  check_truth(truth, p);
  check_gram(gram, p);
  require(m_vec.size() == p, ErrorCode::DimensionMismatch, "m must have length p");
  const GramFactor f = GramFactor::from_gram(gram);
  const double mb = m_vec.dot(truth.beta_0);
  const double delta = (f.quad(truth.beta_0) - mb * mb / f.inv_quad(m_vec)) / truth.sigma2;
  return std::max(0.0, delta);
}

std::vector<double> sample_partial_sampling_rep(const Eigen::VectorXd& m_vec, const ModelTruth& truth,
                                                const Eigen::MatrixXd& gram, int k, int p, int count,
                                                std::uint64_t seed, const PartialSamplingOptions& options) {
  require(p >= 2, ErrorCode::DomainError, "representation needs p >= 2 for the χ²_{p−1} term");
  require(static_cast<int>(gram.rows()) == p, ErrorCode::DimensionMismatch, "Gram matrix must be p×p");
  require(k > p + 1, ErrorCode::DomainError, "representation needs k > p + 1");
  check_truth(truth, p);
  check_not_parallel(m_vec, truth.beta_0, "beta_0", "");
  require(count >= 0, ErrorCode::DomainError, "count must be >= 0");
  const double delta = partial_sampling_noncentrality(m_vec, truth, gram);
  const GramFactor f = GramFactor::from_gram(gram);
  const double mb = m_vec.dot(truth.beta_0);
  const double scale = std::sqrt(truth.sigma2 * f.inv_quad(m_vec));
  const double c = options.factor_k_minus_p_plus_1 ? k - p + 1 : k - p - 1;
  Engine engine = make_engine(seed);
  const NoncentralChi2 u_law{static_cast<double>(p - 1), delta};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& x : out) {
    const double r = draw_chi2(k - p + 1, engine);
    const double v = draw_chi2(k - p + 2, engine);
    const double u = draw(u_law, engine);
    const double z = draw_normal(engine);
    x = c / r * (mb + std::sqrt(1.0 + u / v) * scale * z);
  }
  return out;
}

double partial_approx_log_pdf(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram, int k,
                              int p) {
  require(p >= 1 && k > p + 1, ErrorCode::DomainError, "need k > p + 1");
  check_truth(truth, p);
  check_gram(gram, p);
  require(b.size() == p, ErrorCode::DimensionMismatch, "point has the wrong dimension");
  const auto llt = chol(gram, "XᵀX");
  const double s2 = truth.sigma2;
  const double gamma = static_cast<double>(k - p - 1) / k;
  const double eta = gamma * s2;
  const Eigen::VectorXd gb0 = gram * truth.beta_0;
  const double t = b.dot(gb0);
  const double bgb = (llt.matrixU() * b).squaredNorm();
  const double b0gb0 = truth.beta_0.dot(gb0);
  const double s = t * t / (s2 * s2) + k * gamma * b0gb0 / s2;
  const double mu = 0.5 * (k + 2 - p);
  const double log_const = 0.5 * (p - k) * kLog2 + log_multigamma(p, 0.5 * (k + 1)) - 0.5 * p * std::log(k) +
                           0.5 * llt_log_det(llt) - 0.5 * p * (kLogPi + std::log(eta)) -
                           log_multigamma(p, 0.5 * k) - log_gamma(0.5 * (k - p) + 1.0);
  return log_const + t / s2 - 0.5 * (k + 1) * std::log1p(bgb / (k * eta)) + log_wpow_bessel_k(mu, std::sqrt(s));
}

double partial_approx_pdf(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram, int k,
                          int p) {
  return safe_exp(partial_approx_log_pdf(b, truth, gram, k, p));
}

double partial_approx_pdf_literal(const Eigen::VectorXd& b, const ModelTruth& truth, const Eigen::MatrixXd& gram,
                                  int k, int p) {
  require(p >= 1 && k > p + 1, ErrorCode::DomainError, "need k > p + 1");
  check_truth(truth, p);
  check_gram(gram, p);
  const double s2 = truth.sigma2;
  const double gamma = static_cast<double>(k - p - 1) / k;
  const Eigen::VectorXd gb0 = gram * truth.beta_0;
  const double t = b.dot(gb0);
  const double bgb = b.dot(gram * b);
  const double s = t * t / (gamma * s2 * s2) + k * truth.beta_0.dot(gb0) / s2;
  const double mu = 0.5 * (k + 2 - p);
  const double log_const = 0.5 * (p - k) * kLog2 + log_multigamma(p, 0.5 * (k + 1)) -
                           0.5 * p * (k + 1) * std::log(k) - 0.5 * p * (kLogPi + std::log(gamma * s2)) -
                           log_multigamma(p, 0.5 * k) - log_gamma(0.5 * (k - p) + 1.0);
  return safe_exp(log_const + t / s2 - 0.5 * (k + 1) * std::log1p(bgb / (k * gamma * s2)) +
                  log_wpow_bessel_k(mu, std::sqrt(s)));
}

Eigen::MatrixXd sample_partial_approx_model(const ModelTruth& truth, const Eigen::MatrixXd& gram, int k, int count,
                                            std::uint64_t seed) {
  const int p = static_cast<int>(gram.rows());
  require(k > p + 1, ErrorCode::DomainError, "need k > p + 1");
  check_truth(truth, p);
  const double gamma = static_cast<double>(k - p - 1) / k;
  const double eta = gamma * truth.sigma2;
  const Eigen::MatrixXd root = symmetric_sqrt(gram);
  const Eigen::MatrixXd root_inv = symmetric_inv_sqrt(gram);
  const Eigen::VectorXd lam = gamma * (root * truth.beta_0);
  Engine engine = make_engine(seed);
  Eigen::MatrixXd out(count, p);
  Eigen::MatrixXd g(p, k);
  Eigen::VectorXd e(p);
  for (int i = 0; i < count; ++i) {
    for (int c = 0; c < k; ++c)
      for (int r = 0; r < p; ++r) g(r, c) = draw_normal(engine);
    const Eigen::MatrixXd bmat = g * g.transpose() / static_cast<double>(k);
    const Eigen::LLT<Eigen::MatrixXd> llt(bmat);
    for (int r = 0; r < p; ++r) e(r) = draw_normal(engine);
    const Eigen::VectorXd mean = llt.solve(lam);
    const Eigen::VectorXd noise = llt.matrixU().solve(e) * std::sqrt(eta);
    out.row(i) = (root_inv * (mean + noise)).transpose();
  }
  return out;
}

}  // namespace sketch_infer
