#include "sketch_infer/special_fn.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "sketch_infer/error.hpp"
#include "sketch_infer/quadrature.hpp"

namespace sketch_infer {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kRescale = 1e280;
const double kLogRescale = std::log(kRescale);

bool is_nonpositive_integer(double b) { return b <= 0.0 && std::floor(b) == b; }

/// Signed series value mantissa * exp(log_scale).
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;
};

// Σ_n (a)_n / (b)_n z^n / n! with Kahan summation and overflow rescaling.
ScaledValue kummer_series(double a, double b, double z) {
  double sum = 1.0;
  double comp = 0.0;
  double term = 1.0;
  double log_scale = 0.0;
  const long max_terms = 200000 + static_cast<long>(4.0 * std::abs(z));
  for (long n = 0; n < max_terms; ++n) {
    const double dn = static_cast<double>(n);
    const double ratio = (a + dn) * z / ((b + dn) * (dn + 1.0));
    term *= ratio;
    if (term == 0.0) return {sum, log_scale};
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (std::abs(sum) > kRescale) {
      sum /= kRescale;
      term /= kRescale;
      comp /= kRescale;
      log_scale += kLogRescale;
    }
    if (std::abs(ratio) < 1.0 && std::abs(term) <= 0.25 * kEps * std::abs(sum)) return {sum, log_scale};
  }
  fail(ErrorCode::ConvergenceError, "Kummer M series did not converge for a=" + std::to_string(a) +
                                        " b=" + std::to_string(b) + " z=" + std::to_string(z));
}

ScaledValue kummer_m_scaled(double a, double b, double z) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(z), ErrorCode::NonFinite,
          "kummer_m arguments must be finite");
  require(!is_nonpositive_integer(b), ErrorCode::DomainError, "kummer_m: b is a nonpositive integer");
  if (z == 0.0 || a == 0.0) return {1.0, 0.0};
  if (z > 0.0) return kummer_series(a, b, z);
  // Kummer's transformation turns the alternating series into one of fixed sign.
  ScaledValue s = kummer_series(b - a, b, -z);
  s.log_scale += z;
  return s;
}

// Temme's series for K_μ(x), K_{μ+1}(x), |μ| <= 1/2, x <= 2.
void temme_k(double mu, double x, double& k_mu, double& k_mu1) {
  using boost::math::tgamma1pm1;
  const double half_x = 0.5 * x;
  const double pimu = boost::math::constants::pi<double>() * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(half_x);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  // 1/Γ(1+μ), 1/Γ(1-μ) and the smooth combinations gam1, gam2.
  const double gp = tgamma1pm1(mu);
  const double gm = tgamma1pm1(-mu);
  const double gampl = 1.0 / (1.0 + gp);
  const double gammi = 1.0 / (1.0 + gm);
  double gam1;
  if (std::abs(mu) < 1e-300) {
    gam1 = -boost::math::constants::euler<double>();
  } else {
    gam1 = (gp - gm) / ((1.0 + gp) * (1.0 + gm) * 2.0 * mu);
  }
  const double gam2 = 0.5 * (gammi + gampl);
  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  d = half_x * half_x;
  double sum1 = p;
  const double mu2 = mu * mu;
  int i = 1;
  for (; i < 10000; ++i) {
    ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
    c *= d / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - i * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  require(i < 10000, ErrorCode::ConvergenceError, "bessel_k small-argument series failed");
  k_mu = sum;
  k_mu1 = sum1 * 2.0 / x;
}

// Steed's continued fraction for e^x K_μ(x), e^x K_{μ+1}(x), |μ| <= 1/2, x > 2.
void steed_k_scaled(double mu, double x, double& k_mu, double& k_mu1) {
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  require(i < 100000, ErrorCode::ConvergenceError, "bessel_k continued fraction failed");
  h *= a1;
  k_mu = std::sqrt(boost::math::constants::pi<double>() / (2.0 * x)) / s;
  k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
}

// Forward recurrence K_{μ+1} = (2μ/x) K_μ + K_{μ-1}, stable for K; tracked with a log scale.
double log_bessel_k_impl(double nu, double x) {
  nu = std::abs(nu);
  const double nl = std::floor(nu + 0.5);
  const double mu = nu - nl;
  double k0, k1, log_scale;
  if (x <= 2.0) {
    temme_k(mu, x, k0, k1);
    log_scale = 0.0;
  } else {
    steed_k_scaled(mu, x, k0, k1);
    log_scale = -x;
  }
  const long steps = static_cast<long>(nl);
  for (long i = 1; i <= steps; ++i) {
    const double next = (mu + i) * (2.0 / x) * k1 + k0;
    k0 = k1;
    k1 = next;
    if (k1 > kRescale) {
      k0 /= kRescale;
      k1 /= kRescale;
      log_scale += kLogRescale;
    }
  }
  return std::log(k0) + log_scale;
}

}  // namespace

double log_gamma(double x) {
  require(x > 0.0 && std::isfinite(x), ErrorCode::DomainError, "log_gamma requires finite x > 0");
  return boost::math::lgamma(x);
}

double log_multigamma(int p, double a) {
  require(p >= 1, ErrorCode::DomainError, "log_multigamma requires p >= 1");
  require(a > 0.5 * (p - 1), ErrorCode::DomainError, "log_multigamma requires a > (p-1)/2");
  double out = 0.25 * p * (p - 1) * std::log(boost::math::constants::pi<double>());
  for (int j = 1; j <= p; ++j) out += log_gamma(a + 0.5 * (1 - j));
  return out;
}

double kummer_m(double a, double b, double z) {
  const ScaledValue s = kummer_m_scaled(a, b, z);
  if (s.log_scale == 0.0) return s.mantissa;
  if (s.mantissa == 0.0) return 0.0;
  const double log_abs = std::log(std::abs(s.mantissa)) + s.log_scale;
  require(log_abs < 709.0, ErrorCode::Overflow, "kummer_m overflows double; use log_kummer_m");
  return std::copysign(std::exp(log_abs), s.mantissa);
}

double log_kummer_m(double a, double b, double z) {
  require(a > 0.0 && b > 0.0, ErrorCode::DomainError, "log_kummer_m requires a > 0 and b > 0");
  const ScaledValue s = kummer_m_scaled(a, b, z);
  require(s.mantissa > 0.0, ErrorCode::DomainError, "log_kummer_m: M(a,b,z) is not positive");
  return std::log(s.mantissa) + s.log_scale;
}

double log_kummer_u(double a, double b, double z) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(z), ErrorCode::NonFinite,
          "kummer_u arguments must be finite");
  require(a > 0.0, ErrorCode::DomainError, "kummer_u requires a > 0");
  require(z > 0.0, ErrorCode::DomainError, "kummer_u requires z > 0");
  const double c = b - a - 1.0;
  // Substituting t = e^s makes the integrand log-concave-ish and unbounded support easy.
  auto log_integrand = [a, c, z](double s) {
    const double log1p_t = s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
    return -z * std::exp(s) + a * s + c * log1p_t;
  };
  QuadratureSettings settings;
  settings.rel_tol = 1e-12;
  settings.abs_tol = 1e-15;
  settings.max_subdivisions = 400;
  const QuadratureResult r = log_integrate_peaked(log_integrand, settings);
  require(std::isfinite(r.value), ErrorCode::ConvergenceError, "kummer_u quadrature failed");
  return r.value - log_gamma(a);
}

double kummer_u(double a, double b, double z) {
  const double l = log_kummer_u(a, b, z);
  require(l < 709.0, ErrorCode::Overflow, "kummer_u overflows double; use log_kummer_u");
  return std::exp(l);
}

double log_bessel_k(double nu, double x) {
  require(std::isfinite(nu) && std::isfinite(x), ErrorCode::NonFinite, "bessel_k arguments must be finite");
  require(x > 0.0, ErrorCode::DomainError, "bessel_k requires x > 0");
  return log_bessel_k_impl(nu, x);
}

double bessel_k(double nu, double x) {
  const double l = log_bessel_k(nu, x);
  require(l < 709.0, ErrorCode::Overflow, "bessel_k overflows double; use log_bessel_k");
  return std::exp(l);
}

double bessel_k_scaled(double nu, double x) {
  const double l = log_bessel_k(nu, x) + x;
  require(l < 709.0, ErrorCode::Overflow, "bessel_k_scaled overflows double");
  return std::exp(l);
}

double log_wpow_bessel_k(double mu, double w) {
  require(mu > 0.0, ErrorCode::DomainError, "log_wpow_bessel_k requires mu > 0");
  require(w >= 0.0, ErrorCode::DomainError, "log_wpow_bessel_k requires w >= 0");
  if (w == 0.0) return log_gamma(mu) + (mu - 1.0) * std::log(2.0);
  return mu * std::log(w) + log_bessel_k(mu, w);
}

}  // namespace sketch_infer
