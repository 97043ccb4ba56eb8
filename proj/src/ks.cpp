#include "sketch_infer/ks.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>

#include "sketch_infer/error.hpp"

namespace sketch_infer {

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series alternates badly here and Q is 1 to double precision
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), ErrorCode::EmptyInput, "KS statistic of an empty sample");
  for (double v : samples) require(!std::isnan(v), ErrorCode::NonFinite, "KS sample contains NaN");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / m - f, f - i / m});
  }
  const double sm = std::sqrt(m);
  return {d, kolmogorov_sf((sm + 0.12 + 0.11 / sm) * d)};
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> draws) : sorted_(std::move(draws)) {
  require(!sorted_.empty(), ErrorCode::EmptyInput, "empirical CDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / sorted_.size();
}

double EmpiricalCdf::quantile(double u) const {
  const double pos = std::clamp(u, 0.0, 1.0) * (sorted_.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= sorted_.size()) return sorted_.back();
  return sorted_[i] + (pos - i) * (sorted_[i + 1] - sorted_[i]);
}

TabulatedCdf::TabulatedCdf(const std::function<double(double)>& pdf, double lo, double hi, int knots) {
  require(hi > lo && knots >= 2, ErrorCode::DomainError, "tabulated CDF needs lo < hi and >= 2 knots");
  using Rule = boost::math::quadrature::gauss<double, 10>;
  x_.resize(knots);
  c_.assign(knots, 0.0);
  const double h = (hi - lo) / (knots - 1);
  for (int i = 0; i < knots; ++i) x_[i] = lo + i * h;
  for (int i = 1; i < knots; ++i) c_[i] = c_[i - 1] + Rule::integrate(pdf, x_[i - 1], x_[i]);
  mass_ = c_.back();
  require(mass_ > 0.0 && std::isfinite(mass_), ErrorCode::ConvergenceError, "tabulated density has no mass");
  for (double& v : c_) v /= mass_;
}

double TabulatedCdf::operator()(double x) const {
  if (x <= x_.front()) return 0.0;
  if (x >= x_.back()) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return c_[i] + t * (c_[i + 1] - c_[i]);
}

Histogram make_histogram(const std::vector<double>& values, int max_bins, std::optional<int> fixed_bins) {
  require(!values.empty(), ErrorCode::EmptyInput, "histogram of an empty sample");
  require(max_bins >= 1, ErrorCode::DomainError, "max_bins must be >= 1");
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  const double lo = v.front();
  double hi = v.back();
  int bins = 1;
  if (fixed_bins) {
    require(*fixed_bins >= 1, ErrorCode::DomainError, "bin count must be >= 1");
    bins = *fixed_bins;
  } else if (hi > lo) {
    auto q = [&v](double u) {
      const double pos = u * (v.size() - 1);
      const std::size_t i = static_cast<std::size_t>(pos);
      return i + 1 < v.size() ? v[i] + (pos - i) * (v[i + 1] - v[i]) : v.back();
    };
    const double iqr = q(0.75) - q(0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
    bins = width > 0.0 ? static_cast<int>(std::ceil((hi - lo) / width)) : 1;
    bins = std::clamp(bins, 1, max_bins);
  }
  if (hi == lo) hi = lo + 1.0;
  Histogram out;
  out.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) out.edges[i] = lo + (hi - lo) * i / bins;
  out.counts.assign(bins, 0);
  for (double x : v) {
    int b = static_cast<int>((x - lo) / (hi - lo) * bins);
    out.counts[std::clamp(b, 0, bins - 1)]++;
  }
  return out;
}

double invert_cdf(const std::function<double(double)>& cdf, double u, double guess, double step) {
  require(u > 0.0 && u < 1.0, ErrorCode::DomainError, "quantile level must lie in (0, 1)");
  require(step > 0.0, ErrorCode::DomainError, "bracket step must be positive");
  double lo = guess - step;
  double hi = guess + step;
  for (int i = 0; cdf(lo) > u; ++i) {
    require(i < 200, ErrorCode::ConvergenceError, "could not bracket quantile");
    lo -= step * std::ldexp(1.0, i);
  }
  for (int i = 0; cdf(hi) < u; ++i) {
    require(i < 200, ErrorCode::ConvergenceError, "could not bracket quantile");
    hi += step * std::ldexp(1.0, i);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sketch_infer
