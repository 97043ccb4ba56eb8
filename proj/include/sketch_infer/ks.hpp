#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace sketch_infer {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov limiting survival function Q(λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2j²λ²}.
double kolmogorov_sf(double lambda);

/// One-sample Kolmogorov–Smirnov distance against a continuous CDF, with the
/// asymptotic p-value Q((√m + 0.12 + 0.11/√m) D). Throws EmptyInput.
KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Right-continuous empirical CDF of a reference sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> draws);
  double operator()(double x) const;
  double quantile(double u) const;
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

/// CDF of a density tabulated on [lo, hi]: Gauss–Legendre panel integrals,
/// cumulative sums, linear interpolation between knots, renormalized to 1.
class TabulatedCdf {
 public:
  TabulatedCdf(const std::function<double(double)>& pdf, double lo, double hi, int knots = 2048);
  double operator()(double x) const;
  double mass() const { return mass_; }  // integral before renormalization

 private:
  std::vector<double> x_, c_;
  double mass_ = 0.0;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<long> counts;
};

/// Freedman–Diaconis bin width 2·IQR·m^{−1/3}, bins capped at max_bins; a fixed
/// bin count overrides the rule.
Histogram make_histogram(const std::vector<double>& values, int max_bins = 200,
                         std::optional<int> fixed_bins = std::nullopt);

/// Inverse of a continuous increasing CDF by bracketing and bisection.
double invert_cdf(const std::function<double(double)>& cdf, double u, double guess, double step);

}  // namespace sketch_infer
