#include "sketch_infer/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "sketch_infer/error.hpp"

namespace sketch_infer {

namespace {

// Kronrod 15-point abscissae / weights and the embedded Gauss 7-point weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(centre - dx) + f(centre + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  double err = std::abs(kronrod - gauss);
  // Standard QUADPACK sharpening of the raw difference.
  if (err > 0.0) err = std::max(err * std::min(1.0, std::pow(200.0 * err / (std::abs(kronrod) + 1e-300), 1.5)), err * 1e-3);
  if (!std::isfinite(kronrod)) err = std::numeric_limits<double>::infinity();
  return {a, b, kronrod, err};
}

}  // namespace

void QuadratureSettings::validate() const {
  require(abs_tol > 0.0 && abs_tol < 1.0, ErrorCode::DomainError, "abs_tol must lie in (0, 1)");
  require(rel_tol > 0.0 && rel_tol < 1.0, ErrorCode::DomainError, "rel_tol must lie in (0, 1)");
  require(max_subdivisions > 0, ErrorCode::DomainError, "max_subdivisions must be positive");
}

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSettings& settings) {
  settings.validate();
  if (a == b) return {0.0, 0.0, 0, true};
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double total_err = first.error;
  int subdivisions = 1;
  while (total_err > std::max(settings.abs_tol, settings.rel_tol * std::abs(total)) &&
         subdivisions < settings.max_subdivisions) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted at double precision
      heap.push(worst);
      break;
    }
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the drift of incremental updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  const bool ok = std::isfinite(total) &&
                  total_err <= std::max(settings.abs_tol, settings.rel_tol * std::abs(total));
  return {sign * total, total_err, subdivisions, ok};
}

QuadratureResult integrate_upper(const Integrand& f, double a, const QuadratureSettings& settings) {
  auto g = [&](double x) {
    if (x >= 1.0) return 0.0;
    const double one_minus = 1.0 - x;
    const double v = f(a + x / one_minus);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, settings);
}

QuadratureResult integrate_real_line(const Integrand& f, const QuadratureSettings& settings) {
  auto g = [&](double t) {
    const double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    const double v = f(t / d);
    return v == 0.0 ? 0.0 : v * (1.0 + t * t) / (d * d);
  };
  return integrate(g, -1.0, 1.0, settings);
}

QuadratureResult log_integrate_peaked(const std::function<double(double)>& log_f,
                                      const QuadratureSettings& settings) {
  auto safe = [&](double s) {
    const double v = log_f(s);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };

  // Bracket the mode by walking uphill with doubling steps.
  double x0 = 0.0;
  double f0 = safe(x0);
  double step = 1.0;
  double dir = (safe(x0 + 1e-3) >= f0) ? 1.0 : -1.0;
  double lo = x0, hi = x0;
  for (int it = 0; it < 200; ++it) {
    const double x1 = x0 + dir * step;
    const double f1 = safe(x1);
    if (f1 < f0) {
      lo = std::min(x0 - dir * step * 0.5, x1);
      hi = std::max(x0 - dir * step * 0.5, x1);
      break;
    }
    x0 = x1;
    f0 = f1;
    step *= 2.0;
    lo = hi = x0;
  }
  if (lo == hi) {
    lo = x0 - 1.0;
    hi = x0 + 1.0;
  }
  // Golden-section refinement.
  constexpr double kGolden = 0.618033988749894848;
  double c = hi - kGolden * (hi - lo);
  double d = lo + kGolden * (hi - lo);
  double fc = safe(c), fd = safe(d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-10 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kGolden * (hi - lo);
      fc = safe(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kGolden * (hi - lo);
      fd = safe(d);
    }
  }
  const double mode = 0.5 * (lo + hi);
  const double peak = safe(mode);
  require(std::isfinite(peak), ErrorCode::ConvergenceError, "log-integrand not finite at its mode");

  // Local width from the curvature at the mode.
  const double h = 1e-4 * (1.0 + std::abs(mode));
  const double curv = -(safe(mode + h) - 2.0 * peak + safe(mode - h)) / (h * h);
  double width = (std::isfinite(curv) && curv > 1e-12) ? 1.0 / std::sqrt(curv) : 1.0;
  width = std::clamp(width, 1e-12, 1e6);

  auto g = [&](double s) {
    const double v = safe(s) - peak;
    return v < -745.0 ? 0.0 : std::exp(v);
  };
  QuadratureSettings inner = settings;
  inner.abs_tol = std::min(settings.abs_tol, 1e-14);

  double total = 0.0;
  double total_err = 0.0;
  int subdivisions = 0;
  bool converged = true;
  for (double direction : {1.0, -1.0}) {
    double start = mode;
    double w = 2.0 * width;
    for (int window = 0; window < 400; ++window) {
      const double end = start + direction * w;
      QuadratureResult r = integrate(g, std::min(start, end), std::max(start, end), inner);
      total += r.value;
      total_err += r.error;
      subdivisions += r.subdivisions;
      converged = converged && r.converged;
      if (r.value <= 1e-17 * total && g(end) <= 1e-17) break;
      start = end;
      w *= 1.5;
    }
  }
  QuadratureResult out;
  out.value = peak + std::log(total);
  out.error = total > 0.0 ? total_err / total : std::numeric_limits<double>::infinity();
  out.subdivisions = subdivisions;
  out.converged = converged && out.error <= std::max(settings.rel_tol, 1e-14) * 10.0;
  return out;
}

}  // namespace sketch_infer
