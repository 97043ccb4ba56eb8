#pragma once

#include <functional>

namespace sketch_infer {

struct QuadratureSettings {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 200;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) on a finite interval. The interval with the
/// largest error estimate is bisected until the total estimate meets
/// max(abs_tol, rel_tol * |value|) or max_subdivisions is exhausted.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureSettings& settings = {});

/// Integral over [a, +inf) via t = a + x / (1 - x).
QuadratureResult integrate_upper(const Integrand& f, double a,
                                 const QuadratureSettings& settings = {});

/// Integral over (-inf, +inf) via x = t / (1 - t^2).
QuadratureResult integrate_real_line(const Integrand& f,
                                     const QuadratureSettings& settings = {});

/// Integral of a positive, unimodal log-integrand exp(log_f(s)) over the real
/// line. Returns log of the integral. The mode is located first and the
/// integral is accumulated outward in windows scaled by the local curvature,
/// so sharply peaked integrands with huge dynamic range stay accurate.
QuadratureResult log_integrate_peaked(const std::function<double(double)>& log_f,
                                      const QuadratureSettings& settings = {});

}  // namespace sketch_infer
