#pragma once

namespace sketch_infer {

/// log Γ(x) for x > 0.
double log_gamma(double x);

/// log of the multivariate gamma Γ_p(a) = π^{p(p-1)/4} Π_{j=1}^{p} Γ(a + (1-j)/2).
double log_multigamma(int p, double a);

/// Confluent hypergeometric function of the first kind, M(a, b, z) = 1F1(a; b; z).
/// Positive-term power series with compensated summation; for z < 0 Kummer's
/// transformation e^z M(b-a, b, -z) is applied whenever it yields positive terms.
double kummer_m(double a, double b, double z);

/// log M(a, b, z) for a > 0, b > 0 (where M > 0). Safe for very large |z|.
double log_kummer_m(double a, double b, double z);

/// Confluent hypergeometric function of the second kind for a > 0, z > 0, from
/// U(a,b,z) = Γ(a)^{-1} ∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.
double kummer_u(double a, double b, double z);
double log_kummer_u(double a, double b, double z);

/// Modified Bessel function of the second kind K_ν(x), x > 0.
double bessel_k(double nu, double x);
/// e^x K_ν(x).
double bessel_k_scaled(double nu, double x);
/// log K_ν(x); finite wherever K_ν(x) is representable in log space.
double log_bessel_k(double nu, double x);
/// log(w^μ K_μ(w)) for μ > 0, w >= 0, with the limit Γ(μ) 2^{μ-1} at w = 0.
double log_wpow_bessel_k(double mu, double w);

}  // namespace sketch_infer
