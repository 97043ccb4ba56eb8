#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sketch_infer/rng.hpp"

namespace sketch_infer {

struct Chi2 {
  double df;
};
struct StudentT {
  double df;
};
struct FisherF {
  double d1, d2;
};
struct BetaLaw {
  double a, b;
};
struct GammaLaw {
  double shape, scale;
};
struct InvGammaLaw {
  double shape, scale;
};

/// Laws with closed-form CDF and quantile.
using Law = std::variant<Chi2, StudentT, FisherF, BetaLaw, GammaLaw, InvGammaLaw>;

/// Non-central chi-square, df >= 0, non-centrality lambda >= 0 (mean df + lambda).
struct NoncentralChi2 {
  double df, lambda;
};
/// X / (X + Y) with X ~ NoncentralChi2(2a, lambda), Y ~ Chi2(2b).
struct NoncentralBeta {
  double a, b, lambda;
};
struct NormalLaw {
  double mu, sigma2;
};

using SamplingLaw = std::variant<Chi2, StudentT, FisherF, BetaLaw, GammaLaw, InvGammaLaw,
                                 NoncentralChi2, NoncentralBeta, NormalLaw>;

void validate(const Law& law);
void validate(const SamplingLaw& law);

double dist_pdf(const Law& law, double x);
double dist_cdf(const Law& law, double x);
/// Upper tail 1 - F(x), accurate in the far tail.
double dist_sf(const Law& law, double x);
double dist_quantile(const Law& law, double q);

/// Short name such as "t(10)" or "F(3,497)".
std::string describe(const Law& law);

/// One draw from the engine.
double draw(const SamplingLaw& law, Engine& engine);
/// count i.i.d. draws, reproducible from seed.
std::vector<double> dist_sample(const SamplingLaw& law, std::uint64_t seed, std::size_t count);

/// Convenience draws shared by the samplers.
double draw_normal(Engine& engine);
double draw_chi2(double df, Engine& engine);

}  // namespace sketch_infer
