#include "sketch_infer/distributions.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/fisher_f_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <cmath>
#include <exception>
#include <sstream>

#include "sketch_infer/error.hpp"

namespace sketch_infer {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool pos(double v) { return v > 0.0 && std::isfinite(v); }

// Boost distribution object for each closed-form law.
template <class F>
auto with_boost(const Law& law, F&& f) {
  validate(law);
  namespace bm = boost::math;
  return std::visit(Overloaded{
                        [&](const Chi2& d) { return f(bm::chi_squared_distribution<double>(d.df)); },
                        [&](const StudentT& d) { return f(bm::students_t_distribution<double>(d.df)); },
                        [&](const FisherF& d) { return f(bm::fisher_f_distribution<double>(d.d1, d.d2)); },
                        [&](const BetaLaw& d) { return f(bm::beta_distribution<double>(d.a, d.b)); },
                        [&](const GammaLaw& d) { return f(bm::gamma_distribution<double>(d.shape, d.scale)); },
                        [&](const InvGammaLaw& d) {
                          return f(bm::inverse_gamma_distribution<double>(d.shape, d.scale));
                        },
                    },
                    law);
}

// Support of each law; values outside are mapped to the boundary behaviour.
bool below_support(const Law& law, double x) {
  return !std::holds_alternative<StudentT>(law) && x <= 0.0;
}
bool above_support(const Law& law, double x) { return std::holds_alternative<BetaLaw>(law) && x >= 1.0; }

template <class F>
double guarded(F&& f, const char* what) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::DomainError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

void validate(const Law& law) {
  const bool ok = std::visit(Overloaded{
                                 [](const Chi2& d) { return pos(d.df); },
                                 [](const StudentT& d) { return pos(d.df); },
                                 [](const FisherF& d) { return pos(d.d1) && pos(d.d2); },
                                 [](const BetaLaw& d) { return pos(d.a) && pos(d.b); },
                                 [](const GammaLaw& d) { return pos(d.shape) && pos(d.scale); },
                                 [](const InvGammaLaw& d) { return pos(d.shape) && pos(d.scale); },
                             },
                             law);
  require(ok, ErrorCode::DomainError, "invalid parameters for " + describe(law));
}

void validate(const SamplingLaw& law) {
  std::visit(Overloaded{
                 [](const NoncentralChi2& d) {
                   require(d.df >= 0.0 && d.lambda >= 0.0 && std::isfinite(d.df + d.lambda) &&
                               d.df + d.lambda > 0.0,
                           ErrorCode::DomainError, "noncentral chi2 needs df >= 0, lambda >= 0, not both 0");
                 },
                 [](const NoncentralBeta& d) {
                   require(pos(d.a) && pos(d.b) && d.lambda >= 0.0 && std::isfinite(d.lambda),
                           ErrorCode::DomainError, "noncentral beta needs a, b > 0 and lambda >= 0");
                 },
                 [](const NormalLaw& d) {
                   require(std::isfinite(d.mu) && d.sigma2 >= 0.0 && std::isfinite(d.sigma2),
                           ErrorCode::DomainError, "normal needs finite mu and sigma2 >= 0");
                 },
                 [](const auto& d) { validate(Law{d}); },
             },
             law);
}

double dist_pdf(const Law& law, double x) {
  require(!std::isnan(x), ErrorCode::NonFinite, "dist_pdf at NaN");
  if (below_support(law, x) || above_support(law, x) || std::isinf(x)) {
    validate(law);
    return 0.0;
  }
  return guarded([&] { return with_boost(law, [x](const auto& d) { return boost::math::pdf(d, x); }); },
                 "dist_pdf");
}

double dist_cdf(const Law& law, double x) {
  require(!std::isnan(x), ErrorCode::NonFinite, "dist_cdf at NaN");
  validate(law);
  if (below_support(law, x) || x == -INFINITY) return 0.0;
  if (above_support(law, x) || x == INFINITY) return 1.0;
  return guarded([&] { return with_boost(law, [x](const auto& d) { return boost::math::cdf(d, x); }); },
                 "dist_cdf");
}

double dist_sf(const Law& law, double x) {
  require(!std::isnan(x), ErrorCode::NonFinite, "dist_sf at NaN");
  validate(law);
  if (below_support(law, x) || x == -INFINITY) return 1.0;
  if (above_support(law, x) || x == INFINITY) return 0.0;
  return guarded(
      [&] { return with_boost(law, [x](const auto& d) { return boost::math::cdf(boost::math::complement(d, x)); }); },
      "dist_sf");
}

double dist_quantile(const Law& law, double q) {
  require(q > 0.0 && q < 1.0, ErrorCode::DomainError, "dist_quantile requires q in (0,1)");
  return guarded(
      [&] { return with_boost(law, [q](const auto& d) { return boost::math::quantile(d, q); }); },
      "dist_quantile");
}

std::string describe(const Law& law) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Chi2& d) { os << "chi2(" << d.df << ")"; },
                 [&](const StudentT& d) { os << "t(" << d.df << ")"; },
                 [&](const FisherF& d) { os << "F(" << d.d1 << "," << d.d2 << ")"; },
                 [&](const BetaLaw& d) { os << "beta(" << d.a << "," << d.b << ")"; },
                 [&](const GammaLaw& d) { os << "gamma(" << d.shape << "," << d.scale << ")"; },
                 [&](const InvGammaLaw& d) { os << "inv_gamma(" << d.shape << "," << d.scale << ")"; },
             },
             law);
  return os.str();
}

double draw_normal(Engine& engine) { return boost::random::normal_distribution<double>(0.0, 1.0)(engine); }

double draw_chi2(double df, Engine& engine) {
  return boost::random::chi_squared_distribution<double>(df)(engine);
}

double draw(const SamplingLaw& law, Engine& engine) {
  namespace br = boost::random;
  return std::visit(
      Overloaded{
          [&](const Chi2& d) { return draw_chi2(d.df, engine); },
          [&](const StudentT& d) { return br::student_t_distribution<double>(d.df)(engine); },
          [&](const FisherF& d) { return br::fisher_f_distribution<double>(d.d1, d.d2)(engine); },
          [&](const BetaLaw& d) { return br::beta_distribution<double>(d.a, d.b)(engine); },
          [&](const GammaLaw& d) { return br::gamma_distribution<double>(d.shape, d.scale)(engine); },
          [&](const InvGammaLaw& d) { return d.scale / br::gamma_distribution<double>(d.shape, 1.0)(engine); },
          [&](const NoncentralChi2& d) {
            // Poisson mixture of central chi-squares.
            int extra = 0;
            if (d.lambda > 0.0) extra = br::poisson_distribution<int, double>(0.5 * d.lambda)(engine);
            const double df = d.df + 2.0 * extra;
            return df > 0.0 ? draw_chi2(df, engine) : 0.0;
          },
          [&](const NoncentralBeta& d) {
            const double x = draw(NoncentralChi2{2.0 * d.a, d.lambda}, engine);
            const double y = draw_chi2(2.0 * d.b, engine);
            return x / (x + y);
          },
          [&](const NormalLaw& d) { return d.mu + std::sqrt(d.sigma2) * draw_normal(engine); },
      },
      law);
}

std::vector<double> dist_sample(const SamplingLaw& law, std::uint64_t seed, std::size_t count) {
  validate(law);
  Engine engine = make_engine(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = draw(law, engine);
  return out;
}

}  // namespace sketch_infer
