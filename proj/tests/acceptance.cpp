// Acceptance run: one PASS/FAIL line per criterion, details indented below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sketch_infer/core_model.hpp"
#include "sketch_infer/densities.hpp"
#include "sketch_infer/distributions.hpp"
#include "sketch_infer/error.hpp"
#include "sketch_infer/estimators.hpp"
#include "sketch_infer/inference.hpp"
#include "sketch_infer/ks.hpp"
#include "sketch_infer/quadrature.hpp"
#include "sketch_infer/rng.hpp"
#include "sketch_infer/sim_study.hpp"
#include "sketch_infer/sketch_ops.hpp"
#include "sketch_infer/special_fn.hpp"

using namespace sketch_infer;

namespace {

// tolerances
constexpr double kKsExact = 0.02;
constexpr double kKsApprox = 0.03;
constexpr double kCoverageLo = 0.943, kCoverageHi = 0.957;
constexpr double kMomentSe = 3.0;
constexpr double kMass = 1e-5, kMassApproxPartial = 1e-4;
constexpr double kHMoment = 1e-8;
constexpr double kRoundTrip = 1e-8;
constexpr double kKummerM = 1e-10, kKummerU = 1e-9, kBessel = 1e-10, kRecurrence = 1e-10;

const QuadratureSettings kTight{1e-13, 1e-11, 400};
constexpr std::uint64_t kSeed = 20240611;

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
  std::printf("CRITERION %2d %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

__attribute__((format(printf, 1, 2))) void info(const char* fmt, ...) {
  std::va_list args;
  va_start(args, fmt);
  std::printf("    ");
  std::vprintf(fmt, args);
  std::printf("\n");
  va_end(args);
}

double ks_law(const std::vector<double>& v, const Law& law) {
  return ks_statistic(v, [&](double x) { return dist_cdf(law, x); }).statistic;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double se_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double ss = 0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / (v.size() - 1) / v.size());
}

double positive_mass(const std::function<double(double)>& log_f) {
  const auto q = log_integrate_peaked([&](double s) { return log_f(std::exp(s)) + s; }, kTight);
  return q.converged ? std::exp(q.value) : std::nan("");
}

double real_mass(const std::function<double(double)>& f, double center, double scale) {
  return integrate_real_line([&](double t) { return scale * f(center + scale * t); }, kTight).value;
}

bool rel_close(double x, double ref, double tol) { return std::abs(x - ref) <= tol * std::abs(ref); }

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Realized dataset of the repeated-sketching study, rebuilt from its seeds.
DataSet study_data(const SimConfig& cfg) {
  const Eigen::MatrixXd X = simulate_design(cfg.n, cfg.p, derive_seed(cfg.root_seed, "design", 0));
  return DataSet(X, simulate_response(X, ModelTruth{cfg.resolved_beta0(), cfg.sigma2},
                                      derive_seed(cfg.root_seed, "response", 0)));
}

const char* kKinds[] = {"gaussian", "hadamard", "clarkson_woodruff"};

// ---------------------------------------------------------------------------

void criteria_sketching(const SimReport& r, const SimReport& sampling) {
  const SimConfig& cfg = r.config;
  {
    bool ok = true;
    for (const char* kind : kKinds) {
      const ResultTable& t = r.table(std::string(kind) + "/complete/b1/estimate");
      const double tol = std::string(kind) == "gaussian" ? kKsExact : kKsApprox;
      ok = ok && t.ks_statistic && *t.ks_statistic < tol;
      info("%-18s beta_s1 vs %s: KS %.4f (tol %.2f, used %zu)", kind, t.theory.c_str(), t.ks_statistic.value_or(NAN),
           tol, t.values.size());
    }
    verdict(1, ok, "complete-sketch marginal law of beta_s1 under repeated sketching");
  }
  {
    const DataSet data = study_data(cfg);
    const FullFit full = fit_full(data);
    const Eigen::MatrixXd gram_inv = full.gram_factor.inverse();
    const EmpiricalCdf ref(sample_partial_sketching_rep(Eigen::VectorXd::Unit(cfg.p, 0), full, gram_inv, cfg.k, cfg.p,
                                                        100000, derive_seed(kSeed, "criterion2", 0)));
    const ResultTable& t = r.table("gaussian/partial/b1/estimate");
    const double ks = ks_statistic(t.values, [&](double x) { return ref(x); }).statistic;
    info("gaussian beta_p1 vs representation (1e5 draws): KS %.4f (tol %.2f); vs quadrature law: KS %.4f", ks,
         kKsApprox, t.ks_statistic.value_or(NAN));
    for (const char* kind : {"hadamard", "clarkson_woodruff"}) {
      const ResultTable& o = r.table(std::string(kind) + "/partial/b1/estimate");
      info("%-18s beta_p1 vs representation: KS %.4f (reported)", kind,
           ks_statistic(o.values, [&](double x) { return ref(x); }).statistic);
    }
    verdict(2, ks < kKsApprox, "partial-sketch marginal law of beta_p1 under repeated sketching");
  }
  {
    bool ok = true;
    for (const char* kind : kKinds) {
      const double tol = std::string(kind) == "gaussian" ? kKsExact : kKsApprox;
      for (const char* est : {"complete", "partial"}) {
        const ResultTable& t = r.table(std::string(kind) + "/" + est + "/b6/pivot");
        ok = ok && t.ks_statistic && *t.ks_statistic < tol;
        info("%-18s %-8s b6 pivot vs %s: KS %.4f (tol %.2f, negative denominators %ld)", kind, est, t.theory.c_str(),
             t.ks_statistic.value_or(NAN), tol, t.negative_denominator);
      }
      const double rc = *r.table(std::string(kind) + "/complete/b1/test_zero").rejection_rate;
      const double rp = *r.table(std::string(kind) + "/partial/b1/pivot").rejection_rate;
      info("%-18s b1 = 0 rejection at 0.05: complete %.4f, partial %.4f", kind, rc, rp);
      if (std::string(kind) == "gaussian") ok = ok && rc > rp;
    }
    verdict(3, ok, "pivot calibration under repeated sketching, and complete-vs-partial power ordering");
  }
  {
    bool ok = true;
    for (const char* kind : kKinds)
      for (const char* est : {"complete", "partial"}) {
        const ResultTable& t = sampling.table(std::string(kind) + "/" + est + "/b6/pivot");
        ok = ok && t.ks_statistic && *t.ks_statistic < kKsApprox;
        info("%-18s %-8s b6 pivot vs %s: KS %.4f (tol %.2f)", kind, est, t.theory.c_str(),
             t.ks_statistic.value_or(NAN), kKsApprox);
      }
    verdict(4, ok, "pivot calibration under repeated sampling");
  }
  {
    const double cov = *r.table("gaussian/complete/b1/pivot").coverage;
    info("coverage of the 95%% interval for beta_F1: %.4f over %zu sketches", cov,
         r.table("gaussian/complete/b1/pivot").values.size());
    verdict(5, cov >= kCoverageLo && cov <= kCoverageHi, "complete-sketch interval coverage");
  }
  {
    bool ok = false;
    for (const MomentSummary& m : sampling.moments) {
      const double zs = (m.ssr_mean - m.ssr_expected) / m.ssr_se;
      const double zv = (m.sigma2_hat_mean - cfg.sigma2) / m.sigma2_hat_se;
      info("%-18s SSR_s mean %.2f (se %.2f, expected %.2f, z %.2f); sigma2_hat mean %.5f (se %.5f, z %.2f)",
           to_string(m.sketch).data(), m.ssr_mean, m.ssr_se, m.ssr_expected, zs, m.sigma2_hat_mean, m.sigma2_hat_se,
           zv);
      if (m.sketch == SketchKind::Gaussian) ok = std::abs(zs) < kMomentSe && std::abs(zv) < kMomentSe;
    }
    verdict(6, ok, "unbiasedness of sigma2_hat and of SSR_s (Gaussian sketch, repeated sampling)");
  }
}

// ---------------------------------------------------------------------------

void criterion_normalizations() {
  bool ok = true;
  auto report = [&](const char* what, double mass, double tol) {
    const bool good = std::abs(mass - 1.0) < tol;
    ok = ok && good;
    info("%-52s mass %.12f (tol %.0e)", what, mass, tol);
  };
  for (auto [n, k, p] : {std::tuple{10000, 21, 11}, std::tuple{200, 21, 11}, std::tuple{50, 8, 2}}) {
    const double m = positive_mass([&](double v) { return std::log(scaled_ssr_law_pdf(v, n, k, p)); });
    char buf[96];
    std::snprintf(buf, sizeof buf, "law of k SSR_s / sigma2 (n=%d, k=%d, p=%d)", n, k, p);
    report(buf, m, kMass);
  }
  for (HLawParams h : {HLawParams{4, 6}, HLawParams{5, 4995}, HLawParams{0.5, 0.75}}) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "H law (alpha=%g, lambda=%g)", h.alpha, h.lambda);
    report(buf, positive_mass([&](double u) { return h_law_log_pdf(u, h); }), kMass);
    const double m1 = positive_mass([&](double u) { return h_law_log_pdf(u, h) + std::log(u); });
    const double target = 4 * h.alpha * h.lambda;
    const bool good = rel_close(m1, target, kHMoment);
    ok = ok && good;
    info("%-52s first moment %.10g vs 4 alpha lambda %.10g (rel %.1e)", buf, m1, target, std::abs(m1 / target - 1));
  }
  for (auto [phi, h] : {std::pair{1.5, HLawParams{4, 6}}, std::pair{5.5, HLawParams{5, 4995}}}) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ratio law (phi=%g, alpha=%g, lambda=%g)", phi, h.alpha, h.lambda);
    report(buf, positive_mass([&](double r) { return ratio_law_log_pdf(r, phi, h); }), kMass);
  }
  {
    const ModelTruth truth{Eigen::VectorXd::Constant(1, 2.0), 1.5};
    const Eigen::MatrixXd G = Eigen::MatrixXd::Constant(1, 1, 150.0);
    auto f = [&](double b) { return complete_sampling_pdf(Eigen::VectorXd::Constant(1, b), truth, G, 200, 12, 1); };
    report("complete-sketch sampling density, p=1 (Kummer M form)", real_mass(f, 2.0, std::sqrt(1.5 / 150.0)),
           kMass);
  }
  for (double b0 : {0.0, 0.3, 2.0}) {
    const ModelTruth truth{Eigen::VectorXd::Constant(1, b0), 1.0};
    const Eigen::MatrixXd G = Eigen::MatrixXd::Constant(1, 1, 40.0);
    auto f = [&](double b) { return partial_approx_pdf(Eigen::VectorXd::Constant(1, b), truth, G, 12, 1); };
    char buf[96];
    std::snprintf(buf, sizeof buf, "approximate partial density, p=1, beta0=%g", b0);
    report(buf, real_mass(f, b0, std::sqrt(1.0 / 40.0)), kMassApproxPartial);
  }
  verdict(7, ok, "density normalizations and the H-law first moment");
}

void criterion_special_functions() {
  struct Ref {
    double a, b, z, value;
  };
  bool ok = true;
  double worst = 0;
  auto track = [&](double got, double ref, double tol) {
    const double rel = std::abs(got - ref) / std::abs(ref);
    worst = std::max(worst, rel / tol);
    ok = ok && rel <= tol;
  };
  // mpmath hyp1f1 / hyperu / besselk, 30 digits
  for (const Ref& r : {Ref{1, 2, 1.5, 2.3211260468920432}, Ref{3.5, 7.25, -12, 0.018751401280636478},
                       Ref{0.5, 1.5, -400, 0.044311346272637901}, Ref{2, 3, 50, 2.0324045672061324e+20},
                       Ref{5.5, 20.5, -2000, 4.1699733996141623e-12}})
    track(kummer_m(r.a, r.b, r.z), r.value, kKummerM);
  for (double z : {-30.0, -2.5, 0.7, 12.0}) {
    const double a = 2.25, b = 4.5;
    track((b - a) * kummer_m(a - 1, b, z) + (2 * a - b + z) * kummer_m(a, b, z), a * kummer_m(a + 1, b, z),
          kRecurrence);
  }
  for (const Ref& r : {Ref{1, 1, 2, 0.36132861688822258}, Ref{3, -1.5, 0.7, 0.010631576664408448},
                       Ref{2.5, 0.5, 10, 0.0017549883403215125}, Ref{1.5, 3.2, 0.05, 931.28455737283206}})
    track(kummer_u(r.a, r.b, r.z), r.value, kKummerU);
  track(log_kummer_u(5000.5, -4990, 1e-3), -44515.45406142837, 1e-6);
  for (const Ref& r : {Ref{0.5, 3, 0, 0.036025985131764593}, Ref{4.75, 0.9, 0, 348.92121019636176},
                       Ref{0, 1e-3, 0, 7.0236888005623813}, Ref{2.5, 50, 0, 3.6278396452990476e-23},
                       Ref{10, 1.5, 0, 3027483.5236822367}, Ref{-3.3, 2.2, 0, 0.61600027140668134}})
    track(bessel_k(r.a, r.b), r.value, kBessel);
  for (double nu : {0.25, 1.5, 7.0})
    for (double x : {0.1, 2.0, 30.0})
      track(bessel_k(nu + 1, x), bessel_k(nu - 1, x) + 2 * nu / x * bessel_k(nu, x), kRecurrence);
  info("special functions: worst error / tolerance = %.3f", worst);

  double rt = 0;
  const Law laws[] = {Chi2{12},       StudentT{10},       FisherF{3, 497},      FisherF{11, 10},
                      BetaLaw{2, 7.5}, GammaLaw{5.5, 2.0}, InvGammaLaw{4.0, 1.5}};
  for (const Law& law : laws)
    for (double u : {1e-6, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999, 1 - 1e-6})
      rt = std::max(rt, std::abs(dist_cdf(law, dist_quantile(law, u)) - u));
  info("cdf(quantile(u)) - u: worst %.2e (tol %.0e) over %zu laws", rt, kRoundTrip, std::size(laws));
  verdict(8, ok && rt < kRoundTrip, "special functions against reference values and identities; CDF round trips");
}

void criterion_univariate_partial() {
  const int n = 1000, k = 12, m = 10000;
  Engine eng = make_engine(derive_seed(kSeed, "criterion9", 0));
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0 + draw_normal(eng);
    y(i) = 0.8 * X(i, 0) + draw_normal(eng);
  }
  const DataSet data(X, y);
  const FullFit full = fit_full(data);
  const PartialInputs pin = PartialInputs::from(data);
  std::vector<double> v;
  for (int i = 0; i < m; ++i) {
    const SketchFit fit =
        fit_partial(apply_gaussian(data, {SketchKind::Gaussian, k, derive_seed(kSeed, "criterion9/s", i)}, false), pin);
    v.push_back(partial_univariate_chi2_test(fit, full.beta_F(0), k).statistic);
  }
  const double ks = ks_law(v, Chi2{double(k)});
  info("(k-2) beta_F / beta_p vs chi2(12): KS %.4f over %d sketches, mean %.3f (se %.3f)", ks, m, mean_of(v), se_of(v));
  verdict(9, ks < kKsExact, "univariate partial-sketch chi-square pivot");
}

// W★ tests and efficiency share the replicates.
void criteria_wstar() {
  const int n = 500, p = 3, k = 15, m = 10000;
  Engine eng = make_engine(derive_seed(kSeed, "criterion10", 0));
  Eigen::MatrixXd X(n, p);
  X.col(0).setOnes();
  for (int c = 1; c < p; ++c)
    for (int r = 0; r < n; ++r) X(r, c) = draw_normal(eng);
  const ModelTruth truth{Eigen::Vector3d(1.0, -1.0, 2.0), 1.0};
  const ModelTruth zero{Eigen::Vector3d::Zero(), 1.0};
  std::vector<double> f_full, chi, f_sketched, f_full_zero;
  Eigen::MatrixXd bs(m, p), bstar(m, p);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd y = simulate_response(X, truth, derive_seed(kSeed, "criterion10/y", i));
    const SketchSpec spec{SketchKind::Gaussian, k, derive_seed(kSeed, "criterion10/s", i)};
    const SketchedData sk = apply_sketch(X, y, spec, true);
    const SketchFit eff = fit_efficient_star(sk);
    const double yty = y.squaredNorm();
    const WStarTests w = wstar_exact_tests(eff, sk, yty, truth.beta_0, truth.sigma2);
    f_full.push_back(w.f.statistic);
    chi.push_back(w.chi2->statistic);
    f_sketched.push_back(wstar_exact_tests(eff, sk, yty, truth.beta_0, std::nullopt, WStarResidual::Sketched).f.statistic);
    bs.row(i) = fit_complete(sk).beta.transpose();
    bstar.row(i) = eff.beta.transpose();

    const Eigen::VectorXd y0 = simulate_response(X, zero, derive_seed(kSeed, "criterion10/y", i));
    const SketchedData sk0 = apply_sketch(X, y0, spec, true);
    f_full_zero.push_back(wstar_exact_tests(fit_efficient_star(sk0), sk0, y0.squaredNorm(), zero.beta_0).f.statistic);
  }
  const double ks_f = ks_law(f_full, FisherF{double(p), double(n - p)});
  const double ks_c = ks_law(chi, Chi2{double(p)});
  info("F pivot with the full-data whitened residual vs F(3,497), beta0=(1,-1,2): KS %.4f (tol %.2f)", ks_f, kKsExact);
  info("chi2 pivot, sigma2 known, vs chi2(3): KS %.4f (tol %.2f)", ks_c, kKsExact);
  info("same F pivot at beta0 = 0: KS %.4f; residual SS keeps |(I - P_S) X beta0|^2 otherwise",
       ks_law(f_full_zero, FisherF{double(p), double(n - p)}));
  info("alternative F pivot with the within-sketch whitened residual vs F(3,12): KS %.4f",
       ks_law(f_sketched, FisherF{double(p), double(k - p)}));
  verdict(10, ks_f < kKsExact && ks_c < kKsExact, "exact W* inference: F(p, n-p) and chi2(p) pivots");

  // trace of covariance, with an SE for the difference from per-replicate squared deviations
  const Eigen::RowVectorXd ms = bs.colwise().mean(), me = bstar.colwise().mean();
  std::vector<double> d(m);
  for (int i = 0; i < m; ++i) d[i] = (bs.row(i) - ms).squaredNorm() - (bstar.row(i) - me).squaredNorm();
  const double tr_s = (bs.rowwise() - ms).squaredNorm() / (m - 1);
  const double tr_e = (bstar.rowwise() - me).squaredNorm() / (m - 1);
  const double se = se_of(d);
  info("trace cov beta_s %.5f, trace cov beta_s* %.5f, difference %.5f (se %.5f)", tr_s, tr_e, tr_s - tr_e, se);
  verdict(11, tr_e <= tr_s || tr_s - tr_e > -se, "efficiency of the W*-weighted estimator");
}

// ---------------------------------------------------------------------------

void criterion_adjudications(const SimReport& sketching, const SimReport& sampling) {
  bool ran = true;
  try {
    // residual sum of squares of the partial sketch
    const int n = 200, p = 3, k = 20, m = 200000;
    Engine eng = make_engine(derive_seed(kSeed, "criterion12a", 0));
    Eigen::MatrixXd X(n, p);
    for (int c = 0; c < p; ++c)
      for (int r = 0; r < n; ++r) X(r, c) = draw_normal(eng);
    Eigen::VectorXd y = X * Eigen::Vector3d(1.0, -2.0, 0.5);
    for (int r = 0; r < n; ++r) y(r) += draw_normal(eng);
    const DataSet data(X, y);
    const FullFit full = fit_full(data);
    const PartialInputs pin = PartialInputs::from(data);
    std::vector<double> rss(m);
    for (int i = 0; i < m; ++i) {
      const SketchFit f =
          fit_partial(apply_gaussian(data, {SketchKind::Gaussian, k, derive_seed(kSeed, "criterion12a/s", i)}, false),
                      pin);
      rss[i] = (y - X * f.beta).squaredNorm();
    }
    const double mu = mean_of(rss), se = se_of(rss);
    const double printed = partial_residual_ss_expectation(full.yty, full.SSM_F, k, p);
    const double derived = partial_residual_ss_expectation_corrected(full.yty, full.SSM_F, k, p);
    const double z1 = (mu - printed) / se, z2 = (mu - derived) / se;
    info("[residual SS of the partial sketch] n=%d p=%d k=%d, %d sketches: MC mean %.4f (se %.4f)", n, p, k, m, mu, se);
    info("  numerator (k-p-1)(p+1)+1: %.4f (z %.2f); numerator (k-p-1)(p+1)+2: %.4f (z %.2f)", printed, z1, derived,
         z2);
    info("  resolution: %s", std::abs(z2) < std::abs(z1) ? "+2 (inverse-Wishart second moment) agrees with simulation"
                                                         : "simulation does not favour the +2 form; see numbers");
  } catch (const Error& e) {
    ran = false;
    info("residual SS adjudication failed: %s", e.what());
  }

  try {
    // parameterization of R in the repeated-sketching representation
    const SimConfig& cfg = sketching.config;
    const DataSet data = study_data(cfg);
    const FullFit full = fit_full(data);
    const Eigen::MatrixXd gram_inv = full.gram_factor.inverse();
    const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(cfg.p, 0);
    const ResultTable& sim = sketching.table("gaussian/partial/b1/estimate");
    info("[R parameterization] target beta_F1 = %.6f; simulated partial sketches: mean %.6f (se %.6f)",
         full.beta_F(0), mean_of(sim.values), se_of(sim.values));
    using RL = PartialSketchingOptions::RLaw;
    for (auto [law, name] : {std::pair{RL::ChiSquareScaled, "chi2(k-p+1)/(k-p-1)"},
                             std::pair{RL::ShapeRate, "Gamma(shape k-p+1, rate k-p-1)"},
                             std::pair{RL::ShapeScale, "Gamma(shape k-p+1, scale k-p-1)"}}) {
      PartialSketchingOptions opt;
      opt.r_law = law;
      const std::vector<double> v = sample_partial_sketching_rep(e1, full, gram_inv, cfg.k, cfg.p, 100000,
                                                                 derive_seed(kSeed, "criterion12b", int(law)), opt);
      const EmpiricalCdf ref(v);
      info("  R ~ %-32s mean %.6f (z vs beta_F1 %.2f), KS vs simulated sketches %.4f", name, mean_of(v),
           (mean_of(v) - full.beta_F(0)) / se_of(v), ks_statistic(sim.values, [&](double x) { return ref(x); }).statistic);
    }
    info("  resolution: chi2(k-p+1)/(k-p-1) is the reading with E[m'beta_p] = m'beta_F");
  } catch (const Error& e) {
    ran = false;
    info("R adjudication failed: %s", e.what());
  }

  try {
    // factor of the repeated-sampling representation
    const SimConfig& cfg = sampling.config;
    const Eigen::MatrixXd X = simulate_design(cfg.n, cfg.p, derive_seed(cfg.root_seed, "design", 0));
    const Eigen::MatrixXd gram = X.transpose() * X;
    const ModelTruth truth{cfg.resolved_beta0(), cfg.sigma2};
    const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(cfg.p, 0);
    const ResultTable& sim = sampling.table("gaussian/partial/b1/estimate");
    info("[representation factor] beta0_1 = %.3f; simulated partial sketches: mean %.5f (se %.5f)", truth.beta_0(0),
         mean_of(sim.values), se_of(sim.values));
    for (bool plus : {false, true}) {
      PartialSamplingOptions opt;
      opt.factor_k_minus_p_plus_1 = plus;
      const std::vector<double> v = sample_partial_sampling_rep(e1, truth, gram, cfg.k, cfg.p, 100000,
                                                                derive_seed(kSeed, "criterion12c", plus), opt);
      const EmpiricalCdf ref(v);
      info("  factor %s/R: mean %.5f (theory %.5f), KS vs simulated sketches %.4f", plus ? "(k-p+1)" : "(k-p-1)",
           mean_of(v), plus ? truth.beta_0(0) * (cfg.k - cfg.p + 1) / (cfg.k - cfg.p - 1) : truth.beta_0(0),
           ks_statistic(sim.values, [&](double x) { return ref(x); }).statistic);
    }
    info("  resolution: (k-p-1)/R keeps the representation unbiased and matches simulation");
  } catch (const Error& e) {
    ran = false;
    info("factor adjudication failed: %s", e.what());
  }
  verdict(12, ran, "open-question adjudications executed and recorded");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    SimConfig sk = SimConfig::paper(Regime::RepeatedSketch);
    const auto t1 = std::chrono::steady_clock::now();
    const SimReport sketching = run_simulation(sk);
    std::printf("# repeated sketching, n=%d p=%d k=%d m=%d, three sketches: %.1f s\n", sk.n, sk.p, sk.k, sk.m,
                elapsed(t1));
    SimConfig sa = SimConfig::paper(Regime::RepeatedSample);
    const auto t2 = std::chrono::steady_clock::now();
    const SimReport sampling = run_simulation(sa);
    std::printf("# repeated sampling, n=%d p=%d k=%d m=%d, three sketches: %.1f s\n", sa.n, sa.p, sa.k, sa.m,
                elapsed(t2));

    criteria_sketching(sketching, sampling);
    criterion_normalizations();
    criterion_special_functions();
    criterion_univariate_partial();
    criteria_wstar();
    criterion_adjudications(sketching, sampling);
  } catch (const std::exception& e) {
    std::printf("acceptance run aborted: %s\n", e.what());
    return 2;
  }
  std::printf("# %d criteria failed, total %.1f s\n", failures, elapsed(t0));
  return failures == 0 ? 0 : 1;
}
