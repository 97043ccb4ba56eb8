#include "sketch_infer/sim_study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "sketch_infer/densities.hpp"
#include "sketch_infer/distributions.hpp"
#include "sketch_infer/error.hpp"

namespace sketch_infer {

namespace {

// Reference law of one table: CDF for KS, density for the overlay, and the
// 0.1% and 99.9% quantiles bounding the overlay grid.
struct Theory {
  std::string name;
  std::function<double(double)> cdf, pdf;
  double lo = 0.0, hi = 0.0;
};

Theory t_theory(double df, double loc, double scale, std::string name) {
  const Law law = StudentT{df};
  Theory th;
  th.name = std::move(name);
  th.cdf = [law, loc, scale](double x) { return dist_cdf(law, (x - loc) / scale); };
  th.pdf = [law, loc, scale](double x) { return dist_pdf(law, (x - loc) / scale) / scale; };
  th.lo = loc + scale * dist_quantile(law, 0.001);
  th.hi = loc + scale * dist_quantile(law, 0.999);
  return th;
}

Theory general_theory(std::function<double(double)> cdf, std::function<double(double)> pdf, double guess,
                      double step, std::string name) {
  Theory th;
  th.name = std::move(name);
  th.lo = invert_cdf(cdf, 0.001, guess, step);
  th.hi = invert_cdf(cdf, 0.999, guess, step);
  // Linear interpolation on a fine grid; the exact CDF is used outside it.
  const double a = invert_cdf(cdf, 1e-7, guess, step);
  const double b = invert_cdf(cdf, 1.0 - 1e-7, guess, step);
  constexpr int kGrid = 2048;
  auto table = std::make_shared<std::vector<double>>(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) (*table)[i] = cdf(a + (b - a) * i / kGrid);
  th.cdf = [table, a, b, exact = std::move(cdf)](double x) {
    if (x <= a || x >= b) return exact(x);
    const double pos = (x - a) / (b - a) * kGrid;
    const int i = std::min(static_cast<int>(pos), kGrid - 1);
    return (*table)[i] + (pos - i) * ((*table)[i + 1] - (*table)[i]);
  };
  th.pdf = std::move(pdf);
  return th;
}

// Empirical law of representation draws with a Gaussian kernel density.
Theory empirical_theory(std::vector<double> draws, std::string name) {
  auto ecdf = std::make_shared<EmpiricalCdf>(std::move(draws));
  const auto& s = ecdf->sorted();
  const double iqr = ecdf->quantile(0.75) - ecdf->quantile(0.25);
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= s.size();
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / std::max<std::size_t>(1, s.size() - 1));
  const double h = 0.9 * std::min(sd, iqr / 1.34) * std::pow(static_cast<double>(s.size()), -0.2);
  Theory th;
  th.name = std::move(name);
  th.cdf = [ecdf](double x) { return (*ecdf)(x); };
  th.pdf = [ecdf, h](double x) {
    const auto& v = ecdf->sorted();
    // Only draws within 8 bandwidths contribute.
    auto a = std::lower_bound(v.begin(), v.end(), x - 8.0 * h);
    auto b = std::upper_bound(v.begin(), v.end(), x + 8.0 * h);
    double acc = 0.0;
    for (auto it = a; it != b; ++it) {
      const double z = (x - *it) / h;
      acc += std::exp(-0.5 * z * z);
    }
    return acc / (v.size() * h * std::sqrt(2.0 * M_PI));
  };
  th.lo = ecdf->quantile(0.001);
  th.hi = ecdf->quantile(0.999);
  return th;
}

enum class Status : unsigned char { Ok, Error, NegativeDenominator };

struct Cell {
  double value = 0.0;
  Status status = Status::Error;
  bool covered = false;
  bool reject = false;
};

struct TableSpec {
  EstimatorKind estimator;
  int target;
  std::string quantity;
  double hypothesis;
  bool has_coverage;
  bool has_rejection;
  std::optional<Theory> theory;
};

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::string coef_label(int j) { return "b" + std::to_string(j + 1); }

ResultTable finish_table(const TableSpec& spec, SketchKind kind, const std::vector<std::vector<Cell>>& cells,
                         std::size_t column, const SimConfig& cfg) {
  ResultTable t;
  t.sketch = kind;
  t.estimator = spec.estimator;
  t.target = spec.target;
  t.quantity = spec.quantity;
  t.hypothesis = spec.hypothesis;
  t.name = std::string(to_string(kind)) + "/" + std::string(to_string(spec.estimator)) + "/" +
           coef_label(spec.target) + "/" + spec.quantity;
  long covered = 0, rejected = 0;
  for (const auto& row : cells) {
    const Cell& c = row[column];
    switch (c.status) {
      case Status::Ok:
        t.values.push_back(c.value);
        covered += c.covered;
        rejected += c.reject;
        break;
      case Status::NegativeDenominator:
        ++t.negative_denominator;
        ++t.errored;
        break;
      case Status::Error: ++t.errored; break;
    }
  }
  t.negative_denominator_rate = static_cast<double>(t.negative_denominator) / cfg.m;
  const double used = static_cast<double>(t.values.size());
  if (!t.values.empty()) {
    t.histogram = make_histogram(t.values, cfg.max_bins, cfg.bins);
    if (spec.has_coverage) t.coverage = covered / used;
    if (spec.has_rejection) t.rejection_rate = rejected / used;
  }
  if (spec.theory) {
    const Theory& th = *spec.theory;
    t.theory = th.name;
    if (t.values.size() >= 2) {
      const KsResult ks = ks_statistic(t.values, th.cdf);
      t.ks_statistic = ks.statistic;
      t.ks_p = ks.p_value;
    }
    const int pts = cfg.overlay_points;
    t.overlay_x.resize(pts);
    t.overlay_pdf.resize(pts);
    for (int i = 0; i < pts; ++i) {
      const double x = pts == 1 ? 0.5 * (th.lo + th.hi) : th.lo + (th.hi - th.lo) * i / (pts - 1);
      t.overlay_x[i] = x;
      t.overlay_pdf[i] = th.pdf(x);
    }
  }
  return t;
}

MomentSummary finish_moments(SketchKind kind, const std::vector<double>& ssr, const std::vector<double>& s2,
                             double expected) {
  MomentSummary ms;
  ms.sketch = kind;
  ms.ssr_expected = expected;
  ms.count = static_cast<long>(ssr.size());
  if (ssr.empty()) return ms;
  auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    se = v.size() > 1 ? std::sqrt(var / (v.size() - 1) / v.size()) : 0.0;
  };
  mean_se(ssr, ms.ssr_mean, ms.ssr_se);
  mean_se(s2, ms.sigma2_hat_mean, ms.sigma2_hat_se);
  return ms;
}

// Replicate loop shared by both regimes. make_y returns the response for
// replicate i (the fixed y under repeated sketching).
void run_kind(const SimConfig& cfg, SketchKind kind, const Eigen::MatrixXd& X,
              const std::function<Eigen::VectorXd(int)>& make_y, const std::vector<TableSpec>& specs,
              double ssr_expected, SimReport& report) {
  const int threads = worker_count(cfg.threads);
  std::vector<std::vector<Cell>> cells(cfg.m, std::vector<Cell>(specs.size()));
  std::vector<double> ssr(cfg.m, std::nan("")), s2(cfg.m, std::nan(""));
  const std::string stream = "sketch/" + std::string(to_string(kind));
  const int n = cfg.n, p = cfg.p, k = cfg.k;
  const Regime regime = cfg.regime;

  parallel_for(cfg.m, threads, [&](int i) {
    const Eigen::VectorXd y = make_y(i);
    SketchedData sk;
    try {
      sk = apply_sketch(X, y, SketchSpec{kind, k, derive_seed(cfg.root_seed, stream, i)}, false);
    } catch (const Error&) {
      return;  // every cell stays Error
    }
    std::optional<SketchFit> cfit, pfit;
    try {
      cfit = fit_complete(sk);
      ssr[i] = *cfit->SSR_s;
      s2[i] = sigma2_hat_complete(*cfit->SSR_s, n, k, p);
    } catch (const Error&) {
    }
    if (cfg.include_partial) {
      try {
        pfit = fit_partial(sk, PartialInputs{X.transpose() * y, y.squaredNorm()});
      } catch (const Error&) {
      }
    }
    for (std::size_t c = 0; c < specs.size(); ++c) {
      const TableSpec& spec = specs[c];
      Cell& cell = cells[i][c];
      const int j = spec.target;
      const SketchFit* fit = spec.estimator == EstimatorKind::Complete ? (cfit ? &*cfit : nullptr)
                                                                       : (pfit ? &*pfit : nullptr);
      if (!fit) continue;
      try {
        if (spec.quantity == "estimate") {
          cell.value = fit->beta(j);
        } else if (spec.estimator == EstimatorKind::Complete) {
          const Target target = regime == Regime::RepeatedSketch ? Target::BetaF : Target::Beta0;
          const TestResult r = complete_marginal_t_test(*fit, sk, j, spec.hypothesis, target);
          cell.value = r.statistic;
          cell.reject = r.p_value < cfg.alpha;
          if (spec.has_coverage) {
            const ConfidenceInterval ci = complete_marginal_ci(*fit, sk, j, 1.0 - cfg.alpha);
            cell.covered = ci.lower <= spec.hypothesis && spec.hypothesis <= ci.upper;
          }
        } else {
          PartialTestOptions opt;
          opt.regime = regime;
          if (regime == Regime::RepeatedSample && cfit) opt.sigma2_proxy = s2[i];
          const TestResult r = partial_marginal_t_test(*fit, sk, j, opt);
          cell.value = r.statistic;
          cell.reject = r.p_value < cfg.alpha;
        }
        cell.status = std::isfinite(cell.value) ? Status::Ok : Status::Error;
      } catch (const Error& e) {
        cell.status = e.code() == ErrorCode::NegativeDenominator ? Status::NegativeDenominator : Status::Error;
      }
    }
  });

  for (std::size_t c = 0; c < specs.size(); ++c) report.tables.push_back(finish_table(specs[c], kind, cells, c, cfg));
  std::vector<double> ssr_ok, s2_ok;
  for (int i = 0; i < cfg.m; ++i)
    if (!std::isnan(ssr[i])) {
      ssr_ok.push_back(ssr[i]);
      s2_ok.push_back(s2[i]);
    }
  report.moments.push_back(finish_moments(kind, ssr_ok, s2_ok, ssr_expected));
}

std::optional<Theory> try_theory(const std::function<Theory()>& make) {
  try {
    return make();
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

SimConfig SimConfig::paper(Regime regime) {
  SimConfig c;
  c.n = 10000;
  c.regime = regime;
  return c;
}

SimConfig SimConfig::desk(Regime regime) {
  SimConfig c;
  c.regime = regime;
  return c;
}

SimConfig SimConfig::smoke(Regime regime) {
  SimConfig c = desk(regime);
  c.m = 10;
  c.reference_draws = 2000;
  c.overlay_points = 64;
  return c;
}

Eigen::VectorXd SimConfig::resolved_beta0() const {
  if (beta0.size() > 0) return beta0;
  if (p == 1) return Eigen::VectorXd::Constant(1, 1.0);
  return Eigen::VectorXd::LinSpaced(p, -5.0, 5.0);
}

void SimConfig::validate() const {
  require(p >= 1 && n > p, ErrorCode::DomainError, "simulation needs n > p >= 1");
  require(m >= 1, ErrorCode::DomainError, "simulation needs m >= 1");
  require(k > p, ErrorCode::DomainError, "complete-sketch paths need k > p");
  require(!include_partial || k > p + 3, ErrorCode::DomainError,
          "partial-sketch paths need k > p + 3 (set include_partial = false to skip them)");
  require(beta0.size() == 0 || beta0.size() == p, ErrorCode::DimensionMismatch, "beta0 must have length p");
  require(beta0.size() == 0 || beta0.allFinite(), ErrorCode::NonFinite, "beta0 must be finite");
  require(sigma2 > 0.0 && std::isfinite(sigma2), ErrorCode::DomainError, "sigma2 must be positive");
  require(!sketch_kinds.empty(), ErrorCode::DomainError, "no sketch kinds selected");
  require(!targets.empty(), ErrorCode::DomainError, "no target coefficients selected");
  for (int j : targets)
    require(j >= 0 && j < p, ErrorCode::IndexOutOfRange, "target index " + std::to_string(j) + " out of range");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::DomainError, "alpha must lie in (0, 1)");
  require(max_bins >= 1 && overlay_points >= 1 && reference_draws >= 2, ErrorCode::DomainError,
          "max_bins, overlay_points >= 1 and reference_draws >= 2 required");
  require(!bins || *bins >= 1, ErrorCode::DomainError, "bins must be >= 1");
  require(threads >= 0, ErrorCode::DomainError, "threads must be >= 0");
}

const ResultTable& SimReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  fail(ErrorCode::IndexOutOfRange, "no result table named " + name);
}

Eigen::MatrixXd simulate_design(int n, int p, std::uint64_t seed) {
  require(n >= 1 && p >= 1, ErrorCode::DomainError, "design needs n, p >= 1");
  Engine engine = make_engine(seed);
  Eigen::MatrixXd X(n, p);
  X.col(0).setOnes();
  for (int c = 1; c < p; ++c)
    for (int r = 0; r < n; ++r) X(r, c) = draw_normal(engine);
  return X;
}

int worker_count(int requested) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int cap = hw;
  if (const char* env = std::getenv("SKETCH_INFER_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = std::min(cap, v);
  }
  if (requested >= 1) cap = std::min(cap, requested);
  return std::max(1, cap);
}

SimReport run_repeated_sketching(const SimConfig& cfg) {
  cfg.validate();
  require(cfg.regime == Regime::RepeatedSketch, ErrorCode::DomainError, "config regime is not repeated_sketch");
  const int n = cfg.n, p = cfg.p, k = cfg.k;
  const Eigen::MatrixXd X = simulate_design(n, p, derive_seed(cfg.root_seed, "design", 0));
  const ModelTruth truth{cfg.resolved_beta0(), cfg.sigma2};
  const Eigen::VectorXd y = simulate_response(X, truth, derive_seed(cfg.root_seed, "response", 0));
  const DataSet data(X, y);
  const FullFit full = fit_full(data);
  const Eigen::MatrixXd gram_inv = full.gram_factor.inverse();

  SimReport report;
  report.config = cfg;
  report.beta_F = full.beta_F;
  report.SSR_F = full.SSR_F;
  report.SSM_F = full.SSM_F;

  std::vector<TableSpec> specs;
  const double t_df = k - p;
  for (int j : cfg.targets) {
    const double bf = full.beta_F(j);
    const double scale = std::sqrt(full.SSR_F / (k - p + 1) * gram_inv(j, j));
    specs.push_back({EstimatorKind::Complete, j, "estimate", bf, false, false,
                     t_theory(k - p + 1, bf, scale, "t(" + std::to_string(k - p + 1) + ") location-scale")});
    specs.push_back({EstimatorKind::Complete, j, "pivot", bf, true, true,
                     t_theory(t_df, 0.0, 1.0, "t(" + std::to_string(k - p) + ")")});
    specs.push_back({EstimatorKind::Complete, j, "test_zero", 0.0, false, true,
                     t_theory(t_df, 0.0, 1.0, "t(" + std::to_string(k - p) + ")")});
    if (cfg.include_partial) {
      auto theory = try_theory([&] {
        const PartialSketchingRep rep =
            partial_sketching_rep(Eigen::VectorXd::Unit(p, j), full, gram_inv, k, p);
        auto law = std::make_shared<PartialSketchingLaw>(rep);
        return general_theory([law](double x) { return law->cdf(x); }, [law](double x) { return law->pdf(x); },
                              rep.center, std::max(rep.spread, 1e-8), "partial sketching representation");
      });
      specs.push_back({EstimatorKind::Partial, j, "estimate", bf, false, false, theory});
      specs.push_back({EstimatorKind::Partial, j, "pivot", 0.0, false, true,
                       t_theory(k - p + 1, 0.0, 1.0, "t(" + std::to_string(k - p + 1) + ")")});
    }
  }
  for (SketchKind kind : cfg.sketch_kinds)
    run_kind(cfg, kind, X, [&y](int) { return y; }, specs, full.SSR_F * (k - p) / k, report);
  return report;
}

SimReport run_repeated_sampling(const SimConfig& cfg) {
  cfg.validate();
  require(cfg.regime == Regime::RepeatedSample, ErrorCode::DomainError, "config regime is not repeated_sample");
  const int n = cfg.n, p = cfg.p, k = cfg.k;
  const Eigen::MatrixXd X = simulate_design(n, p, derive_seed(cfg.root_seed, "design", 0));
  GramFactor::from_design(X);  // rank check
  const Eigen::MatrixXd gram = X.transpose() * X;
  const ModelTruth truth{cfg.resolved_beta0(), cfg.sigma2};

  SimReport report;
  report.config = cfg;

  std::vector<TableSpec> specs;
  for (int j : cfg.targets) {
    const double b0 = truth.beta_0(j);
    auto marginal = std::make_shared<CompleteSamplingMarginal>(truth, gram, n, k, p, j);
    specs.push_back({EstimatorKind::Complete, j, "estimate", b0, false, false,
                     general_theory([marginal](double x) { return marginal->cdf(x); },
                                    [marginal](double x) { return marginal->pdf(x); }, marginal->location(),
                                    marginal->scale(), "complete sampling marginal")});
    specs.push_back({EstimatorKind::Complete, j, "pivot", b0, true, true,
                     t_theory(k - p, 0.0, 1.0, "t(" + std::to_string(k - p) + ")")});
    specs.push_back({EstimatorKind::Complete, j, "test_zero", 0.0, false, true,
                     t_theory(k - p, 0.0, 1.0, "t(" + std::to_string(k - p) + ")")});
    if (cfg.include_partial) {
      auto theory = try_theory([&] {
        return empirical_theory(sample_partial_sampling_rep(Eigen::VectorXd::Unit(p, j), truth, gram, k, p,
                                                            cfg.reference_draws,
                                                            derive_seed(cfg.root_seed, "reference", j)),
                                "partial sampling representation (Monte Carlo)");
      });
      specs.push_back({EstimatorKind::Partial, j, "estimate", b0, false, false, theory});
      specs.push_back({EstimatorKind::Partial, j, "pivot", 0.0, false, true,
                       t_theory(k - p + 1, 0.0, 1.0, "t(" + std::to_string(k - p + 1) + ")")});
    }
  }
  const std::uint64_t root = cfg.root_seed;
  for (SketchKind kind : cfg.sketch_kinds)
    run_kind(
        cfg, kind, X, [&](int i) { return simulate_response(X, truth, derive_seed(root, "response", i)); }, specs,
        cfg.sigma2 * (k - p) * static_cast<double>(n - p) / k, report);
  return report;
}

SimReport run_simulation(const SimConfig& cfg) {
  return cfg.regime == Regime::RepeatedSketch ? run_repeated_sketching(cfg) : run_repeated_sampling(cfg);
}

}  // namespace sketch_infer
