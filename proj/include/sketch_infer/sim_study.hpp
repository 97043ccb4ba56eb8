#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sketch_infer/estimators.hpp"
#include "sketch_infer/inference.hpp"
#include "sketch_infer/ks.hpp"
#include "sketch_infer/sketch_ops.hpp"

namespace sketch_infer {

/// Artificial model: X has an intercept column and p − 1 i.i.d. N(0, 1)
/// columns; y ~ N(Xβ₀, σ²I).
struct SimConfig {
  int n = 2000;
  int p = 11;
  int k = 21;
  int m = 10000;
  Eigen::VectorXd beta0;  // empty means evenly spaced on [−5, 5]
  double sigma2 = 1.0;
  std::vector<SketchKind> sketch_kinds{SketchKind::Gaussian, SketchKind::Hadamard, SketchKind::ClarksonWoodruff};
  Regime regime = Regime::RepeatedSketch;
  std::vector<int> targets{0, 5};  // 0-based coefficient indices
  std::uint64_t root_seed = 20240611;
  double alpha = 0.05;
  /// Partial-estimator paths (need k > p + 3).
  bool include_partial = true;
  std::optional<int> bins;  // overrides Freedman–Diaconis
  int max_bins = 200;
  int overlay_points = 512;
  /// Representation draws behind Monte Carlo reference laws.
  int reference_draws = 100000;
  /// 0 means min(hardware threads, SKETCH_INFER_THREADS if set).
  int threads = 0;

  /// n = 10⁴, p = 11, k = 21, m = 10⁴, β = (−5, …, 5), σ² = 1.
  static SimConfig paper(Regime regime);
  /// Same design at n = 2000.
  static SimConfig desk(Regime regime);
  /// m = 10 at desk scale.
  static SimConfig smoke(Regime regime);

  Eigen::VectorXd resolved_beta0() const;
  void validate() const;
};

/// One (sketch, estimator, coefficient, quantity) result table.
struct ResultTable {
  std::string name;  // table key, e.g. "gaussian/complete/b1/pivot"
  SketchKind sketch = SketchKind::Gaussian;
  EstimatorKind estimator = EstimatorKind::Complete;
  int target = 0;
  std::string quantity;  // estimate | pivot | test_zero
  std::string theory;    // name of the reference law
  double hypothesis = 0.0;
  std::vector<double> values;  // per used replicate, replicate order
  long errored = 0;
  long negative_denominator = 0;
  Histogram histogram;
  std::optional<double> ks_statistic, ks_p;
  std::optional<double> coverage;
  std::optional<double> rejection_rate;
  double negative_denominator_rate = 0.0;
  std::vector<double> overlay_x, overlay_pdf;
};

/// Monte Carlo moments of SSR_s and σ̂²_s for one sketch kind.
struct MomentSummary {
  SketchKind sketch = SketchKind::Gaussian;
  long count = 0;
  double ssr_mean = 0.0, ssr_se = 0.0, ssr_expected = 0.0;
  double sigma2_hat_mean = 0.0, sigma2_hat_se = 0.0;
};

struct SimReport {
  SimConfig config;
  Eigen::VectorXd beta_F;  // of the realized dataset (repeated sketching) or empty
  double SSR_F = 0.0;
  double SSM_F = 0.0;
  std::vector<ResultTable> tables;
  std::vector<MomentSummary> moments;

  const ResultTable& table(const std::string& name) const;
};

/// Design matrix of the artificial model.
Eigen::MatrixXd simulate_design(int n, int p, std::uint64_t seed);

/// Threads for replicate loops: min(hardware, SKETCH_INFER_THREADS, requested).
int worker_count(int requested);

SimReport run_repeated_sketching(const SimConfig& cfg);
SimReport run_repeated_sampling(const SimConfig& cfg);
SimReport run_simulation(const SimConfig& cfg);

}  // namespace sketch_infer
