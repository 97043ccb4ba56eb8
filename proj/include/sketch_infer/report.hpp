#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketch_infer/sim_study.hpp"

namespace sketch_infer {

inline constexpr const char* kSchema = "sketch-infer/1";

/// Fit-level report written by `fit` and embedded in `infer`.
struct FitReport {
  std::string mode;    // complete | partial | efficient
  std::string sketch;  // gaussian | hadamard | clarkson_woodruff
  int k = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int p = 0;
  std::vector<std::string> coefficient_names;
  std::vector<double> estimates;
  std::optional<double> SSR_s;
  std::optional<double> SSM_p;
  std::optional<double> gamma;
  bool w_star_retained = false;

  bool operator==(const FitReport&) const = default;
};

FitReport make_fit_report(const SketchFit& fit, const SketchSpec& spec, bool w_star_retained,
                          std::vector<std::string> names);

nlohmann::json to_json(const FitReport& r);
FitReport fit_report_from_json(const nlohmann::json& j);

struct CoefficientInference {
  std::string name;
  int index = 0;
  double estimate = 0.0;
  double null_value = 0.0;
  std::optional<TestResult> test;
  std::optional<ConfidenceInterval> ci;
  std::string flag;  // empty, or e.g. "negative_denominator"
  std::string note;
};

struct InferenceReport {
  FitReport fit;
  double alpha = 0.05;
  Target target = Target::BetaF;
  std::vector<CoefficientInference> coefficients;
  std::optional<TestResult> joint;
};

nlohmann::json to_json(const TestResult& t);
nlohmann::json to_json(const InferenceReport& r);

nlohmann::json to_json(const SimConfig& cfg);
/// Parses a config object. Unknown keys are rejected with ParseError.
SimConfig sim_config_from_json(const nlohmann::json& j, const SimConfig& base);

nlohmann::json to_json(const SimReport& r);

/// One CSV per table (columns bin_left, bin_right, count, theory_x, theory_pdf);
/// returns the file names written inside dir.
std::vector<std::string> write_table_csvs(const SimReport& r, const std::string& dir, const std::string& prefix);

/// Fixed-width summary (KS, coverage, rejection and failure rates).
std::string summary_table(const SimReport& r);

}  // namespace sketch_infer
