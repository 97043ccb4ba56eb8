#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sketch_infer/error.hpp"

namespace sketch_infer {

struct CliConfig {
  std::string command;  // fit | infer | simulate
  std::string input_path;
  std::string response = "0";  // column name or 0-based index
  bool intercept = false;
  std::string sketch = "gaussian";
  int k = 0;
  std::string mode = "complete";  // complete | partial | efficient
  double alpha = 0.05;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string output_path;  // file for fit/infer (stdout if empty), directory for simulate
  std::string format = "json";
  bool no_wstar = false;
  std::vector<double> nulls;    // per-coefficient null values, default 0
  std::string target = "beta_F";  // beta_F | beta_0
  // simulate
  std::string config_path;
  std::string preset;  // desk | paper | smoke; empty: config file, then desk
  std::string regime;           // repeated_sketch | repeated_sample | both
  std::optional<int> replicates;
  std::optional<int> threads;
};

struct CsvData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> covariate_names;
  std::string response_name;
};

/// Header row, comma separator, '.' decimals. Columns with no numeric entry are
/// ignored; a column mixing numbers and text is a ParseError naming the cell.
CsvData read_csv(const std::string& path, const std::string& response, bool intercept);

/// 0 success, 2 parse or validation failure, 3 rank problems (including k too
/// small), 4 missing W★.
int exit_code_for(ErrorCode code);

int cmd_fit(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_infer(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const CliConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and dispatches.
int run_cli(int argc, char** argv);

}  // namespace sketch_infer
