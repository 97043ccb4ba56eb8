#include "sketch_infer/cli.hpp"

#include <CLI11.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sketch_infer/core_model.hpp"
#include "sketch_infer/estimators.hpp"
#include "sketch_infer/inference.hpp"
#include "sketch_infer/report.hpp"
#include "sketch_infer/sim_study.hpp"
#include "sketch_infer/sketch_ops.hpp"

namespace sketch_infer {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(boost::algorithm::trim_copy(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(boost::algorithm::trim_copy(cur));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

struct Prepared {
  CsvData csv;
  DataSet data;
  SketchSpec spec;
  SketchedData sk;
  SketchFit fit;
  bool want_w_star = false;
};

Prepared prepare(const CliConfig& cfg) {
  require(cfg.mode == "complete" || cfg.mode == "partial" || cfg.mode == "efficient", ErrorCode::ParseError,
          "unknown mode '" + cfg.mode + "' (valid: complete, partial, efficient)");
  require(cfg.format == "json" || cfg.format == "csv", ErrorCode::ParseError,
          "unknown format '" + cfg.format + "' (valid: json, csv)");
  require(cfg.alpha > 0.0 && cfg.alpha < 1.0, ErrorCode::ParseError, "alpha must lie in (0, 1)");
  const SketchKind kind = parse_sketch_kind(cfg.sketch);
  CsvData csv = read_csv(cfg.input_path, cfg.response, cfg.intercept);
  DataSet data(csv.X, csv.y);
  const int p = data.p();
  require(cfg.k >= 1, ErrorCode::ParseError, "--k must be a positive integer");
  if (cfg.mode == "partial")
    require(cfg.k > p + 1, ErrorCode::GammaNonpositive,
            "partial sketching needs k > p + 1 (k=" + std::to_string(cfg.k) + ", p=" + std::to_string(p) + ")");
  else
    require(cfg.k > p, ErrorCode::RankDeficient,
            "sketch size must satisfy k > p (k=" + std::to_string(cfg.k) + ", p=" + std::to_string(p) + ")");
  const bool want = cfg.mode == "efficient" && !cfg.no_wstar;
  const SketchSpec spec{kind, cfg.k, cfg.seed};
  SketchedData sk = apply_sketch(data, spec, want);
  SketchFit fit;
  if (cfg.mode == "complete")
    fit = fit_complete(sk);
  else if (cfg.mode == "partial")
    fit = fit_partial(sk, PartialInputs::from(data));
  else
    fit = fit_efficient_star(sk);
  return {std::move(csv), std::move(data), spec, std::move(sk), std::move(fit), want};
}

void emit(const CliConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output_path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::ParseError, "cannot open output file " + cfg.output_path);
  f << text;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

CsvData read_csv(const std::string& path, const std::string& response, bool intercept) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open input file '" + path + "'");
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, path + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  const std::size_t cols = header.size();
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (boost::algorithm::trim_copy(line).empty()) continue;
    auto cells = split_csv_line(line);
    require(cells.size() == cols, ErrorCode::ParseError,
            path + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " fields, header has " +
                std::to_string(cols));
    rows.push_back(std::move(cells));
    row_line.push_back(line_no);
  }
  require(!rows.empty(), ErrorCode::ParseError, path + ": no data rows");

  std::size_t resp = cols;
  for (std::size_t c = 0; c < cols; ++c)
    if (header[c] == response) resp = c;
  if (resp == cols && is_index(response)) resp = static_cast<std::size_t>(std::stoul(response));
  require(resp < cols, ErrorCode::ParseError, "response column '" + response + "' not found in header");

  // A column is numeric if any entry parses; then every entry must.
  std::vector<bool> numeric(cols, false);
  for (std::size_t c = 0; c < cols; ++c)
    for (const auto& r : rows)
      if (parse_number(r[c])) {
        numeric[c] = true;
        break;
      }
  require(numeric[resp], ErrorCode::ParseError, "response column '" + header[resp] + "' is not numeric");
  std::vector<std::size_t> covs;
  for (std::size_t c = 0; c < cols; ++c)
    if (c != resp && numeric[c]) covs.push_back(c);

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(covs.size()) + (intercept ? 1 : 0);
  require(p >= 1, ErrorCode::ParseError, "no covariate columns (use --intercept for an intercept-only model)");
  CsvData out;
  out.X.resize(n, p);
  out.y.resize(n);
  out.response_name = header[resp];
  if (intercept) out.covariate_names.push_back("(intercept)");
  for (std::size_t c : covs) out.covariate_names.push_back(header[c]);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto cell = [&](std::size_t c) {
      const auto v = parse_number(rows[i][c]);
      require(v.has_value() && std::isfinite(*v), ErrorCode::ParseError,
              path + ": line " + std::to_string(row_line[i]) + ", column '" + header[c] + "': '" + rows[i][c] +
                  "' is not a finite number");
      return *v;
    };
    out.y(i) = cell(resp);
    Eigen::Index col = 0;
    if (intercept) out.X(i, col++) = 1.0;
    for (std::size_t c : covs) out.X(i, col++) = cell(c);
  }
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::GammaNonpositive:
    case ErrorCode::NotPositiveDefinite: return 3;
    case ErrorCode::MissingWStar: return 4;
    default: return 2;
  }
}

int cmd_fit(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared pr = prepare(cfg);
    const FitReport rep = make_fit_report(pr.fit, pr.spec, pr.want_w_star, pr.csv.covariate_names);
    if (cfg.format == "json") {
      emit(cfg, to_json(rep).dump(2) + "\n", out);
    } else {
      std::ostringstream os;
      os << "name,estimate\n";
      for (std::size_t i = 0; i < rep.estimates.size(); ++i)
        os << rep.coefficient_names[i] << ',' << num(rep.estimates[i]) << '\n';
      os << "# mode=" << rep.mode << ",sketch=" << rep.sketch << ",k=" << rep.k << ",seed=" << rep.seed
         << ",SSR_s=" << num(rep.SSR_s) << ",SSM_p=" << num(rep.SSM_p) << ",gamma=" << num(rep.gamma) << '\n';
      emit(cfg, os.str(), out);
    }
    return 0;
  });
}

int cmd_infer(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(cfg.target == "beta_F" || cfg.target == "beta_0", ErrorCode::ParseError,
            "unknown target '" + cfg.target + "' (valid: beta_F, beta_0)");
    const Prepared pr = prepare(cfg);
    const int p = pr.fit.p;
    const int k = pr.fit.k;
    require(cfg.nulls.empty() || static_cast<int>(cfg.nulls.size()) == p, ErrorCode::ParseError,
            "--null needs exactly p = " + std::to_string(p) + " values");
    const Eigen::VectorXd nulls =
        cfg.nulls.empty() ? Eigen::VectorXd(Eigen::VectorXd::Zero(p))
                          : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(cfg.nulls.data(), p));
    const Target target = cfg.target == "beta_F" ? Target::BetaF : Target::Beta0;
    const double level = 1.0 - cfg.alpha;

    InferenceReport rep;
    rep.fit = make_fit_report(pr.fit, pr.spec, pr.want_w_star, pr.csv.covariate_names);
    rep.alpha = cfg.alpha;
    rep.target = target;
    for (int j = 0; j < p; ++j) {
      CoefficientInference c;
      c.name = pr.csv.covariate_names[j];
      c.index = j;
      c.estimate = pr.fit.beta(j);
      c.null_value = nulls(j);
      try {
        if (cfg.mode == "complete") {
          c.test = complete_marginal_t_test(pr.fit, pr.sk, j, nulls(j), target);
          c.ci = complete_marginal_ci(pr.fit, pr.sk, j, level);
        } else if (cfg.mode == "efficient") {
          c.test = wstar_marginal_t_test(pr.fit, pr.sk, j, nulls(j));
          c.ci = wstar_marginal_ci(pr.fit, pr.sk, j, level);
        } else if (p == 1) {
          c.test = partial_univariate_chi2_test(pr.fit, nulls(j), k);
          const Law chi = Chi2{static_cast<double>(k)};
          const double a = dist_quantile(chi, 0.5 * cfg.alpha) * pr.fit.beta(0) / (k - 2);
          const double b = dist_quantile(chi, 1.0 - 0.5 * cfg.alpha) * pr.fit.beta(0) / (k - 2);
          c.ci = ConfidenceInterval{0, std::min(a, b), std::max(a, b), level};
          if (nulls(j) == 0.0) c.note = "a zero null sits outside the support of the chi-square pivot; use the interval";
        } else if (nulls(j) != 0.0) {
          c.flag = "unsupported_null";
          c.note = "the partial-sketch pivot tests a zero null only";
        } else {
          PartialTestOptions opt;
          opt.regime = target == Target::BetaF ? Regime::RepeatedSketch : Regime::RepeatedSample;
          c.test = partial_marginal_t_test(pr.fit, pr.sk, j, opt);
          c.note = "no interval: the partial-sketch pivot is defined for a zero null only";
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NegativeDenominator)
          c.flag = "negative_denominator";
        else if (e.code() == ErrorCode::AssumptionViolated)
          c.flag = "assumption_violated";
        else
          throw;
        c.note = e.what();
      }
      rep.coefficients.push_back(std::move(c));
    }
    if (cfg.mode == "complete") {
      rep.joint = complete_joint_f_test(pr.fit, pr.sk, nulls);
    } else if (cfg.mode == "efficient") {
      rep.joint = wstar_exact_tests(pr.fit, pr.sk, pr.data.y().squaredNorm(), nulls, std::nullopt,
                                    WStarResidual::Sketched)
                      .f;
    }

    if (cfg.format == "json") {
      emit(cfg, to_json(rep).dump(2) + "\n", out);
    } else {
      std::ostringstream os;
      os << "name,estimate,null,statistic,pivot_law,p_value,ci_lower,ci_upper,level,flag\n";
      for (const auto& c : rep.coefficients) {
        os << c.name << ',' << num(c.estimate) << ',' << num(c.null_value) << ',';
        if (c.test)
          os << num(c.test->statistic) << ',' << c.test->pivot_name << ',' << num(c.test->p_value) << ',';
        else
          os << ",,,";
        if (c.ci)
          os << num(c.ci->lower) << ',' << num(c.ci->upper) << ',' << num(c.ci->level) << ',';
        else
          os << ",," << num(level) << ',';
        os << c.flag << '\n';
      }
      emit(cfg, os.str(), out);
    }
    return 0;
  });
}

int cmd_simulate(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<Regime> regimes{Regime::RepeatedSketch, Regime::RepeatedSample};
    json file_cfg = json::object();
    if (!cfg.config_path.empty()) {
      std::ifstream in(cfg.config_path);
      require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open config file '" + cfg.config_path + "'");
      try {
        in >> file_cfg;
      } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, cfg.config_path + ": " + e.what());
      }
      require(file_cfg.is_object(), ErrorCode::ParseError, "config must be a JSON object");
      if (file_cfg.contains("regimes")) {
        regimes.clear();
        for (const auto& r : file_cfg["regimes"]) regimes.push_back(parse_regime(r.get<std::string>()));
      } else if (file_cfg.contains("regime")) {
        regimes = {parse_regime(file_cfg["regime"].get<std::string>())};
      }
    }
    if (!cfg.regime.empty() && cfg.regime != "both") regimes = {parse_regime(cfg.regime)};
    // --preset wins over a preset named in the config file
    std::string preset_name = cfg.preset;
    if (preset_name.empty() && file_cfg.contains("preset")) {
      require(file_cfg["preset"].is_string(), ErrorCode::ParseError, "config preset must be a string");
      preset_name = file_cfg["preset"].get<std::string>();
    }
    if (preset_name.empty()) preset_name = "desk";
    auto preset = [&](Regime r) {
      if (preset_name == "paper") return SimConfig::paper(r);
      if (preset_name == "smoke") return SimConfig::smoke(r);
      require(preset_name == "desk", ErrorCode::ParseError,
              "unknown preset '" + preset_name + "' (valid: desk, paper, smoke)");
      return SimConfig::desk(r);
    };
    preset(Regime::RepeatedSketch);  // validates the preset name
    require(!regimes.empty(), ErrorCode::ParseError, "no regimes selected");

    const std::string dir = cfg.output_path.empty() ? "sim_out" : cfg.output_path;
    std::filesystem::create_directories(dir);
    for (Regime r : regimes) {
      json sub = file_cfg;
      sub.erase("regimes");
      sub.erase("preset");
      sub["regime"] = std::string(to_string(r));
      SimConfig sc = sim_config_from_json(sub, preset(r));
      if (cfg.replicates) sc.m = *cfg.replicates;
      if (cfg.threads) sc.threads = *cfg.threads;
      if (cfg.seed_given) sc.root_seed = cfg.seed;
      sc.validate();
      const SimReport rep = run_simulation(sc);
      const std::string stem = std::string(to_string(r));
      std::ofstream js(std::filesystem::path(dir) / (stem + ".json"), std::ios::binary);
      require(static_cast<bool>(js), ErrorCode::ParseError, "cannot write into " + dir);
      js << to_json(rep).dump(1) << '\n';
      write_table_csvs(rep, dir, stem + "__");
      out << "== " << stem << " (n=" << sc.n << ", p=" << sc.p << ", k=" << sc.k << ", m=" << sc.m << ")\n"
          << summary_table(rep);
    }
    return 0;
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Sketched least-squares regression with exact and approximate inference"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::optional<std::uint64_t> seed;

  auto add_data_opts = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input_path, "CSV file with a header row")->required();
    sub->add_option("--response", cfg.response, "response column name or 0-based index");
    sub->add_flag("--intercept", cfg.intercept, "prepend a column of ones");
    sub->add_option("--sketch", cfg.sketch, "gaussian | hadamard | clarkson_woodruff");
    sub->add_option("--k", cfg.k, "sketch size")->required();
    sub->add_option("--mode", cfg.mode, "complete | partial | efficient");
    sub->add_option("--alpha", cfg.alpha, "test level; intervals have level 1 - alpha");
    sub->add_option("--seed", seed, "sketch seed");
    sub->add_option("--output", cfg.output_path, "report file (default: standard output)");
    sub->add_option("--format", cfg.format, "json | csv");
    sub->add_flag("--no-wstar", cfg.no_wstar, "do not retain W* = SS^T");
  };
  CLI::App* fit = app.add_subcommand("fit", "fit a sketched regression");
  add_data_opts(fit);
  CLI::App* infer = app.add_subcommand("infer", "fit and test each coefficient");
  add_data_opts(infer);
  infer->add_option("--null", cfg.nulls, "null values, one per coefficient (default 0)");
  infer->add_option("--target", cfg.target, "beta_F (repeated sketching) | beta_0 (repeated sampling)");
  CLI::App* sim = app.add_subcommand("simulate", "run the Monte Carlo study");
  sim->add_option("--config", cfg.config_path, "JSON simulation config");
  sim->add_option("--preset", cfg.preset, "desk | paper | smoke");
  sim->add_option("--regime", cfg.regime, "repeated_sketch | repeated_sample | both");
  sim->add_option("--m", cfg.replicates, "replicates (overrides config)");
  sim->add_option("--threads", cfg.threads, "worker threads");
  sim->add_option("--seed", seed, "root seed (overrides config)");
  sim->add_option("--output", cfg.output_path, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (seed) {
    cfg.seed = *seed;
    cfg.seed_given = true;
  }
  if (fit->parsed()) return cmd_fit(cfg, std::cout, std::cerr);
  if (infer->parsed()) return cmd_infer(cfg, std::cout, std::cerr);
  return cmd_simulate(cfg, std::cout, std::cerr);
}

}  // namespace sketch_infer
