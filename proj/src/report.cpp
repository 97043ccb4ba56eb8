#include "sketch_infer/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "sketch_infer/error.hpp"

namespace sketch_infer {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json law_json(const Law& law) {
  json j;
  j["name"] = describe(law);
  std::visit(
      [&j](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Chi2>) {
          j["family"] = "chi2";
          j["df"] = d.df;
        } else if constexpr (std::is_same_v<D, StudentT>) {
          j["family"] = "t";
          j["df"] = d.df;
        } else if constexpr (std::is_same_v<D, FisherF>) {
          j["family"] = "F";
          j["df"] = {d.d1, d.d2};
        } else if constexpr (std::is_same_v<D, BetaLaw>) {
          j["family"] = "beta";
          j["shape"] = {d.a, d.b};
        } else if constexpr (std::is_same_v<D, GammaLaw>) {
          j["family"] = "gamma";
          j["shape"] = d.shape;
          j["scale"] = d.scale;
        } else {
          j["family"] = "inverse_gamma";
          j["shape"] = d.shape;
          j["scale"] = d.scale;
        }
      },
      law);
  return j;
}

std::string fmt(std::optional<double> v, int prec = 4) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << *v;
  return os.str();
}

}  // namespace

FitReport make_fit_report(const SketchFit& fit, const SketchSpec& spec, bool w_star_retained,
                          std::vector<std::string> names) {
  FitReport r;
  r.mode = std::string(to_string(fit.kind));
  r.sketch = std::string(to_string(spec.kind));
  r.k = fit.k;
  r.seed = spec.seed;
  r.n = fit.n;
  r.p = fit.p;
  r.coefficient_names = std::move(names);
  r.estimates.assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
  r.SSR_s = fit.SSR_s;
  r.SSM_p = fit.SSM_p;
  r.gamma = fit.gamma;
  r.w_star_retained = w_star_retained;
  return r;
}

json to_json(const FitReport& r) {
  json j;
  j["schema"] = kSchema;
  j["mode"] = r.mode;
  j["sketch"] = {{"kind", r.sketch}, {"k", r.k}, {"seed", r.seed}, {"w_star_retained", r.w_star_retained}};
  j["n"] = r.n;
  j["p"] = r.p;
  json coefs = json::array();
  for (std::size_t i = 0; i < r.estimates.size(); ++i)
    coefs.push_back({{"name", r.coefficient_names.at(i)}, {"estimate", r.estimates[i]}});
  j["coefficients"] = coefs;
  j["SSR_s"] = opt(r.SSR_s);
  j["SSM_p"] = opt(r.SSM_p);
  j["gamma"] = opt(r.gamma);
  return j;
}

FitReport fit_report_from_json(const json& j) {
  try {
    require(j.at("schema").get<std::string>() == kSchema, ErrorCode::ParseError, "unsupported report schema");
    FitReport r;
    r.mode = j.at("mode").get<std::string>();
    const json& s = j.at("sketch");
    r.sketch = s.at("kind").get<std::string>();
    r.k = s.at("k").get<int>();
    r.seed = s.at("seed").get<std::uint64_t>();
    r.w_star_retained = s.at("w_star_retained").get<bool>();
    r.n = j.at("n").get<int>();
    r.p = j.at("p").get<int>();
    for (const json& c : j.at("coefficients")) {
      r.coefficient_names.push_back(c.at("name").get<std::string>());
      r.estimates.push_back(c.at("estimate").get<double>());
    }
    r.SSR_s = get_opt<double>(j, "SSR_s");
    r.SSM_p = get_opt<double>(j, "SSM_p");
    r.gamma = get_opt<double>(j, "gamma");
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed fit report: ") + e.what());
  }
}

json to_json(const TestResult& t) {
  json j;
  j["statistic"] = t.statistic;
  j["pivot_law"] = t.pivot_law ? law_json(*t.pivot_law) : json{{"name", t.pivot_name}};
  j["p_value"] = t.p_value;
  j["target"] = std::string(to_string(t.target));
  j["regime"] = std::string(to_string(t.regime));
  j["method"] = std::string(to_string(t.method));
  j["approximate"] = t.approximate;
  return j;
}

json to_json(const InferenceReport& r) {
  json j = to_json(r.fit);
  j["alpha"] = r.alpha;
  j["target"] = std::string(to_string(r.target));
  json coefs = json::array();
  for (const auto& c : r.coefficients) {
    json e{{"name", c.name}, {"index", c.index}, {"estimate", c.estimate}, {"null_value", c.null_value}};
    e["test"] = c.test ? to_json(*c.test) : json(nullptr);
    e["ci"] = c.ci ? json{{"lower", c.ci->lower}, {"upper", c.ci->upper}, {"level", c.ci->level}} : json(nullptr);
    if (!c.flag.empty()) e["flag"] = c.flag;
    if (!c.note.empty()) e["note"] = c.note;
    coefs.push_back(e);
  }
  j["coefficients"] = coefs;
  j["joint_test"] = r.joint ? to_json(*r.joint) : json(nullptr);
  return j;
}

json to_json(const SimConfig& c) {
  json kinds = json::array();
  for (SketchKind k : c.sketch_kinds) kinds.push_back(std::string(to_string(k)));
  const Eigen::VectorXd b = c.resolved_beta0();
  return json{{"n", c.n},
              {"p", c.p},
              {"k", c.k},
              {"m", c.m},
              {"beta0", std::vector<double>(b.data(), b.data() + b.size())},
              {"sigma2", c.sigma2},
              {"sketch_kinds", kinds},
              {"regime", std::string(to_string(c.regime))},
              {"targets", c.targets},
              {"root_seed", c.root_seed},
              {"alpha", c.alpha},
              {"include_partial", c.include_partial},
              {"bins", opt(c.bins)},
              {"max_bins", c.max_bins},
              {"overlay_points", c.overlay_points},
              {"reference_draws", c.reference_draws},
              {"design", "intercept + iid N(0,1) columns"}};
}

SimConfig sim_config_from_json(const json& j, const SimConfig& base) {
  require(j.is_object(), ErrorCode::ParseError, "simulation config must be a JSON object");
  static const std::set<std::string> known{"n",       "p",        "k",         "m",
                                           "beta0",   "sigma2",   "sketch_kinds", "regime",
                                           "regimes", "targets",  "root_seed", "alpha",
                                           "include_partial", "bins", "max_bins", "overlay_points",
                                           "reference_draws", "threads", "preset", "design"};
  for (const auto& [key, value] : j.items())
    require(known.count(key) > 0, ErrorCode::ParseError, "unknown config key '" + key + "'");
  SimConfig c = base;
  try {
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("p")) c.p = j["p"].get<int>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("m")) c.m = j["m"].get<int>();
    if (j.contains("beta0")) {
      const auto v = j["beta0"].get<std::vector<double>>();
      c.beta0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("sigma2")) c.sigma2 = j["sigma2"].get<double>();
    if (j.contains("sketch_kinds")) {
      c.sketch_kinds.clear();
      for (const auto& s : j["sketch_kinds"]) c.sketch_kinds.push_back(parse_sketch_kind(s.get<std::string>()));
    }
    if (j.contains("regime")) c.regime = parse_regime(j["regime"].get<std::string>());
    if (j.contains("targets")) c.targets = j["targets"].get<std::vector<int>>();
    if (j.contains("root_seed")) c.root_seed = j["root_seed"].get<std::uint64_t>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("include_partial")) c.include_partial = j["include_partial"].get<bool>();
    if (j.contains("bins")) c.bins = j["bins"].is_null() ? std::nullopt : std::optional<int>(j["bins"].get<int>());
    if (j.contains("max_bins")) c.max_bins = j["max_bins"].get<int>();
    if (j.contains("overlay_points")) c.overlay_points = j["overlay_points"].get<int>();
    if (j.contains("reference_draws")) c.reference_draws = j["reference_draws"].get<int>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("bad config value: ") + e.what());
  }
  return c;
}

json to_json(const SimReport& r) {
  json meta = to_json(r.config);
  if (r.beta_F.size() > 0) {
    meta["beta_F"] = std::vector<double>(r.beta_F.data(), r.beta_F.data() + r.beta_F.size());
    meta["SSR_F"] = r.SSR_F;
    meta["SSM_F"] = r.SSM_F;
  }
  json tables = json::array();
  for (const auto& t : r.tables) {
    tables.push_back({{"name", t.name},
                      {"sketch", std::string(to_string(t.sketch))},
                      {"estimator", std::string(to_string(t.estimator))},
                      {"target", t.target},
                      {"quantity", t.quantity},
                      {"hypothesis", t.hypothesis},
                      {"theory", t.theory.empty() ? json(nullptr) : json(t.theory)},
                      {"replicates_used", t.values.size()},
                      {"errored", t.errored},
                      {"negative_denominator", t.negative_denominator},
                      {"negative_denominator_rate", t.negative_denominator_rate},
                      {"ks_statistic", opt(t.ks_statistic)},
                      {"ks_p", opt(t.ks_p)},
                      {"coverage", opt(t.coverage)},
                      {"rejection_rate", opt(t.rejection_rate)},
                      {"histogram", {{"edges", t.histogram.edges}, {"counts", t.histogram.counts}}},
                      {"overlay", {{"x", t.overlay_x}, {"pdf", t.overlay_pdf}}}});
  }
  json moments = json::array();
  for (const auto& m : r.moments)
    moments.push_back({{"sketch", std::string(to_string(m.sketch))},
                       {"count", m.count},
                       {"ssr_s_mean", m.ssr_mean},
                       {"ssr_s_se", m.ssr_se},
                       {"ssr_s_expected", m.ssr_expected},
                       {"sigma2_hat_mean", m.sigma2_hat_mean},
                       {"sigma2_hat_se", m.sigma2_hat_se}});
  return json{{"schema", kSchema}, {"metadata", meta}, {"tables", tables}, {"moments", moments}};
}

std::vector<std::string> write_table_csvs(const SimReport& r, const std::string& dir, const std::string& prefix) {
  std::vector<std::string> written;
  for (const auto& t : r.tables) {
    std::string file = prefix + t.name;
    std::replace(file.begin(), file.end(), '/', '_');
    file += ".csv";
    const std::filesystem::path path = std::filesystem::path(dir) / file;
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::ParseError, "cannot write " + path.string());
    out << "bin_left,bin_right,count,theory_x,theory_pdf\n";
    const std::size_t bins = t.histogram.counts.size();
    const std::size_t rows = std::max(bins, t.overlay_x.size());
    char buf[64];
    for (std::size_t i = 0; i < rows; ++i) {
      if (i < bins) {
        std::snprintf(buf, sizeof buf, "%.17g", t.histogram.edges[i]);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", t.histogram.edges[i + 1]);
        out << buf << ',' << t.histogram.counts[i];
      } else {
        out << ",,";
      }
      out << ',';
      if (i < t.overlay_x.size()) {
        std::snprintf(buf, sizeof buf, "%.17g", t.overlay_x[i]);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", t.overlay_pdf[i]);
        out << buf;
      } else {
        out << ',';
      }
      out << '\n';
    }
    written.push_back(file);
  }
  return written;
}

std::string summary_table(const SimReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(46) << "table" << std::right << std::setw(8) << "used" << std::setw(8) << "err"
     << std::setw(9) << "KS" << std::setw(10) << "coverage" << std::setw(8) << "reject" << std::setw(8) << "negden"
     << '\n';
  for (const auto& t : r.tables) {
    os << std::left << std::setw(46) << t.name << std::right << std::setw(8) << t.values.size() << std::setw(8)
       << t.errored << std::setw(9) << fmt(t.ks_statistic) << std::setw(10) << fmt(t.coverage) << std::setw(8)
       << fmt(t.rejection_rate, 3) << std::setw(8) << fmt(t.negative_denominator_rate, 3) << '\n';
  }
  for (const auto& m : r.moments) {
    os << to_string(m.sketch) << ": mean SSR_s " << fmt(m.ssr_mean) << " (se " << fmt(m.ssr_se) << ", expected "
       << fmt(m.ssr_expected) << "), mean sigma2_hat " << fmt(m.sigma2_hat_mean) << " (se " << fmt(m.sigma2_hat_se)
       << ")\n";
  }
  return os.str();
}

}  // namespace sketch_infer
