#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketch_infer/distributions.hpp"
#include "sketch_infer/error.hpp"
#include "sketch_infer/ks.hpp"
#include "sketch_infer/report.hpp"
#include "sketch_infer/rng.hpp"
#include "sketch_infer/sim_study.hpp"

using namespace sketch_infer;

namespace {

SimConfig small(Regime regime) {
  SimConfig c = SimConfig::desk(regime);
  c.n = 300;
  c.m = 300;
  c.reference_draws = 2000;
  c.overlay_points = 64;
  return c;
}

}  // namespace

TEST_CASE("presets") {
  const SimConfig p = SimConfig::paper(Regime::RepeatedSketch);
  CHECK(p.n == 10000);
  CHECK(p.p == 11);
  CHECK(p.k == 21);
  CHECK(p.m == 10000);
  const Eigen::VectorXd b = p.resolved_beta0();
  REQUIRE(b.size() == 11);
  CHECK(b(0) == -5.0);
  CHECK(b(5) == 0.0);
  CHECK(b(10) == 5.0);
  CHECK(SimConfig::desk(Regime::RepeatedSample).n == 2000);
  CHECK(SimConfig::smoke(Regime::RepeatedSample).m == 10);
  SimConfig bad = p;
  bad.k = 11;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.targets = {11};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("design matrix") {
  const Eigen::MatrixXd X = simulate_design(50, 4, 3);
  CHECK(X.col(0) == Eigen::VectorXd::Ones(50));
  CHECK(X == simulate_design(50, 4, 3));
  CHECK(X != simulate_design(50, 4, 4));
}

TEST_CASE("runs are reproducible and independent of thread count") {
  for (Regime regime : {Regime::RepeatedSketch, Regime::RepeatedSample}) {
    SimConfig c = small(regime);
    c.m = 60;
    c.threads = 1;
    const SimReport a = run_simulation(c);
    c.threads = 3;
    const SimReport b = run_simulation(c);
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i) {
      CAPTURE(a.tables[i].name);
      CHECK(a.tables[i].values == b.tables[i].values);
      CHECK(a.tables[i].errored == b.tables[i].errored);
    }
    CHECK(to_json(a) == to_json(b));
  }
}

TEST_CASE("table bookkeeping") {
  const SimConfig c = small(Regime::RepeatedSketch);
  const SimReport r = run_simulation(c);
  CHECK(r.beta_F.size() == c.p);
  CHECK(r.moments.size() == 3);
  for (const ResultTable& t : r.tables) {
    CAPTURE(t.name);
    CHECK(static_cast<long>(t.values.size()) + t.errored == c.m);
    CHECK(t.negative_denominator <= t.errored);
    long total = 0;
    for (long n : t.histogram.counts) total += n;
    CHECK(total == static_cast<long>(t.values.size()));
    CHECK(t.histogram.edges.size() == t.histogram.counts.size() + 1);
    if (!t.theory.empty()) {
      CHECK(t.ks_statistic.has_value());
      CHECK(t.overlay_x.size() == 64);
    }
  }
  const ResultTable& t = r.table("gaussian/complete/b6/pivot");
  REQUIRE(t.ks_statistic.has_value());
  CHECK(*t.ks_statistic < 0.1);
  CHECK(r.table("gaussian/complete/b1/pivot").coverage.has_value());
  CHECK_FALSE(r.table("gaussian/complete/b1/estimate").coverage.has_value());
  CHECK(r.table("hadamard/complete/b1/test_zero").rejection_rate.has_value());
  CHECK_THROWS_AS(r.table("gaussian/complete/b99/pivot"), Error);
}

TEST_CASE("single replicate has no KS statistic") {
  SimConfig c = small(Regime::RepeatedSketch);
  c.m = 1;
  const SimReport r = run_simulation(c);
  for (const ResultTable& t : r.tables) {
    CAPTURE(t.name);
    CHECK_FALSE(t.ks_statistic.has_value());
  }
}

TEST_CASE("KS distance") {
  const std::function<double(double)> normal = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  CHECK(ks_statistic(std::vector<double>(1000, 0.0), normal).statistic == doctest::Approx(0.5));
  std::vector<double> v;
  Engine eng = make_engine(9);
  for (int i = 0; i < 500; ++i) v.push_back(draw_normal(eng));
  const double d = ks_statistic(v, normal).statistic;
  std::shuffle(v.begin(), v.end(), eng);
  CHECK(ks_statistic(v, normal).statistic == d);
  // brute-force distance over the sorted sample
  std::sort(v.begin(), v.end());
  double brute = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal(v[i]);
    brute = std::max({brute, (i + 1.0) / v.size() - f, f - double(i) / v.size()});
  }
  CHECK(d == doctest::Approx(brute).epsilon(1e-14));
  CHECK_THROWS_AS(ks_statistic({}, normal), Error);
  CHECK(kolmogorov_sf(1.3580986393225505) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("histograms") {
  std::vector<double> v;
  Engine eng = make_engine(10);
  for (int i = 0; i < 5000; ++i) v.push_back(draw_normal(eng));
  const Histogram h = make_histogram(v, 200);
  long total = 0;
  for (long c : h.counts) total += c;
  CHECK(total == 5000);
  CHECK(h.counts.size() <= 200);
  CHECK(h.edges.front() <= *std::min_element(v.begin(), v.end()));
  CHECK(h.edges.back() >= *std::max_element(v.begin(), v.end()));
  CHECK(make_histogram(v, 10).counts.size() <= 10);
  CHECK(make_histogram(v, 200, 17).counts.size() == 17);
  const Histogram flat = make_histogram(std::vector<double>(10, 2.0), 200);
  long ft = 0;
  for (long c : flat.counts) ft += c;
  CHECK(ft == 10);
}

TEST_CASE("config JSON") {
  SimConfig c = small(Regime::RepeatedSample);
  c.targets = {0, 3, 5};
  c.sketch_kinds = {SketchKind::Hadamard};
  c.bins = 40;
  const SimConfig back = sim_config_from_json(to_json(c), SimConfig::paper(Regime::RepeatedSketch));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.regime == Regime::RepeatedSample);
  CHECK(back.targets == c.targets);

  const SimConfig partial = sim_config_from_json(nlohmann::json{{"m", 7}}, c);
  CHECK(partial.m == 7);
  CHECK(partial.n == c.n);
  try {
    sim_config_from_json(nlohmann::json{{"replicates", 7}}, c);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("replicates") != std::string::npos);
  }
  CHECK_THROWS_AS(sim_config_from_json(nlohmann::json{{"n", "many"}}, c), Error);
}

TEST_CASE("report output") {
  SimConfig c = small(Regime::RepeatedSketch);
  c.m = 40;
  c.sketch_kinds = {SketchKind::Gaussian};
  const SimReport r = run_simulation(c);
  const nlohmann::json j = to_json(r);
  CHECK(j["schema"] == kSchema);
  CHECK(j["tables"].size() == r.tables.size());
  const auto dir = std::filesystem::temp_directory_path() / "sketch_infer_sim_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::vector<std::string> files = write_table_csvs(r, dir.string(), "x__");
  CHECK(files.size() == r.tables.size());
  for (const std::string& f : files) {
    std::ifstream in(dir / f);
    std::string header;
    std::getline(in, header);
    CHECK(header == "bin_left,bin_right,count,theory_x,theory_pdf");
  }
  CHECK(summary_table(r).find("gaussian/complete/b1/pivot") != std::string::npos);
  std::filesystem::remove_all(dir);
}
