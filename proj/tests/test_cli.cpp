#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "sketch_infer/core_model.hpp"
#include "sketch_infer/report.hpp"
#include "sketch_infer/rng.hpp"
#include "sketch_infer/distributions.hpp"

using namespace sketch_infer;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

// stdout only; stderr is folded in when wanted
Run run(const std::string& args, bool with_stderr = false) {
  const std::string cmd = std::string(CLI_BINARY) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / "sketch_infer_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write("data.csv", 3, 200, 1);
    write("one.csv", 1, 200, 2);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& f) const { return (dir / f).string(); }

  void write(const std::string& name, int p, int n, std::uint64_t seed) const {
    Engine eng = make_engine(seed);
    std::ofstream out(dir / name);
    out.precision(17);
    out << "y";
    for (int j = 0; j < p; ++j) out << ",x" << j;
    out << ",group\n";
    for (int i = 0; i < n; ++i) {
      double x[3], y = draw_normal(eng);
      for (int j = 0; j < p; ++j) {
        x[j] = draw_normal(eng) + 1.0;
        y += (j + 1) * x[j];
      }
      out << y;
      for (int j = 0; j < p; ++j) out << "," << x[j];
      out << ",g" << i % 3 << "\n";
    }
  }
};

}  // namespace

TEST_CASE("exit codes") {
  const Workspace w;
  const std::string in = " --input " + w.path("data.csv");
  CHECK(run("fit" + in + " --k 20").code == 0);
  CHECK(run("fit" + in + " --k 3").code == 3);
  CHECK(run("fit" + in + " --k 20 --mode efficient --no-wstar").code == 4);
  CHECK(run("infer" + in + " --k 20 --mode efficient --no-wstar").code == 4);
  CHECK(run("fit --input " + w.path("missing.csv") + " --k 20").code == 2);
  CHECK(run("fit" + in).code == 2);
  CHECK(run("fit" + in + " --k 20 --mode fancy").code == 2);
  CHECK(run("infer" + in + " --k 20 --alpha 1.5").code == 2);
  CHECK(run("simulate --preset bogus --output " + w.path("o")).code == 2);

  const Run bad = run("fit" + in + " --k 20 --sketch fourier", true);
  CHECK(bad.code == 2);
  for (const char* name : {"gaussian", "hadamard", "clarkson_woodruff"}) CHECK(bad.out.find(name) != std::string::npos);
}

TEST_CASE("fit output") {
  const Workspace w;
  const std::string args = "fit --input " + w.path("data.csv") + " --k 25 --seed 11";
  for (const char* sketch : {"gaussian", "hadamard", "clarkson_woodruff"}) {
    CAPTURE(sketch);
    const Run a = run(args + " --sketch " + sketch), b = run(args + " --sketch " + sketch);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != run(args + " --sketch " + std::string(sketch) + " --seed 12").out);
    const nlohmann::json j = nlohmann::json::parse(a.out);
    CHECK(j["schema"] == kSchema);
    const FitReport r = fit_report_from_json(j);
    CHECK(r.sketch == sketch);
    CHECK(r.k == 25);
    CHECK(r.seed == 11);
    CHECK(r.n == 200);
    CHECK(r.p == 3);
    CHECK(r.coefficient_names == std::vector<std::string>{"x0", "x1", "x2"});
    CHECK(fit_report_from_json(to_json(r)) == r);
  }
  // the text column is ignored, the response can be named
  const Run named = run("fit --input " + w.path("data.csv") + " --response y --k 25 --seed 11");
  CHECK(named.out == run(args).out);
  const Run icpt = run(args + " --intercept");
  CHECK(fit_report_from_json(nlohmann::json::parse(icpt.out)).p == 4);

  const Run csv = run(args + " --format csv");
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("name,estimate\n", 0) == 0);

  const std::string file = w.path("fit.json");
  CHECK(run(args + " --output " + file).out.empty());
  std::ifstream in(file);
  CHECK(fit_report_from_json(nlohmann::json::parse(in)) == fit_report_from_json(nlohmann::json::parse(run(args).out)));
}

TEST_CASE("infer output") {
  const Workspace w;
  const std::string in = " --input " + w.path("data.csv") + " --k 25 --seed 5";

  const nlohmann::json c = nlohmann::json::parse(run("infer" + in).out);
  CHECK(c["alpha"] == 0.05);
  REQUIRE(c["coefficients"].size() == 3);
  for (const auto& e : c["coefficients"]) {
    CHECK(e["ci"]["level"] == doctest::Approx(0.95));
    CHECK(e["test"]["pivot_law"]["name"] == "t(22)");
    CHECK(e["ci"]["lower"].get<double>() < e["estimate"].get<double>());
  }
  CHECK(c["joint_test"]["pivot_law"]["name"] == "F(3,22)");

  const nlohmann::json lv = nlohmann::json::parse(run("infer" + in + " --alpha 0.1").out);
  CHECK(lv["coefficients"][0]["ci"]["level"] == doctest::Approx(0.9));

  const nlohmann::json nulls = nlohmann::json::parse(run("infer" + in + " --null 1 --null 2 --null 3").out);
  CHECK(nulls["coefficients"][2]["null_value"] == 3.0);
  CHECK(run("infer" + in + " --null 1").code == 2);

  const nlohmann::json e = nlohmann::json::parse(run("infer" + in + " --mode efficient").out);
  CHECK(e["coefficients"][0]["test"]["method"] == "wstar_exact");
  CHECK(e["joint_test"]["pivot_law"]["name"] == "F(3,22)");

  const nlohmann::json part = nlohmann::json::parse(run("infer" + in + " --mode partial").out);
  for (const auto& co : part["coefficients"]) {
    const bool tested = !co["test"].is_null();
    const bool flagged = co.contains("flag") && !co["flag"].get<std::string>().empty();
    CHECK((tested || flagged));
    if (tested) CHECK(co["test"]["pivot_law"]["name"] == "t(23)");
  }

  const nlohmann::json one =
      nlohmann::json::parse(run("infer --input " + w.path("one.csv") + " --k 12 --mode partial --null 1").out);
  const auto& t = one["coefficients"][0]["test"];
  CHECK(t["method"] == "partial_chi2_univariate");
  CHECK(t["pivot_law"]["name"] == "chi2(12)");
  CHECK(t["statistic"].get<double>() > 0.0);
}

TEST_CASE("simulate") {
  const Workspace w;
  const fs::path out = w.dir / "sim";
  const auto t0 = std::chrono::steady_clock::now();
  const Run r = run("simulate --preset smoke --output " + out.string() + " --threads 1");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(r.code == 0);
  CHECK(secs < 5.0);
  CHECK(r.out.find("== repeated_sketch") != std::string::npos);
  CHECK(r.out.find("== repeated_sample") != std::string::npos);

  std::set<std::string> top;
  for (const auto& e : fs::directory_iterator(w.dir)) top.insert(e.path().filename().string());
  CHECK(top == std::set<std::string>{"data.csv", "one.csv", "sim"});
  std::ifstream js(out / "repeated_sketch.json");
  const nlohmann::json j = nlohmann::json::parse(js);
  CHECK(j["schema"] == kSchema);
  CHECK(j["metadata"]["m"] == 10);
  CHECK(fs::exists(out / "repeated_sketch__gaussian_complete_b1_pivot.csv"));

  const fs::path out2 = w.dir / "sim2";
  run("simulate --preset smoke --output " + out2.string() + " --threads 2");
  std::ifstream a(out / "repeated_sample.json"), b(out2 / "repeated_sample.json");
  CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));

  {
    std::ofstream cfg(w.dir / "cfg.json");
    cfg << R"({"regime": "repeated_sample", "n": 300, "m": 5, "sketch_kinds": ["hadamard"]})";
  }
  const fs::path out3 = w.dir / "sim3";
  REQUIRE(run("simulate --config " + w.path("cfg.json") + " --output " + out3.string()).code == 0);
  CHECK(fs::exists(out3 / "repeated_sample.json"));
  CHECK_FALSE(fs::exists(out3 / "repeated_sketch.json"));
  {
    std::ofstream cfg(w.dir / "smoke.json");
    cfg << R"({"preset": "smoke", "regime": "repeated_sketch", "sketch_kinds": ["gaussian"]})";
  }
  const fs::path out4 = w.dir / "sim4";
  REQUIRE(run("simulate --config " + w.path("smoke.json") + " --output " + out4.string()).code == 0);
  std::ifstream s4(out4 / "repeated_sketch.json");
  CHECK(nlohmann::json::parse(s4)["metadata"]["m"] == 10);
  {
    std::ofstream cfg(w.dir / "bad.json");
    cfg << R"({"replicates": 5})";
  }
  CHECK(run("simulate --config " + w.path("bad.json") + " --output " + out3.string()).code == 2);
}
