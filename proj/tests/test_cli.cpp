#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "volseg/garch.hpp"
#include "volseg/rng.hpp"
#include "volseg/types.hpp"

#include "support/schema_check.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "volseg_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  static int counter = 0;
  fs::path out = work_dir() / ("stdout_" + std::to_string(counter) + ".txt");
  fs::path err = work_dir() / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string(VOLSEG_CLI_PATH) + " " + args + " > " + out.string() +
                    " 2> " + err.string();
  int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

fs::path write_file(const std::string& name, const std::string& content) {
  fs::path p = work_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p;
}

// Price file whose returns follow a stationary GARCH path (iid gaussian when
// alpha = beta = 0).
fs::path garch_prices(const std::string& name, volseg::Index n, std::uint64_t seed,
                      double alpha = 0.6, double beta = 0.2) {
  volseg::GarchParams p;
  p.omega = 0.2e-4 / (1.0 - alpha - beta);
  p.alpha = alpha;
  p.beta = beta;
  volseg::Segmentation seg;
  seg.n = n;
  volseg::Vector r = volseg::simulate_garch({{p}, volseg::RegimeSharing::AllFree}, seg,
                                            volseg::Distribution::Gaussian, seed);
  std::ostringstream csv;
  csv << "date,close\n";
  double level = 100.0;
  char buf[64];
  long day = 0;
  auto emit = [&] {
    std::snprintf(buf, sizeof(buf), "%09ld", day);  // lexically sorted labels
    csv << "d" << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", level);
    csv << buf << '\n';
    ++day;
  };
  emit();
  for (volseg::Index t = 0; t < n; ++t) {
    level *= std::exp(r[t]);
    emit();
  }
  return write_file(name, csv.str());
}

bool conforms(const std::string& schema_name, const json& value) {
  std::string error;
  bool ok = schema_check::validate(schema_check::load_schema(schema_name), value, error);
  if (!ok) MESSAGE(error);
  return ok;
}

const std::string kDesignSpec = R"({
  "segments": [
    {"length": 200, "variance": 3.0},
    {"length": 200, "variance": 12.0},
    {"length": 200, "variance": 3.0}
  ],
  "nu": 3.0,
  "seed": 11
})";

}  // namespace

TEST_CASE("summarize produces the full key set") {
  fs::path prices = garch_prices("long.csv", 800, 1);
  RunResult res = run("summarize --input " + prices.string());
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(conforms("summary_stats.schema.json", j));
  CHECK(!j.contains("errors"));
  CHECK(j["n_returns"] == 800);
  CHECK(j["std_dev"].get<double>() > 0.0);
}

TEST_CASE("summarize flags degenerate statistics but still succeeds") {
  fs::path prices = write_file("two_rows.csv", "date,close\n2020-01-01,100\n2020-01-02,110\n");
  RunResult res = run("summarize --input " + prices.string());
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(conforms("summary_stats.schema.json", j));
  CHECK(j["n_returns"] == 1);
  CHECK(j["mean"].is_number());
  CHECK(j["std_dev"].is_null());
  CHECK(j["ljung_box_p"].is_null());
  REQUIRE(j.contains("errors"));
  CHECK(j["errors"].size() >= 4);
}

TEST_CASE("summarize on a missing file exits 2 and names the path") {
  RunResult res = run("summarize --input /no/such/file.csv");
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("/no/such/file.csv") != std::string::npos);
}

TEST_CASE("detect finds the planted change points") {
  fs::path spec = write_file("design.json", kDesignSpec);
  fs::path prices = work_dir() / "design_prices.csv";
  RunResult gen = run("simulate --spec " + spec.string() + " --emit-prices " + prices.string());
  REQUIRE(gen.exit_code == 0);

  fs::path out = work_dir() / "detect.json";
  fs::path plot = work_dir() / "plot.csv";
  RunResult res = run("detect --input " + prices.string() + " --detector npcpm --output " +
                      out.string() + " --plot-data " + plot.string());
  REQUIRE(res.exit_code == 0);
  json j = json::parse(slurp(out));
  CHECK(conforms("detect_result.schema.json", j));
  CHECK(j["detector"] == "npcpm");
  CHECK(j["n"] == 600);
  REQUIRE(j.contains("change_dates"));
  CHECK(j["change_dates"].size() == j["change_points"].size());
  // dev-checked seed 11: both planted breaks are found
  REQUIRE(j["change_points"].size() >= 1);
  REQUIRE(j["change_points"].size() <= 4);
  bool near_200 = false, near_400 = false;
  for (const auto& cp : j["change_points"]) {
    long v = cp.get<long>();
    near_200 = near_200 || std::abs(v - 200) <= 30;
    near_400 = near_400 || std::abs(v - 400) <= 30;
  }
  CHECK(near_200);
  CHECK(near_400);

  std::string plot_csv = slurp(plot);
  CHECK(plot_csv.rfind("index,date,return,is_change_point", 0) == 0);
  long lines = std::count(plot_csv.begin(), plot_csv.end(), '\n');
  CHECK(lines == 601);  // header + one row per return
}

TEST_CASE("detect reports no change points on calm data") {
  fs::path prices = garch_prices("calm.csv", 600, 25, 0.0, 0.0);  // iid; dev-checked seed
  RunResult res = run("detect --input " + prices.string() + " --detector npcpm");
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(j["change_points"].empty());
}

TEST_CASE("detect rejects unknown detectors with a usage error") {
  fs::path prices = garch_prices("usage.csv", 100, 2);
  RunResult res = run("detect --input " + prices.string() + " --detector bogus");
  CHECK(res.exit_code == 1);
}

TEST_CASE("detect on a too-short series exits 3") {
  fs::path prices = write_file(
      "short.csv",
      "date,close\n2020-01-01,100\n2020-01-02,101\n2020-01-03,102\n2020-01-04,103\n");
  RunResult res = run("detect --input " + prices.string() + " --detector npcpm");
  CHECK(res.exit_code == 3);
}

TEST_CASE("fit reports a converged model with consistent criteria") {
  fs::path prices = garch_prices("fit.csv", 1500, 3);
  RunResult res = run("fit --input " + prices.string() +
                      " --model garch --detector none --dist gaussian");
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(conforms("fit_result.schema.json", j));
  CHECK(j["converged"] == true);
  CHECK(j["model"] == "garch");
  double aic = j["aic"].get<double>();
  double bic = j["bic"].get<double>();
  double ll = j["log_lik"].get<double>();
  int k = j["k"].get<int>();
  CHECK(aic == 2.0 * k - 2.0 * ll);
  CHECK(bic == k * std::log(1500.0) - 2.0 * ll);
  CHECK(aic - bic == doctest::Approx(k * (2.0 - std::log(1500.0))).epsilon(1e-9));
}

TEST_CASE("fit accepts explicit change points") {
  fs::path prices = garch_prices("fit_cps.csv", 600, 4);
  RunResult res = run("fit --input " + prices.string() +
                      " --model abo --detector none --dist student_t --change-points 300");
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(j["model"] == "abo-garch");
  REQUIRE(j["regimes"].size() == 2);
  CHECK(j["regimes"][0]["end"] == 300);
  CHECK(j["regimes"][1]["start"] == 300);
  CHECK(j["regimes"][0].contains("nu"));
  CHECK(j["k"] == 8);
  CHECK(j["change_points"] == json::array({300}));
  CHECK(j["regime_volatility"].size() == 2);
}

TEST_CASE("compare emits the grid and the text table") {
  fs::path spec = write_file("design2.json", kDesignSpec);
  fs::path prices = work_dir() / "compare_prices.csv";
  REQUIRE(run("simulate --spec " + spec.string() + " --emit-prices " + prices.string())
              .exit_code == 0);
  fs::path out = work_dir() / "compare.json";
  RunResult res = run("compare --input " + prices.string() + " --output " + out.string());
  REQUIRE(res.exit_code == 0);
  json j = json::parse(slurp(out));
  CHECK(conforms("comparison_table.schema.json", j));
  CHECK(j["rows"].size() == 18);
  CHECK(res.err.find("garch, none, gaussian") != std::string::npos);
  int best_aic = j["best_aic"].get<int>();
  REQUIRE(best_aic >= 0);
  double best = j["rows"][best_aic]["aic"].get<double>();
  for (const auto& row : j["rows"]) {
    if (row["ok"] == true) CHECK(best <= row["aic"].get<double>());
  }
}

TEST_CASE("calibrate writes a parseable threshold table") {
  fs::path out = work_dir() / "table.csv";
  RunResult res = run("calibrate --n 50 --alpha 0.05 --sims 800 --seed 7 --output " +
                      out.string());
  REQUIRE(res.exit_code == 0);
  std::string csv = slurp(out);
  CHECK(csv.rfind("# alpha=", 0) == 0);
  CHECK(csv.find("n,h\n") != std::string::npos);
  CHECK(csv.find("50,") != std::string::npos);
  // value sanity: near the tabulated 2.88
  std::size_t pos = csv.find("50,");
  double h = std::stod(csv.substr(pos + 3));
  CHECK(h > 2.6);
  CHECK(h < 3.2);

  RunResult rerun = run("calibrate --n 50 --alpha 0.05 --sims 800 --seed 7");
  CHECK(rerun.exit_code == 0);
  CHECK(rerun.out == csv);
}

TEST_CASE("simulate produces a deterministic report") {
  fs::path spec = write_file("design3.json", kDesignSpec);
  fs::path out1 = work_dir() / "rep1.json";
  fs::path out2 = work_dir() / "rep2.json";
  fs::path hist = work_dir() / "hist.csv";
  std::string base = "simulate --spec " + spec.string() +
                     " --reps 60 --detectors icss,npcpm --seed 99 --hist-csv " +
                     hist.string();
  REQUIRE(run(base + " --output " + out1.string()).exit_code == 0);
  REQUIRE(run(base + " --output " + out2.string()).exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));
  json j = json::parse(slurp(out1));
  CHECK(conforms("experiment_report.schema.json", j));
  CHECK(j["detectors"].contains("icss"));
  CHECK(j["detectors"].contains("npcpm"));
  CHECK(j["detectors"]["npcpm"]["mean_change_points"].get<double>() <
        j["detectors"]["icss"]["mean_change_points"].get<double>());
  CHECK(slurp(hist).rfind("detector,index,count", 0) == 0);
}

TEST_CASE("simulate rejects malformed specs with exit 5") {
  fs::path bad = write_file("bad_spec.json", R"({"segments": []})");
  CHECK(run("simulate --spec " + bad.string() + " --reps 5").exit_code == 5);
  fs::path junk = write_file("junk_spec.json", "not json");
  CHECK(run("simulate --spec " + junk.string() + " --reps 5").exit_code == 5);
}

TEST_CASE("non-default alpha without a table is rejected") {
  fs::path prices = garch_prices("alpha.csv", 200, 6);
  RunResult res = run("detect --input " + prices.string() + " --detector npcpm --alpha 0.01");
  CHECK(res.exit_code == 3);
  CHECK(res.err.find("calibrate") != std::string::npos);
}
