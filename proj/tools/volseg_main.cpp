// Command-line front end: ingestion, change-point detection, regime GARCH
// fitting, model comparison, threshold calibration, and simulation studies.
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 data, 4 fit failure, 5 bad spec.

#include "volseg/pipeline.hpp"
#include "volseg/serialize.hpp"
#include "volseg/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace volseg;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitData = 3;
constexpr int kExitFit = 4;
constexpr int kExitSpec = 5;

// Documented default for every randomized subcommand.
constexpr std::uint64_t kDefaultSeed = 12345;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::IoError:
      return kExitIo;
    case ErrorCode::InvalidSpec:
      return kExitSpec;
    default:
      return kExitData;
  }
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) raise(ErrorCode::IoError, "failed writing '" + path + "'");
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

struct DetectorFlags {
  double threshold = 1.358;
  Index icss_min_segment = IcssConfig{}.min_segment;
  Index npcpm_min_segment = NpcpmConfig{}.min_segment;
  double alpha = 0.05;
  std::string table_path;
  bool demean = false;
  bool median_center = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--threshold", threshold, "ICSS critical value for sqrt(n/2) max|D_t|")
        ->capture_default_str();
    cmd->add_option("--icss-min-segment", icss_min_segment,
                    "shortest run on either side of an ICSS split")
        ->capture_default_str();
    cmd->add_option("--min-segment", npcpm_min_segment,
                    "shortest run on either side of a rank-test split")
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "false-positive probability for the rank detector")
        ->check(CLI::Range(1e-6, 1.0 - 1e-6))
        ->capture_default_str();
    cmd->add_option("--table", table_path,
                    "rank-detector threshold table CSV (from `volseg calibrate`)");
    cmd->add_flag("--demean", demean, "subtract the sample mean before the ICSS statistic");
    cmd->add_flag("--median-center", median_center,
                  "subtract the sample median before the rank statistic");
  }

  PipelineConfig pipeline_config() const {
    PipelineConfig cfg;
    cfg.icss.threshold = threshold;
    cfg.icss.min_segment = icss_min_segment;
    cfg.icss.demean = demean;
    cfg.npcpm.min_segment = npcpm_min_segment;
    cfg.npcpm.median_center = median_center;
    if (!table_path.empty()) {
      std::ifstream in(table_path);
      if (!in) raise(ErrorCode::IoError, "cannot open '" + table_path + "'");
      cfg.table = ThresholdTable::read_csv(in);
    } else if (alpha != 0.05) {
      raise(ErrorCode::InvalidParams,
            "only alpha = 0.05 thresholds ship with the tool; run `volseg calibrate "
            "--alpha <a>` and pass the result via --table");
    }
    return cfg;
  }
};

ReturnSeries load_returns(const std::string& path) {
  return log_returns(parse_price_csv_file(path));
}

std::string iso_date(long days_since_start) {
  using namespace std::chrono;
  year_month_day base = year{2000} / 1 / 3;
  year_month_day d{sys_days(base) + days(days_since_start)};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string prices_csv_from_returns(const Vector& returns) {
  std::ostringstream out;
  out << "date,close\n";
  double level = 100.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", level);
  out << iso_date(0) << ',' << buf << '\n';
  for (Index t = 0; t < returns.size(); ++t) {
    level *= std::exp(returns[t]);
    std::snprintf(buf, sizeof(buf), "%.17g", level);
    out << iso_date(t + 1) << ',' << buf << '\n';
  }
  return out.str();
}

int cmd_summarize(const std::string& input, const std::string& output, int lags) {
  ReturnSeries r = load_returns(input);
  json j;
  j["n_returns"] = r.size();
  j["lags"] = lags;
  json errors = json::object();
  auto field = [&](const char* key, auto&& compute) {
    try {
      j[key] = compute();
    } catch (const Error& e) {
      j[key] = nullptr;
      errors[key] = e.what();
    }
  };
  field("mean", [&] { return sample_mean(r.values); });
  field("std_dev", [&] { return sample_std_dev(r.values); });
  field("skewness", [&] { return skewness(r.values); });
  field("excess_kurtosis", [&] { return excess_kurtosis(r.values); });
  field("ljung_box_p", [&] { return ljung_box(r.values, lags).p_value; });
  field("ljung_box_sq_p",
        [&] { return ljung_box(r.values.array().square().matrix(), lags).p_value; });
  if (!errors.empty()) j["errors"] = errors;
  write_json(output, j);
  return kExitOk;
}

int cmd_detect(const std::string& input, const std::string& output,
               const std::string& detector_name, const DetectorFlags& flags,
               const std::string& plot_path) {
  auto detector = detector_from_string(detector_name);
  PipelineConfig cfg = flags.pipeline_config();
  ReturnSeries r = load_returns(input);
  Index min_needed = 2 * (detector == Detector::Icss ? cfg.icss.min_segment
                                                     : cfg.npcpm.min_segment);
  if (r.size() < min_needed) {
    raise(ErrorCode::SeriesTooShort,
          "detection needs at least " + std::to_string(min_needed) + " returns, got " +
              std::to_string(r.size()));
  }
  Segmentation seg;
  if (detector == Detector::Icss) {
    seg = icss_segment(r.values, cfg.icss);
  } else {
    seg = npcpm_segment(r.values, cfg.table, cfg.npcpm);
  }
  write_json(output, detection_to_json(*detector, seg, r.labels));
  if (!plot_path.empty()) write_text(plot_path, detection_plot_csv(r, seg));
  return kExitOk;
}

std::vector<Index> parse_change_points(const std::string& text) {
  std::vector<Index> cps;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    cps.push_back(static_cast<Index>(std::stoll(token)));
  }
  return cps;
}

int cmd_fit(const std::string& input, const std::string& output,
            const std::string& model_name, const std::string& detector_name,
            const std::string& dist_name, const DetectorFlags& flags,
            const std::string& change_points_text) {
  RegimeModel model = model_name == "garch"   ? RegimeModel::Plain
                      : model_name == "omega" ? RegimeModel::Omega
                                              : RegimeModel::AlphaBetaOmega;
  Distribution dist =
      dist_name == "gaussian" ? Distribution::Gaussian : Distribution::StudentT;
  Detector detector = *detector_from_string(detector_name);
  PipelineConfig cfg = flags.pipeline_config();
  ReturnSeries r = load_returns(input);

  PipelineResult res;
  if (!change_points_text.empty()) {
    Segmentation seg;
    seg.n = r.size();
    seg.change_points = parse_change_points(change_points_text);
    seg.validate();
    res = run_with_segmentation(r.values, seg, model, dist, cfg);
  } else if (detector == Detector::None) {
    res = run_with_segmentation(r.values, Segmentation{{}, r.size()}, model, dist, cfg);
  } else if (detector == Detector::GIcss || detector == Detector::GNpcpm) {
    res = run_three_stage(r.values, detector, model, dist, cfg);
  } else {
    res = run_two_stage(r.values, detector, model, dist, cfg);
  }

  json j = to_json(res.fit);
  j["detector"] = to_string(res.detector);
  json cps = json::array();
  for (Index cp : res.segmentation.change_points) cps.push_back(cp);
  j["change_points"] = std::move(cps);
  json merged = json::array();
  for (Index cp : res.merged_change_points) merged.push_back(cp);
  j["merged_change_points"] = std::move(merged);
  j["regime_volatility"] = res.regime_vols;
  if (!r.labels.empty()) {
    json dates = json::array();
    for (Index cp : res.segmentation.change_points) {
      dates.push_back(r.labels[static_cast<std::size_t>(cp)]);
    }
    j["change_dates"] = std::move(dates);
  }
  write_json(output, j);
  if (!res.fit.converged) {
    std::cerr << "fit did not converge on any restart; best point written\n";
    return kExitFit;
  }
  return kExitOk;
}

int cmd_compare(const std::string& input, const std::string& output,
                const DetectorFlags& flags) {
  PipelineConfig cfg = flags.pipeline_config();
  ReturnSeries r = load_returns(input);
  ComparisonTable table = compare_models(r.values, cfg);
  write_json(output, to_json(table));
  std::cerr << format_comparison(table);
  return kExitOk;
}

int cmd_calibrate(const std::string& output, const std::vector<Index>& lengths,
                  double alpha, int sims, std::uint64_t seed, Index min_segment,
                  int threads) {
  std::map<Index, double> entries;
  for (Index n : lengths) {
    entries[n] = calibrate_threshold(n, alpha, sims, seed, min_segment, threads);
  }
  ThresholdTable table(std::move(entries), alpha);
  std::ostringstream csv;
  table.write_csv(csv);
  write_text(output, csv.str());
  return kExitOk;
}

int cmd_simulate(const std::string& spec_path, const std::string& output,
                 const std::string& detectors_text, long reps,
                 std::optional<std::uint64_t> seed, const DetectorFlags& flags,
                 const std::string& hist_path, const std::string& emit_prices_path,
                 int threads, bool report_wanted) {
  std::ifstream in(spec_path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + spec_path + "'");
  json spec_json;
  try {
    spec_json = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::InvalidSpec, std::string("unparseable spec: ") + e.what());
  }
  RegimeSpec spec = regime_spec_from_json(spec_json);

  if (!emit_prices_path.empty()) {
    Vector series = gen_student_t_regimes(spec);
    write_text(emit_prices_path, prices_csv_from_returns(series));
    if (!report_wanted) return kExitOk;
  }

  std::vector<DetectorKind> detectors;
  std::stringstream ss(detectors_text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "icss") {
      detectors.push_back(DetectorKind::Icss);
    } else if (token == "npcpm") {
      detectors.push_back(DetectorKind::Npcpm);
    } else if (!token.empty()) {
      raise(ErrorCode::InvalidSpec, "unknown detector '" + token + "'");
    }
  }
  if (detectors.empty()) {
    raise(ErrorCode::InvalidSpec, "no detectors requested (use --detectors icss,npcpm)");
  }

  DetectorConfig det_cfg;
  PipelineConfig pipe_cfg = flags.pipeline_config();
  det_cfg.icss = pipe_cfg.icss;
  det_cfg.npcpm = pipe_cfg.npcpm;
  det_cfg.table = pipe_cfg.table;

  std::uint64_t master = seed.value_or(spec.seed);
  ExperimentReport report = run_experiment(spec, reps, detectors, master, det_cfg, threads);
  write_json(output, to_json(report));
  if (!hist_path.empty()) write_text(hist_path, location_histogram_csv(report));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"volatility change-point detection and regime GARCH modelling"};
  app.require_subcommand(1);

  std::string input, output, plot_path, detector_name = "npcpm";
  std::string model_name = "garch", dist_name = "gaussian", change_points_text;
  std::string spec_path, detectors_text = "icss,npcpm", hist_path, emit_prices_path;
  int lags = 20;
  DetectorFlags detect_flags, fit_flags, compare_flags, simulate_flags;
  std::vector<Index> calib_lengths;
  double calib_alpha = 0.05;
  int calib_sims = 10000;
  std::uint64_t calib_seed = kDefaultSeed;
  Index calib_min_segment = kCalibrationMinSegment;
  int threads = 0;
  long reps = 1000;
  std::uint64_t sim_seed = kDefaultSeed;

  CLI::App* summarize = app.add_subcommand("summarize", "summary statistics of log returns");
  summarize->add_option("--input", input, "price CSV with a date,close header")->required();
  summarize->add_option("--output", output, "output path (stdout when omitted)");
  summarize->add_option("--lags", lags, "Ljung-Box lag count")->capture_default_str();

  CLI::App* detect = app.add_subcommand("detect", "volatility change points");
  detect->add_option("--input", input, "price CSV with a date,close header")->required();
  detect->add_option("--output", output, "output path (stdout when omitted)");
  detect->add_option("--detector", detector_name, "icss or npcpm")
      ->check(CLI::IsMember({"icss", "npcpm"}))
      ->capture_default_str();
  detect->add_option("--plot-data", plot_path, "write index,date,return,is_change_point CSV");
  detect_flags.add_to(detect);

  CLI::App* fit = app.add_subcommand("fit", "fit a regime GARCH model");
  fit->add_option("--input", input, "price CSV with a date,close header")->required();
  fit->add_option("--output", output, "output path (stdout when omitted)");
  fit->add_option("--model", model_name, "garch, omega or abo")
      ->check(CLI::IsMember({"garch", "omega", "abo"}))
      ->capture_default_str();
  fit->add_option("--detector", detector_name, "none, icss, npcpm, gicss or gnpcpm")
      ->check(CLI::IsMember({"none", "icss", "npcpm", "gicss", "gnpcpm"}))
      ->capture_default_str();
  fit->add_option("--dist", dist_name, "gaussian or student_t")
      ->check(CLI::IsMember({"gaussian", "student_t"}))
      ->capture_default_str();
  fit->add_option("--change-points", change_points_text,
                  "comma-separated indices; skips detection");
  fit_flags.add_to(fit);

  CLI::App* compare = app.add_subcommand("compare", "model comparison grid");
  compare->add_option("--input", input, "price CSV with a date,close header")->required();
  compare->add_option("--output", output,
                      "JSON output path (stdout when omitted); the aligned text "
                      "table goes to stderr");
  compare_flags.add_to(compare);

  CLI::App* calibrate = app.add_subcommand("calibrate", "Monte Carlo critical values");
  calibrate->add_option("--n", calib_lengths, "series length (repeatable)")->required();
  calibrate->add_option("--alpha", calib_alpha, "false-positive probability")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6))
      ->capture_default_str();
  calibrate->add_option("--sims", calib_sims, "Monte Carlo replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  calibrate->add_option("--seed", calib_seed, "master seed")->capture_default_str();
  calibrate->add_option("--min-segment", calib_min_segment,
                        "shortest run on either side of a split")
      ->capture_default_str();
  calibrate->add_option("--threads", threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  calibrate->add_option("--output", output, "output path (stdout when omitted)");

  CLI::App* simulate = app.add_subcommand("simulate", "regime-switching simulation study");
  simulate->add_option("--spec", spec_path, "RegimeSpec JSON file")->required();
  simulate->add_option("--output", output, "report path (stdout when omitted)");
  simulate->add_option("--reps", reps, "replications")->capture_default_str();
  simulate->add_option("--detectors", detectors_text, "comma-separated: icss,npcpm")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "master seed (defaults to the spec's seed)");
  simulate->add_option("--hist-csv", hist_path, "write the location histogram CSV");
  simulate->add_option("--emit-prices", emit_prices_path,
                       "write one realization as a date,close price CSV and exit");
  simulate->add_option("--threads", threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  simulate_flags.add_to(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*summarize) return cmd_summarize(input, output, lags);
    if (*detect) return cmd_detect(input, output, detector_name, detect_flags, plot_path);
    if (*fit) {
      return cmd_fit(input, output, model_name, detector_name, dist_name, fit_flags,
                     change_points_text);
    }
    if (*compare) return cmd_compare(input, output, compare_flags);
    if (*calibrate) {
      return cmd_calibrate(output, calib_lengths, calib_alpha, calib_sims, calib_seed,
                           calib_min_segment, threads);
    }
    if (*simulate) {
      bool seed_given = simulate->count("--seed") > 0;
      bool report_wanted = simulate->count("--output") > 0 ||
                           simulate->count("--detectors") > 0 ||
                           simulate->count("--hist-csv") > 0 ||
                           emit_prices_path.empty();
      return cmd_simulate(spec_path, output, detectors_text, reps,
                          seed_given ? std::optional<std::uint64_t>(sim_seed)
                                     : std::nullopt,
                          simulate_flags, hist_path, emit_prices_path, threads,
                          report_wanted);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
