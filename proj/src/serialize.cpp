#include "volseg/serialize.hpp"

#include <cstdio>
#include <sstream>

namespace volseg {

using nlohmann::json;

json to_json(const SummaryStats& stats) {
  return json{{"mean", stats.mean},
              {"std_dev", stats.std_dev},
              {"skewness", stats.skewness},
              {"excess_kurtosis", stats.excess_kurtosis},
              {"ljung_box_p", stats.ljung_box_p},
              {"ljung_box_sq_p", stats.ljung_box_sq_p}};
}

json to_json(const FitResult& fit) {
  json regimes = json::array();
  for (Index j = 0; j < fit.segmentation.regime_count(); ++j) {
    auto [lo, hi] = fit.segmentation.regime_bounds(j);
    const GarchParams& p = fit.params.per_regime[static_cast<std::size_t>(j)];
    json regime{{"start", lo},
                {"end", hi},
                {"omega", p.omega},
                {"alpha", p.alpha},
                {"beta", p.beta}};
    if (p.nu) regime["nu"] = *p.nu;
    regimes.push_back(std::move(regime));
  }
  return json{{"model", fit.model},
              {"distribution", to_string(fit.distribution)},
              {"regimes", std::move(regimes)},
              {"log_lik", fit.log_lik},
              {"k", fit.k},
              {"aic", fit.aic},
              {"bic", fit.bic},
              {"converged", fit.converged}};
}

json to_json(const ComparisonTable& table) {
  json rows = json::array();
  for (const ComparisonRow& row : table.rows) {
    json r{{"label", row.label},
           {"model", to_string(row.model)},
           {"detector", to_string(row.detector)},
           {"distribution", to_string(row.distribution)},
           {"ok", row.ok}};
    if (row.ok) {
      r["log_lik"] = row.log_lik;
      r["aic"] = row.aic;
      r["bic"] = row.bic;
      r["k"] = row.k;
      r["n_change_points"] = row.n_change_points;
      r["converged"] = row.converged;
    } else {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  return json{{"n", table.n},
              {"rows", std::move(rows)},
              {"best_aic", table.best_aic},
              {"best_bic", table.best_bic}};
}

json to_json(const ExperimentReport& report) {
  json detectors = json::object();
  for (const auto& [kind, stats] : report.per_detector) {
    json hist = json::object();
    for (const auto& [idx, count] : stats.location_histogram) {
      hist[std::to_string(idx)] = count;
    }
    json regimes = json::object();
    for (const auto& [count, freq] : stats.regime_count_distribution) {
      regimes[std::to_string(count)] = freq;
    }
    detectors[to_string(kind)] = json{{"mean_change_points", stats.mean_change_points},
                                      {"mean_regimes", stats.mean_regimes},
                                      {"cp_location_histogram", std::move(hist)},
                                      {"regime_count_distribution", std::move(regimes)},
                                      {"failed_replicates", stats.failed_replicates}};
  }
  return json{{"replications", report.replications},
              {"master_seed", report.master_seed},
              {"detectors", std::move(detectors)}};
}

json to_json(const RegimeSpec& spec) {
  json segments = json::array();
  for (const auto& s : spec.segments) {
    segments.push_back(json{{"length", s.length}, {"variance", s.variance}});
  }
  return json{{"segments", std::move(segments)},
              {"nu", spec.nu},
              {"seed", spec.seed},
              {"innovations",
               spec.innovations == Innovations::StudentT ? "student_t" : "gaussian"}};
}

RegimeSpec regime_spec_from_json(const json& j) {
  RegimeSpec spec;
  try {
    if (!j.contains("segments") || !j["segments"].is_array()) {
      raise(ErrorCode::InvalidSpec, "spec needs a 'segments' array");
    }
    for (const auto& s : j["segments"]) {
      RegimeSegmentSpec seg;
      seg.length = s.at("length").get<Index>();
      seg.variance = s.at("variance").get<double>();
      spec.segments.push_back(seg);
    }
    spec.nu = j.value("nu", 3.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    std::string innov = j.value("innovations", std::string("student_t"));
    if (innov == "student_t") {
      spec.innovations = Innovations::StudentT;
    } else if (innov == "gaussian") {
      spec.innovations = Innovations::Gaussian;
    } else {
      raise(ErrorCode::InvalidSpec, "innovations must be 'student_t' or 'gaussian'");
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::InvalidSpec, std::string("bad spec json: ") + e.what());
  }
  spec.validate();
  return spec;
}

json detection_to_json(Detector detector, const Segmentation& seg,
                       const std::vector<std::string>& labels) {
  json cps = json::array();
  for (Index cp : seg.change_points) cps.push_back(cp);
  json out{{"detector", to_string(detector)},
           {"n", seg.n},
           {"change_points", std::move(cps)}};
  if (!labels.empty()) {
    json dates = json::array();
    for (Index cp : seg.change_points) {
      dates.push_back(labels[static_cast<std::size_t>(cp)]);
    }
    out["change_dates"] = std::move(dates);
  }
  return out;
}

std::string detection_plot_csv(const ReturnSeries& r, const Segmentation& seg) {
  std::ostringstream out;
  out << "index,date,return,is_change_point\n";
  std::size_t next_cp = 0;
  char buf[64];
  for (Index t = 0; t < r.size(); ++t) {
    bool is_cp = next_cp < seg.change_points.size() && seg.change_points[next_cp] == t;
    if (is_cp) ++next_cp;
    std::snprintf(buf, sizeof(buf), "%.17g", r.values[t]);
    out << t << ','
        << (r.labels.empty() ? "" : r.labels[static_cast<std::size_t>(t)]) << ','
        << buf << ',' << (is_cp ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string location_histogram_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "detector,index,count\n";
  for (const auto& [kind, stats] : report.per_detector) {
    for (const auto& [idx, count] : stats.location_histogram) {
      out << to_string(kind) << ',' << idx << ',' << count << '\n';
    }
  }
  return out.str();
}

}  // namespace volseg
