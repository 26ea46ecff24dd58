#include "volseg/simulation.hpp"

#include "volseg/parallel.hpp"
#include "volseg/rng.hpp"

#include <cmath>

namespace volseg {

const char* to_string(DetectorKind d) {
  return d == DetectorKind::Icss ? "icss" : "npcpm";
}

Index RegimeSpec::total_length() const {
  Index total = 0;
  for (const auto& s : segments) total += s.length;
  return total;
}

Segmentation RegimeSpec::true_segmentation() const {
  Segmentation seg;
  seg.n = total_length();
  Index pos = 0;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    pos += segments[i].length;
    seg.change_points.push_back(pos);
  }
  return seg;
}

void RegimeSpec::validate() const {
  if (segments.empty()) raise(ErrorCode::InvalidSpec, "spec has no segments");
  for (const auto& s : segments) {
    if (s.length < 1) raise(ErrorCode::InvalidSpec, "segment length must be positive");
    if (!(s.variance > 0.0)) raise(ErrorCode::InvalidSpec, "segment variance must be positive");
  }
  if (innovations == Innovations::StudentT && !(nu > 2.0)) {
    raise(ErrorCode::InvalidSpec, "nu must exceed 2 for a finite variance");
  }
}

Vector gen_student_t_regimes(const RegimeSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Vector out(spec.total_length());
  Index pos = 0;
  for (const auto& s : spec.segments) {
    double scale = spec.innovations == Innovations::StudentT
                       ? std::sqrt(s.variance * (spec.nu - 2.0) / spec.nu)
                       : std::sqrt(s.variance);
    for (Index t = 0; t < s.length; ++t) {
      double draw = spec.innovations == Innovations::StudentT
                        ? rng.student_t(spec.nu)
                        : rng.standard_normal();
      out[pos++] = scale * draw;
    }
  }
  return out;
}

const DetectorStats& ExperimentReport::stats(DetectorKind d) const {
  for (const auto& [kind, s] : per_detector) {
    if (kind == d) return s;
  }
  raise(ErrorCode::InvalidParams, "detector not present in report");
}

ExperimentReport run_experiment(const RegimeSpec& spec, long replications,
                                const std::vector<DetectorKind>& detectors,
                                std::uint64_t master_seed, const DetectorConfig& cfg,
                                int num_threads) {
  spec.validate();
  if (replications < 1) raise(ErrorCode::InvalidParams, "replications must be >= 1");
  if (detectors.empty()) raise(ErrorCode::InvalidParams, "no detectors requested");

  struct ReplicateOutcome {
    std::vector<std::vector<Index>> change_points;  // per detector
    std::vector<bool> failed;
  };
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(replications));

  parallel_for(0, replications, num_threads, [&](long i) {
    RegimeSpec local = spec;
    local.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
    Vector series = gen_student_t_regimes(local);
    ReplicateOutcome& slot = outcomes[static_cast<std::size_t>(i)];
    slot.change_points.resize(detectors.size());
    slot.failed.resize(detectors.size(), false);
    for (std::size_t d = 0; d < detectors.size(); ++d) {
      try {
        Segmentation seg = detectors[d] == DetectorKind::Icss
                               ? icss_segment(series, cfg.icss)
                               : npcpm_segment(series, cfg.table, cfg.npcpm);
        slot.change_points[d] = seg.change_points;
      } catch (const Error&) {
        slot.failed[d] = true;
      }
    }
  });

  ExperimentReport report;
  report.replications = replications;
  report.master_seed = master_seed;
  for (std::size_t d = 0; d < detectors.size(); ++d) {
    DetectorStats stats;
    long total_cps = 0;
    long counted = 0;
    for (const auto& outcome : outcomes) {
      if (outcome.failed[d]) {
        ++stats.failed_replicates;
        continue;
      }
      const auto& cps = outcome.change_points[d];
      total_cps += static_cast<long>(cps.size());
      ++counted;
      for (Index cp : cps) ++stats.location_histogram[cp];
      ++stats.regime_count_distribution[static_cast<Index>(cps.size()) + 1];
    }
    if (counted > 0) {
      stats.mean_change_points = static_cast<double>(total_cps) / static_cast<double>(counted);
      stats.mean_regimes = stats.mean_change_points + 1.0;
    }
    report.per_detector.emplace_back(detectors[d], std::move(stats));
  }
  return report;
}

}  // namespace volseg
