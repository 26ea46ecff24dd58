#pragma once

#include "volseg/icss.hpp"
#include "volseg/npcpm.hpp"
#include "volseg/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace volseg {

enum class DetectorKind { Icss, Npcpm };

const char* to_string(DetectorKind d);

struct RegimeSegmentSpec {
  Index length = 0;
  double variance = 1.0;
};

enum class Innovations { StudentT, Gaussian };

// Piecewise-constant-variance generator. Student-t draws are scaled by
// sqrt(variance * (nu - 2) / nu) so each segment has exactly the requested
// variance.
struct RegimeSpec {
  std::vector<RegimeSegmentSpec> segments;
  double nu = 3.0;
  std::uint64_t seed = 0;
  Innovations innovations = Innovations::StudentT;

  Index total_length() const;
  Segmentation true_segmentation() const;
  void validate() const;
};

Vector gen_student_t_regimes(const RegimeSpec& spec);

struct DetectorConfig {
  IcssConfig icss;
  NpcpmConfig npcpm;
  ThresholdTable table = ThresholdTable::defaults();
};

struct DetectorStats {
  double mean_change_points = 0.0;
  double mean_regimes = 0.0;  // change points + 1, both kept to avoid unit mixups
  std::map<Index, long> location_histogram;
  std::map<Index, long> regime_count_distribution;
  long failed_replicates = 0;
};

struct ExperimentReport {
  long replications = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::pair<DetectorKind, DetectorStats>> per_detector;

  const DetectorStats& stats(DetectorKind d) const;
};

// Runs each detector on `replications` independent draws of the spec, the
// i-th generated with derive_seed(master_seed, i). Replicate failures are
// counted, not fatal. Deterministic in master_seed regardless of threading.
ExperimentReport run_experiment(const RegimeSpec& spec, long replications,
                                const std::vector<DetectorKind>& detectors,
                                std::uint64_t master_seed,
                                const DetectorConfig& cfg = {},
                                int num_threads = 0);

}  // namespace volseg
