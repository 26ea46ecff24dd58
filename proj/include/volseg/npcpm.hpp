#pragma once

#include "volseg/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace volseg {

// Ranks under the indicator convention rank(x_i) = #{j : x_i >= x_j} over
// the whole input, so tied values share the highest rank of their group.
// MidRank averages tied groups instead and is off by default.
enum class TieRule { MaxRank, MidRank };

std::vector<double> ranks(const Eigen::Ref<const Vector>& x,
                          TieRule tie = TieRule::MaxRank);

// Two-sample rank test of equal scale. m_raw sums the squared deviations of
// the first sample's pooled ranks from the median rank (N+1)/2; mean and std
// are the closed-form null moments; m is the standardized |m_raw - mean| / std.
struct MoodResult {
  double m_raw = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double m = 0.0;
};

MoodResult mood_statistic(const Eigen::Ref<const Vector>& a,
                          const Eigen::Ref<const Vector>& b,
                          TieRule tie = TieRule::MaxRank);

// Standardized Mood statistic maximized over every admissible split of a
// series into a leading and trailing sample.
struct MaxMoodResult {
  double m_max = 0.0;
  Index tau_hat = 0;           // maximizing split k: first k vs remaining n-k
  std::vector<double> per_k;   // statistic per split, kept only on request
};

// Splits k run over [min_segment, n - min_segment]; ties go to the smallest
// k. Ranks are computed once on the pooled series and prefix sums give every
// split, so one evaluation costs O(n log n).
MaxMoodResult max_mood_statistic(const Eigen::Ref<const Vector>& r,
                                 Index min_segment, bool keep_per_k = false,
                                 TieRule tie = TieRule::MaxRank);

// Critical values h_n for the maximized statistic, keyed by series length.
// Lookup is exact on tabulated lengths, linear in log n between them, and
// clamped to the largest entry beyond the table.
class ThresholdTable {
 public:
  ThresholdTable(std::map<Index, double> entries, double alpha);

  // Monte Carlo critical values for alpha = 0.05, lengths 10..20000.
  static const ThresholdTable& defaults();

  double lookup(Index n) const;
  double alpha() const { return alpha_; }
  Index min_length() const { return entries_.begin()->first; }
  const std::map<Index, double>& entries() const { return entries_; }

  // Two-column CSV `n,h` preceded by an `# alpha=<value>` comment line.
  void write_csv(std::ostream& out) const;
  static ThresholdTable read_csv(std::istream& in);

 private:
  std::map<Index, double> entries_;
  double alpha_ = 0.05;
};

// Split window used when calibrating critical values; matches the window the
// shipped table was produced with.
inline constexpr Index kCalibrationMinSegment = 2;

// Empirical (1 - alpha) quantile of the maximized statistic over num_sims
// simulated iid Gaussian series of length n (any continuous distribution
// gives the same law; ranks are distribution free). Deterministic in
// (seed, num_sims) regardless of num_threads.
double calibrate_threshold(Index n, double alpha, int num_sims,
                           std::uint64_t seed,
                           Index min_segment = kCalibrationMinSegment,
                           int num_threads = 0);

struct NpcpmConfig {
  Index min_segment = 10;
  // Subtract the sample median first; the scale test assumes equal location.
  bool median_center = false;
  TieRule tie = TieRule::MaxRank;
};

// Recursive binary segmentation mirroring the ICSS scheme, flagging a
// segment when its maximized statistic exceeds the critical value for the
// segment's own length.
Segmentation npcpm_segment(const Eigen::Ref<const Vector>& r,
                           const ThresholdTable& table,
                           const NpcpmConfig& cfg = {});

}  // namespace volseg
