#pragma once

#include "volseg/types.hpp"

#include <optional>

namespace volseg {

// Normalized cumulative sum of squares, d[t] = C_t / C_n - t / n for
// t = 0..n with C_t the running sum of squared returns. d[0] = d[n] = 0.
struct CusumPath {
  Vector d;
  Index n = 0;
};

struct IcssConfig {
  // Asymptotic Gaussian 0.05 critical value for sqrt(n/2) max|d_t|.
  double threshold = 1.358;
  // Shortest run of observations on either side of a tested split. The
  // statistic maxes over t in [min_segment, n - min_segment]; anything much
  // smaller lets single extreme observations keep re-splitting segments.
  Index min_segment = 40;
  // Subtract the sample mean before squaring. Off by default: the statistic
  // is defined on mean-zero returns.
  bool demean = false;
};

CusumPath cusum_squares(const Eigen::Ref<const Vector>& r, bool demean = false);

struct IcssScan {
  double statistic = 0.0;  // sqrt(n/2) * max |d_t| over the scanned window
  Index tau = 0;           // 0-based first index of the right segment at the argmax
};

// Scans t in [min_segment, n - min_segment]; argmax ties go to the earliest t.
IcssScan icss_scan(const Eigen::Ref<const Vector>& r, const IcssConfig& cfg);

// Change point (0-based start of the right segment) when the statistic
// exceeds the threshold, nullopt otherwise.
std::optional<Index> icss_single_test(const Eigen::Ref<const Vector>& r,
                                      const IcssConfig& cfg);

// Recursive binary segmentation: a flagged change splits the segment in two
// and both halves are re-tested until nothing flags or a half is shorter
// than 2 * min_segment.
Segmentation icss_segment(const Eigen::Ref<const Vector>& r, const IcssConfig& cfg);

}  // namespace volseg
