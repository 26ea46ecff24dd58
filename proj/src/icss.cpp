#include "volseg/icss.hpp"

#include <cmath>

namespace volseg {

CusumPath cusum_squares(const Eigen::Ref<const Vector>& r, bool demean) {
  Index n = r.size();
  if (n < 2) raise(ErrorCode::SeriesTooShort, "cusum needs >= 2 returns");

  Vector sq(n);
  if (demean) {
    double mean = r.mean();
    sq = (r.array() - mean).square();
  } else {
    sq = r.array().square();
  }
  double total = sq.sum();
  if (!(total > 0.0)) raise(ErrorCode::AllZeroSeries, "all squared returns are zero");

  CusumPath path;
  path.n = n;
  path.d = Vector::Zero(n + 1);
  double running = 0.0;
  for (Index t = 1; t < n; ++t) {
    running += sq[t - 1];
    path.d[t] = running / total - static_cast<double>(t) / static_cast<double>(n);
  }
  return path;
}

IcssScan icss_scan(const Eigen::Ref<const Vector>& r, const IcssConfig& cfg) {
  Index n = r.size();
  if (cfg.min_segment < 2) raise(ErrorCode::InvalidParams, "min_segment must be >= 2");
  if (n < 2 * cfg.min_segment) {
    raise(ErrorCode::SeriesTooShort,
          "need at least 2 * min_segment = " + std::to_string(2 * cfg.min_segment) +
              " returns, got " + std::to_string(n));
  }
  CusumPath path = cusum_squares(r, cfg.demean);

  double best = -1.0;
  Index best_t = cfg.min_segment;
  for (Index t = cfg.min_segment; t <= n - cfg.min_segment; ++t) {
    double v = std::abs(path.d[t]);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  IcssScan scan;
  scan.statistic = std::sqrt(static_cast<double>(n) / 2.0) * best;
  // At the argmax t the left part is r_1..r_{t-1} and the right part starts
  // at r_t, i.e. 0-based index t - 1.
  scan.tau = best_t - 1;
  return scan;
}

std::optional<Index> icss_single_test(const Eigen::Ref<const Vector>& r,
                                      const IcssConfig& cfg) {
  IcssScan scan = icss_scan(r, cfg);
  if (scan.statistic > cfg.threshold) return scan.tau;
  return std::nullopt;
}

namespace {

void segment_recursive(const Eigen::Ref<const Vector>& r, const IcssConfig& cfg,
                       Index offset, std::vector<Index>& out) {
  if (r.size() < 2 * cfg.min_segment) return;
  std::optional<Index> tau;
  try {
    tau = icss_single_test(r, cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AllZeroSeries) return;  // flat segment, nothing to find
    throw;
  }
  if (!tau) return;
  Index split = *tau;
  if (split < 1 || split >= r.size()) return;
  segment_recursive(r.head(split), cfg, offset, out);
  out.push_back(offset + split);
  segment_recursive(r.tail(r.size() - split), cfg, offset + split, out);
}

}  // namespace

Segmentation icss_segment(const Eigen::Ref<const Vector>& r, const IcssConfig& cfg) {
  Segmentation seg;
  seg.n = r.size();
  segment_recursive(r, cfg, 0, seg.change_points);
  seg.validate();
  return seg;
}

}  // namespace volseg
