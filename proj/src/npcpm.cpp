#include "volseg/npcpm.hpp"

#include "volseg/parallel.hpp"
#include "volseg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace volseg {

std::vector<double> ranks(const Eigen::Ref<const Vector>& x, TieRule tie) {
  Index n = x.size();
  if (n < 1) raise(ErrorCode::EmptySample, "ranks of empty sample");
  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto ub = std::upper_bound(sorted.begin(), sorted.end(), x[i]);
    double high = static_cast<double>(ub - sorted.begin());
    if (tie == TieRule::MaxRank) {
      out[static_cast<std::size_t>(i)] = high;
    } else {
      auto lb = std::lower_bound(sorted.begin(), sorted.end(), x[i]);
      double low = static_cast<double>(lb - sorted.begin()) + 1.0;
      out[static_cast<std::size_t>(i)] = 0.5 * (low + high);
    }
  }
  return out;
}

namespace {

struct MoodMoments {
  double mean;
  double std;
};

// Null moments of the sum of squared rank deviations for a first sample of
// size m in a pool of size total.
MoodMoments mood_moments(double m, double total) {
  double n2 = total * total;
  double mean = m * (n2 - 1.0) / 12.0;
  double var = m * (total - m) * (total + 1.0) * (n2 - 4.0) / 180.0;
  return {mean, std::sqrt(var)};
}

}  // namespace

MoodResult mood_statistic(const Eigen::Ref<const Vector>& a,
                          const Eigen::Ref<const Vector>& b, TieRule tie) {
  Index m = a.size();
  Index n = b.size();
  if (m < 1 || n < 1) raise(ErrorCode::EmptySample, "mood test needs both samples non-empty");
  Index total = m + n;
  if (total < 3) {
    // the null variance mn(N+1)(N^2-4)/180 vanishes at N = 2
    raise(ErrorCode::EmptySample, "mood test needs a pooled sample of at least 3");
  }

  Vector pooled(total);
  pooled.head(m) = a;
  pooled.tail(n) = b;
  std::vector<double> rk = ranks(pooled, tie);

  double center = (static_cast<double>(total) + 1.0) / 2.0;
  double m_raw = 0.0;
  for (Index i = 0; i < m; ++i) {
    double d = rk[static_cast<std::size_t>(i)] - center;
    m_raw += d * d;
  }
  MoodMoments mm = mood_moments(static_cast<double>(m), static_cast<double>(total));

  MoodResult out;
  out.m_raw = m_raw;
  out.mean = mm.mean;
  out.std = mm.std;
  out.m = std::abs(m_raw - mm.mean) / mm.std;
  return out;
}

MaxMoodResult max_mood_statistic(const Eigen::Ref<const Vector>& r,
                                 Index min_segment, bool keep_per_k, TieRule tie) {
  Index n = r.size();
  if (min_segment < 1) raise(ErrorCode::InvalidParams, "min_segment must be >= 1");
  if (n < 2 * min_segment) {
    raise(ErrorCode::SeriesTooShort,
          "need at least 2 * min_segment = " + std::to_string(2 * min_segment) +
              " observations, got " + std::to_string(n));
  }

  std::vector<double> rk = ranks(r, tie);
  double center = (static_cast<double>(n) + 1.0) / 2.0;

  MaxMoodResult out;
  if (keep_per_k) out.per_k.reserve(static_cast<std::size_t>(n - 2 * min_segment + 1));
  double prefix = 0.0;
  double best = -1.0;
  Index best_k = min_segment;
  for (Index k = 1; k <= n - min_segment; ++k) {
    double d = rk[static_cast<std::size_t>(k - 1)] - center;
    prefix += d * d;
    if (k < min_segment) continue;
    MoodMoments mm = mood_moments(static_cast<double>(k), static_cast<double>(n));
    double m = std::abs(prefix - mm.mean) / mm.std;
    if (keep_per_k) out.per_k.push_back(m);
    if (m > best) {
      best = m;
      best_k = k;
    }
  }
  out.m_max = best;
  out.tau_hat = best_k;
  return out;
}

ThresholdTable::ThresholdTable(std::map<Index, double> entries, double alpha)
    : entries_(std::move(entries)), alpha_(alpha) {
  if (entries_.empty()) raise(ErrorCode::InvalidParams, "threshold table is empty");
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) raise(ErrorCode::InvalidParams, "alpha must be in (0,1)");
  double prev = 0.0;
  for (const auto& [n, h] : entries_) {
    if (n < 2 || !(h > 0.0)) {
      raise(ErrorCode::InvalidParams, "bad table entry n=" + std::to_string(n));
    }
    if (h < prev) {
      // the critical value grows with the number of admissible splits;
      // a decreasing entry means under-simulated calibration
      raise(ErrorCode::InvalidParams,
            "threshold at n=" + std::to_string(n) +
                " decreases; calibrate with more simulations");
    }
    prev = h;
  }
}

const ThresholdTable& ThresholdTable::defaults() {
  static const ThresholdTable table(
      {{10, 2.48},
       {20, 2.65},
       {50, 2.88},
       {100, 2.99},
       {200, 3.09},
       {500, 3.20},
       {1000, 3.25},
       {5000, 3.35},
       {10000, 3.37},
       {20000, 3.42}},
      0.05);
  return table;
}

double ThresholdTable::lookup(Index n) const {
  auto it = entries_.lower_bound(n);
  if (it != entries_.end() && it->first == n) return it->second;
  if (it == entries_.begin()) {
    raise(ErrorCode::BelowTableRange,
          "n = " + std::to_string(n) + " below smallest tabulated length " +
              std::to_string(entries_.begin()->first));
  }
  if (it == entries_.end()) return entries_.rbegin()->second;  // clamp beyond the table
  auto lo = std::prev(it);
  double x0 = std::log(static_cast<double>(lo->first));
  double x1 = std::log(static_cast<double>(it->first));
  double w = (std::log(static_cast<double>(n)) - x0) / (x1 - x0);
  return lo->second + w * (it->second - lo->second);
}

void ThresholdTable::write_csv(std::ostream& out) const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", alpha_);
  out << "# alpha=" << buf << "\n";
  out << "n,h\n";
  for (const auto& [n, h] : entries_) {
    std::snprintf(buf, sizeof(buf), "%.17g", h);
    out << n << "," << buf << "\n";
  }
}

ThresholdTable ThresholdTable::read_csv(std::istream& in) {
  std::string line;
  double alpha = -1.0;
  bool header_seen = false;
  std::map<Index, double> entries;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("alpha=");
      if (pos != std::string::npos) alpha = std::stod(line.substr(pos + 6));
      continue;
    }
    if (!header_seen) {
      if (line != "n,h") {
        raise(ErrorCode::MalformedHeader, "expected 'n,h' header, got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      raise(ErrorCode::BadRow, "line " + std::to_string(line_no) + ": missing comma");
    }
    try {
      Index n = static_cast<Index>(std::stoll(line.substr(0, comma)));
      double h = std::stod(line.substr(comma + 1));
      entries[n] = h;
    } catch (const std::exception&) {
      raise(ErrorCode::BadRow, "line " + std::to_string(line_no) + ": unparseable entry");
    }
  }
  if (alpha <= 0.0) {
    raise(ErrorCode::MalformedHeader, "missing '# alpha=<value>' comment line");
  }
  return ThresholdTable(std::move(entries), alpha);
}

double calibrate_threshold(Index n, double alpha, int num_sims, std::uint64_t seed,
                           Index min_segment, int num_threads) {
  if (num_sims < 1) raise(ErrorCode::InsufficientSims, "num_sims must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) raise(ErrorCode::InvalidParams, "alpha must be in (0,1)");
  if (n < 2 * min_segment) {
    raise(ErrorCode::SeriesTooShort,
          "n must be at least 2 * min_segment = " + std::to_string(2 * min_segment));
  }

  std::vector<double> stats(static_cast<std::size_t>(num_sims));
  parallel_for(0, num_sims, num_threads, [&](long i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Vector x(n);
    for (Index t = 0; t < n; ++t) x[t] = rng.standard_normal();
    stats[static_cast<std::size_t>(i)] = max_mood_statistic(x, min_segment).m_max;
  });

  std::sort(stats.begin(), stats.end());
  // Nearest-rank upper quantile.
  double q = 1.0 - alpha;
  std::size_t idx = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(num_sims)));
  if (idx < 1) idx = 1;
  if (idx > stats.size()) idx = stats.size();
  return stats[idx - 1];
}

namespace {

void npcpm_recursive(const Eigen::Ref<const Vector>& r, const ThresholdTable& table,
                     const NpcpmConfig& cfg, Index offset, std::vector<Index>& out) {
  Index n = r.size();
  if (n < 2 * cfg.min_segment || n < table.min_length()) return;
  MaxMoodResult res = max_mood_statistic(r, cfg.min_segment, false, cfg.tie);
  if (!(res.m_max > table.lookup(n))) return;
  Index split = res.tau_hat;
  if (split < 1 || split >= n) return;
  npcpm_recursive(r.head(split), table, cfg, offset, out);
  out.push_back(offset + split);
  npcpm_recursive(r.tail(n - split), table, cfg, offset + split, out);
}

}  // namespace

Segmentation npcpm_segment(const Eigen::Ref<const Vector>& r,
                           const ThresholdTable& table, const NpcpmConfig& cfg) {
  Segmentation seg;
  seg.n = r.size();
  if (cfg.median_center) {
    std::vector<double> sorted(r.data(), r.data() + r.size());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    double median = sorted[sorted.size() / 2];
    if (sorted.size() % 2 == 0) {
      auto lower_half_max = std::max_element(sorted.begin(), sorted.begin() + sorted.size() / 2);
      median = 0.5 * (median + *lower_half_max);
    }
    Vector centered = r.array() - median;
    npcpm_recursive(centered, table, cfg, 0, seg.change_points);
  } else {
    npcpm_recursive(r, table, cfg, 0, seg.change_points);
  }
  seg.validate();
  return seg;
}

}  // namespace volseg
