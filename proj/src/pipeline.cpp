#include "volseg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace volseg {

const char* to_string(Detector d) {
  switch (d) {
    case Detector::None: return "none";
    case Detector::Icss: return "icss";
    case Detector::Npcpm: return "npcpm";
    case Detector::GIcss: return "gicss";
    case Detector::GNpcpm: return "gnpcpm";
  }
  return "none";
}

const char* to_string(RegimeModel m) {
  switch (m) {
    case RegimeModel::Plain: return "garch";
    case RegimeModel::Omega: return "omega-garch";
    case RegimeModel::AlphaBetaOmega: return "abo-garch";
  }
  return "garch";
}

std::optional<Detector> detector_from_string(const std::string& name) {
  if (name == "none") return Detector::None;
  if (name == "icss") return Detector::Icss;
  if (name == "npcpm") return Detector::Npcpm;
  if (name == "gicss") return Detector::GIcss;
  if (name == "gnpcpm") return Detector::GNpcpm;
  return std::nullopt;
}

std::vector<double> regime_volatility(const Eigen::Ref<const Vector>& r,
                                      const Segmentation& seg) {
  seg.validate();
  if (seg.n != r.size()) {
    raise(ErrorCode::LengthMismatch, "segmentation length does not match series");
  }
  std::vector<double> vols;
  for (Index j = 0; j < seg.regime_count(); ++j) {
    auto [lo, hi] = seg.regime_bounds(j);
    if (hi - lo < 2) {
      raise(ErrorCode::RegimeTooShort,
            "regime " + std::to_string(j) + " has fewer than 2 observations");
    }
    vols.push_back(sample_std_dev(r.segment(lo, hi - lo)));
  }
  return vols;
}

namespace {

// Removes change points whose regime is below the fitting minimum, folding
// the short regime into the shorter of its neighbors.
Segmentation merge_short_regimes(const Segmentation& seg, Index min_len,
                                 std::vector<Index>& removed) {
  Segmentation out = seg;
  for (;;) {
    if (out.change_points.empty()) break;
    Index worst = -1;
    Index worst_len = min_len;
    for (Index j = 0; j < out.regime_count(); ++j) {
      auto [lo, hi] = out.regime_bounds(j);
      if (hi - lo < worst_len) {
        worst_len = hi - lo;
        worst = j;
      }
    }
    if (worst < 0) break;
    // Merge with the shorter adjacent neighbor; earlier neighbor on ties.
    Index left_len = -1;
    Index right_len = -1;
    if (worst > 0) {
      auto [lo, hi] = out.regime_bounds(worst - 1);
      left_len = hi - lo;
    }
    if (worst + 1 < out.regime_count()) {
      auto [lo, hi] = out.regime_bounds(worst + 1);
      right_len = hi - lo;
    }
    bool merge_left;
    if (left_len < 0) {
      merge_left = false;
    } else if (right_len < 0) {
      merge_left = true;
    } else {
      merge_left = left_len <= right_len;
    }
    std::size_t cp_index =
        merge_left ? static_cast<std::size_t>(worst - 1) : static_cast<std::size_t>(worst);
    removed.push_back(out.change_points[cp_index]);
    out.change_points.erase(out.change_points.begin() +
                            static_cast<std::ptrdiff_t>(cp_index));
  }
  std::sort(removed.begin(), removed.end());
  return out;
}

Segmentation detect(const Eigen::Ref<const Vector>& x, Detector detector,
                    const PipelineConfig& cfg) {
  switch (detector) {
    case Detector::Icss:
    case Detector::GIcss:
      return icss_segment(x, cfg.icss);
    case Detector::Npcpm:
    case Detector::GNpcpm:
      return npcpm_segment(x, cfg.table, cfg.npcpm);
    case Detector::None: {
      Segmentation seg;
      seg.n = x.size();
      return seg;
    }
  }
  raise(ErrorCode::InvalidParams, "unknown detector");
}

FitResult fit_model(const Eigen::Ref<const Vector>& r, const Segmentation& seg,
                    RegimeModel model, Distribution dist, const PipelineConfig& cfg) {
  switch (model) {
    case RegimeModel::Plain: return fit_garch(r, dist, cfg.fit);
    case RegimeModel::Omega: return fit_omega_garch(r, seg, dist, cfg.fit);
    case RegimeModel::AlphaBetaOmega: return fit_abo_garch(r, seg, dist, cfg.fit);
  }
  raise(ErrorCode::InvalidParams, "unknown model");
}

PipelineResult assemble(const Eigen::Ref<const Vector>& r, Detector detector,
                        const Segmentation& raw_seg, RegimeModel model,
                        Distribution dist, const PipelineConfig& cfg,
                        std::optional<FitResult> stage1) {
  PipelineResult out;
  out.detector = detector;
  out.segmentation = merge_short_regimes(raw_seg, cfg.fit.min_obs, out.merged_change_points);
  try {
    out.fit = fit_model(r, out.segmentation, model, dist, cfg);
  } catch (const Error& e) {
    raise(e.code(), std::string("fitting stage: ") + e.what());
  }
  out.regime_vols = regime_volatility(r, out.segmentation);
  out.stage1_fit = std::move(stage1);
  return out;
}

}  // namespace

PipelineResult run_two_stage(const Eigen::Ref<const Vector>& r, Detector detector,
                             RegimeModel model, Distribution dist,
                             const PipelineConfig& cfg) {
  if (detector == Detector::GIcss || detector == Detector::GNpcpm) {
    return run_three_stage(r, detector, model, dist, cfg);
  }
  Segmentation seg;
  try {
    seg = detect(r, detector, cfg);
  } catch (const Error& e) {
    raise(e.code(), std::string("detection stage: ") + e.what());
  }
  return assemble(r, detector, seg, model, dist, cfg, std::nullopt);
}

PipelineResult run_three_stage(const Eigen::Ref<const Vector>& r, Detector detector,
                               RegimeModel model, Distribution dist,
                               const PipelineConfig& cfg) {
  if (detector != Detector::GIcss && detector != Detector::GNpcpm) {
    raise(ErrorCode::InvalidParams, "three-stage run needs a gicss or gnpcpm detector");
  }
  // Standardization always comes from the Gaussian single-regime fit, no
  // matter which error distribution the final model uses.
  FitResult stage1 = fit_garch(r, Distribution::Gaussian, cfg.fit);
  Vector residuals = (r.array() / stage1.variance_path.array().sqrt()).matrix();
  Segmentation seg;
  try {
    seg = detect(residuals, detector, cfg);
  } catch (const Error& e) {
    raise(e.code(), std::string("residual detection stage: ") + e.what());
  }
  return assemble(r, detector, seg, model, dist, cfg, std::move(stage1));
}

PipelineResult run_with_segmentation(const Eigen::Ref<const Vector>& r,
                                     const Segmentation& seg, RegimeModel model,
                                     Distribution dist, const PipelineConfig& cfg) {
  return assemble(r, Detector::None, seg, model, dist, cfg, std::nullopt);
}

ComparisonTable compare_models(const Eigen::Ref<const Vector>& r,
                               const PipelineConfig& cfg) {
  ComparisonTable table;
  table.n = r.size();

  struct Cell {
    bool ok = false;
    std::string error;
    Segmentation seg;
  };
  auto detect_cell = [&](Detector d, const Eigen::Ref<const Vector>& x) {
    Cell c;
    try {
      c.seg = detect(x, d, cfg);
      c.ok = true;
    } catch (const Error& e) {
      c.error = e.what();
    }
    return c;
  };

  Cell seg_icss = detect_cell(Detector::Icss, r);
  Cell seg_npcpm = detect_cell(Detector::Npcpm, r);

  // Shared stage-1 standardization for the residual detectors.
  Cell seg_gicss, seg_gnpcpm;
  std::string stage1_error;
  try {
    FitResult stage1 = fit_garch(r, Distribution::Gaussian, cfg.fit);
    Vector residuals = (r.array() / stage1.variance_path.array().sqrt()).matrix();
    seg_gicss = detect_cell(Detector::GIcss, residuals);
    seg_gnpcpm = detect_cell(Detector::GNpcpm, residuals);
  } catch (const Error& e) {
    stage1_error = e.what();
    seg_gicss.error = stage1_error;
    seg_gnpcpm.error = stage1_error;
  }

  auto cell_for = [&](Detector d) -> const Cell& {
    switch (d) {
      case Detector::Icss: return seg_icss;
      case Detector::Npcpm: return seg_npcpm;
      case Detector::GIcss: return seg_gicss;
      case Detector::GNpcpm: return seg_gnpcpm;
      default: return seg_icss;
    }
  };

  auto add_row = [&](RegimeModel model, Detector detector, Distribution dist) {
    ComparisonRow row;
    row.model = model;
    row.detector = detector;
    row.distribution = dist;
    row.label = std::string(to_string(model)) + ", " + to_string(detector) + ", " +
                to_string(dist);
    try {
      PipelineResult res;
      if (detector == Detector::None) {
        res = run_with_segmentation(r, Segmentation{{}, r.size()}, model, dist, cfg);
      } else {
        const Cell& cell = cell_for(detector);
        if (!cell.ok) raise(ErrorCode::InvalidParams, "detection failed: " + cell.error);
        res = assemble(r, detector, cell.seg, model, dist, cfg, std::nullopt);
      }
      row.ok = true;
      row.log_lik = res.fit.log_lik;
      row.aic = res.fit.aic;
      row.bic = res.fit.bic;
      row.k = res.fit.k;
      row.n_change_points = static_cast<Index>(res.segmentation.change_points.size());
      row.converged = res.fit.converged;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  };

  const Distribution dists[] = {Distribution::Gaussian, Distribution::StudentT};
  const Detector detectors[] = {Detector::Icss, Detector::Npcpm, Detector::GIcss,
                                Detector::GNpcpm};
  for (Distribution dist : dists) add_row(RegimeModel::Plain, Detector::None, dist);
  for (RegimeModel model : {RegimeModel::Omega, RegimeModel::AlphaBetaOmega}) {
    for (Detector detector : detectors) {
      for (Distribution dist : dists) add_row(model, detector, dist);
    }
  }

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const ComparisonRow& row = table.rows[i];
    if (!row.ok) continue;
    if (table.best_aic < 0 || row.aic < table.rows[static_cast<std::size_t>(table.best_aic)].aic) {
      table.best_aic = static_cast<int>(i);
    }
    if (table.best_bic < 0 || row.bic < table.rows[static_cast<std::size_t>(table.best_bic)].bic) {
      table.best_bic = static_cast<int>(i);
    }
  }
  return table;
}

std::string format_comparison(const ComparisonTable& table) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-34s %6s %4s %12s %12s %12s\n", "model", "cps", "k",
                "logL", "AIC", "BIC");
  out << buf;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const ComparisonRow& row = table.rows[i];
    if (!row.ok) {
      std::snprintf(buf, sizeof(buf), "%-34s failed: %s\n", row.label.c_str(),
                    row.error.c_str());
      out << buf;
      continue;
    }
    std::string marks;
    if (static_cast<int>(i) == table.best_aic) marks += " *AIC";
    if (static_cast<int>(i) == table.best_bic) marks += " *BIC";
    std::snprintf(buf, sizeof(buf), "%-34s %6lld %4d %12.2f %12.2f %12.2f%s\n",
                  row.label.c_str(), static_cast<long long>(row.n_change_points), row.k,
                  row.log_lik, row.aic, row.bic, marks.c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace volseg
