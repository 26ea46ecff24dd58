#pragma once

#include "volseg/garch.hpp"
#include "volseg/icss.hpp"
#include "volseg/npcpm.hpp"
#include "volseg/series.hpp"

#include <optional>
#include <string>
#include <vector>

namespace volseg {

enum class Detector { None, Icss, Npcpm, GIcss, GNpcpm };
enum class RegimeModel { Plain, Omega, AlphaBetaOmega };

const char* to_string(Detector d);
const char* to_string(RegimeModel m);
std::optional<Detector> detector_from_string(const std::string& name);

struct PipelineConfig {
  IcssConfig icss;
  NpcpmConfig npcpm;
  ThresholdTable table = ThresholdTable::defaults();
  FitOptions fit;
};

struct PipelineResult {
  Detector detector = Detector::None;
  Segmentation segmentation;  // after the short-regime merge
  FitResult fit;
  std::vector<double> regime_vols;
  // Change points removed because their regime was too short to fit.
  std::vector<Index> merged_change_points;
  // Single-regime fit used for residual standardization (GICSS / GNPCPM).
  std::optional<FitResult> stage1_fit;
};

// Detector on the raw returns, short regimes merged into their shorter
// neighbor, then the regime model fitted across the result.
PipelineResult run_two_stage(const Eigen::Ref<const Vector>& r, Detector detector,
                             RegimeModel model, Distribution dist,
                             const PipelineConfig& cfg = {});

// Single-regime Gaussian fit first, detector on the standardized residuals
// y_t = r_t / sqrt(h_t), regime model refitted on the raw returns inside the
// discovered regimes.
PipelineResult run_three_stage(const Eigen::Ref<const Vector>& r, Detector detector,
                               RegimeModel model, Distribution dist,
                               const PipelineConfig& cfg = {});

// Fit with a caller-supplied segmentation, skipping detection entirely.
PipelineResult run_with_segmentation(const Eigen::Ref<const Vector>& r,
                                     const Segmentation& seg, RegimeModel model,
                                     Distribution dist, const PipelineConfig& cfg = {});

struct ComparisonRow {
  std::string label;
  RegimeModel model = RegimeModel::Plain;
  Detector detector = Detector::None;
  Distribution distribution = Distribution::Gaussian;
  bool ok = false;
  std::string error;
  double log_lik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int k = 0;
  Index n_change_points = 0;
  bool converged = false;
};

struct ComparisonTable {
  Index n = 0;
  std::vector<ComparisonRow> rows;
  int best_aic = -1;  // indices of the minimal rows among those that fitted
  int best_bic = -1;
};

// Full grid: plain GARCH plus {omega, abo} x {icss, npcpm, gicss, gnpcpm},
// each under Gaussian and Student-t errors. Failed rows stay in the table
// with their error recorded.
ComparisonTable compare_models(const Eigen::Ref<const Vector>& r,
                               const PipelineConfig& cfg = {});

// Per-regime sample standard deviation of the raw returns.
std::vector<double> regime_volatility(const Eigen::Ref<const Vector>& r,
                                      const Segmentation& seg);

// Aligned plain-text rendering of the comparison grid.
std::string format_comparison(const ComparisonTable& table);

}  // namespace volseg
