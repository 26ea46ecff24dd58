#pragma once

#include "volseg/pipeline.hpp"
#include "volseg/series.hpp"
#include "volseg/simulation.hpp"

#include <json.hpp>

#include <string>

namespace volseg {

nlohmann::json to_json(const SummaryStats& stats);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const ComparisonTable& table);
nlohmann::json to_json(const ExperimentReport& report);
nlohmann::json to_json(const RegimeSpec& spec);

RegimeSpec regime_spec_from_json(const nlohmann::json& j);

// Detection output of the CLI: indices plus dates when labels are known.
nlohmann::json detection_to_json(Detector detector, const Segmentation& seg,
                                 const std::vector<std::string>& labels);

// `index,date,return,is_change_point` rows for external plotting.
std::string detection_plot_csv(const ReturnSeries& r, const Segmentation& seg);

std::string location_histogram_csv(const ExperimentReport& report);

}  // namespace volseg
