#pragma once

#include <json.hpp>
#include <string>

#include "mbm/config.hpp"
#include "mbm/grid.hpp"

namespace mbm {

struct PipelineOutput {
  std::string csv;
  nlohmann::json report;
};

// Runs the configured pipeline without touching the filesystem.
PipelineOutput run_pipeline(const ExperimentConfig& cfg);

// Writes <out>/<command>.csv and <out>/<command>.json; returns the two paths.
std::pair<std::string, std::string> run_experiment(const ExperimentConfig& cfg);

// Raw Weierstrass sum  sum_n lambda^(-n h) cos(lambda^n t).
Samples weierstrass_graph(const TimeGrid& grid, double h, double lambda);

}  // namespace mbm
