#pragma once

#include <filesystem>
#include <string>

#include "cfie/config.hpp"
#include "cfie/spectral.hpp"

namespace cfie {

constexpr const char* kVersion = "0.4.0";

struct RunResult {
  SweepTable table;
  std::string manifest;  // JSON text
  int exit_code = 0;     // 0 full success, 2 partial row failures
};

// Coarse mesh named by the config (cube generator or OFF file).
SurfaceMesh config_mesh(const ExperimentConfig& config);

// Runs the configured experiment. With write_files, creates config.out and
// writes results.csv, residuals/row_NNNN.csv and manifest.json.
RunResult run_experiment(const ExperimentConfig& config, bool write_files = true);

}  // namespace cfie
