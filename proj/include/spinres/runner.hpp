#pragma once

#include <string>

#include "spinres/config.hpp"

namespace spinres::runner {

struct RunResult {
  std::string report_json;  // serialized RunReport (deterministic part)
  int artifacts_written = 0;
};

// Executes the scenario and writes report.json plus the mode's CSV artifacts
// into out_dir (created if missing). Identical configs produce byte-identical
// reports except for the "timestamps" object.
RunResult run(const config::ScenarioConfig& config, const std::string& out_dir);

}  // namespace spinres::runner
