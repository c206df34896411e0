// Run configuration: a JSON file (all sections optional, defaults mirror the
// reference setup L=100, J=1, gamma=0.01, kBT=0.05) plus dotted-key command
// line overrides.  Unknown keys are rejected.  The effective configuration
// (defaults + file + overrides) is echoed into every run manifest.
#pragma once

#include "gn/protocols.hpp"
#include "gn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gn {

struct PlotSpec {
  std::string kind = "lines"; // "lines" | "heatmap"
  std::string input;          // CSV produced by a previous run
  std::vector<std::string> columns; // line plot: columns to draw (default: scalars found)
  std::string output = "plot.svg";
  bool log_y = true;
};

struct RunConfig {
  std::string command; // scan | steady | quench | pme | qme | validate | plot
  ModelParams model{};
  EvolutionConfig evo = QuenchConfig::default_quench_evolution();
  SteadySolveOptions steady{};
  std::uint64_t seed = 1;
  int workers = 0; // 0 = GN_WORKERS env or hardware
  int nu_max = 10;
  std::string output_dir = "runs/out";

  QuenchConfig quench{};
  ScanConfig scan{};
  PmeConfig pme{};
  QmeConfig qme{};
  PlotSpec plot{};

  std::string effective_json; // serialized effective configuration
};

// Load `path` (empty = all defaults), apply `overrides` ("a.b.c=value", value
// parsed as JSON when possible, else taken as a string), then map onto typed
// configuration for `command`.  Protocol sections carry paper defaults:
// quench (0.5,1.1)->(0.8,1.1); scan classifies the four reference points;
// pme S=(0.5,1.1), A=(0.8,1.1), F=(0.5,0.9) switching at t=960; qme targets
// (0.5,0.9) from the four reference copies.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      const std::string& command);

} // namespace gn
