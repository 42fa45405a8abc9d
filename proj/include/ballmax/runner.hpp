#pragma once

#include <string>
#include <vector>

#include "ballmax/config.hpp"
#include "ballmax/stability.hpp"

namespace ballmax {

// One generated competitor of a sweep, in config order.
struct CompetitorRow {
  std::string sweep;
  PerturbationSpec spec;
  StabilityReport report;
};

struct ExperimentResult {
  // 0 all enabled checks pass; 2 invalid config; 3 hypothesis failure;
  // 4 chain or displacement inequality violated beyond tolerance.
  int status = 0;
  std::string summary;  // contents of summary.txt (or diagnostics on status 2)
  HypothesisReport hypotheses;
  std::vector<CompetitorRow> rows;
};

// Runs the experiment and writes hypotheses.csv, chain.csv, stability.csv and
// summary.txt into out_dir (created if missing). Reruns with the same config
// produce byte-identical files. On invalid config nothing is written.
ExperimentResult run_experiment(const Config& cfg, const std::string& out_dir);

}  // namespace ballmax
