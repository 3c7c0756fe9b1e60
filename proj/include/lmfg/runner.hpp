// Experiment execution: dispatches a parsed config to the CA, PDE,
// analysis or consensus pipeline, fans out parameter sweeps, and writes
// every artifact plus a checksum manifest into the output directory.

#pragma once

#include "lmfg/config.hpp"

#include <optional>
#include <string>

namespace lmfg {

// Per-run reduction used by sweeps and reported in summary.csv.
struct PointSummary {
    double m_final = 0.0;
    double eta = 0.0;
    std::string phase;
    double P_tot = 0.0;
    long n_clusters = 0;
    std::string status = "ok";
};

// Runs one experiment into out_dir (created if missing). Writes
// config_resolved.cfg, the mode's artifacts, and manifest.csv.
PointSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                            int threads = 1);

} // namespace lmfg
