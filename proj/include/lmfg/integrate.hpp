// Consensus front end: maps an ensemble of external binary predictions
// with quality scores onto an agent system, relaxes it to a stationary
// state with the synchronous dynamics, and reports the majority decision
// together with the surviving minority clusters.

#pragma once

#include "lmfg/analysis.hpp"
#include "lmfg/ca.hpp"
#include "lmfg/lattice.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace lmfg {

struct PredictionRecord {
    long agent_id;
    int prediction; // -1 or +1
    double quality; // in (0, 1]
    std::vector<double> position; // optional coordinates
};

struct PredictionSet {
    std::vector<PredictionRecord> records;
    bool has_positions = false;
};

// Reads the predictions CSV (header `agent_id,prediction,quality[,x,y[,z]]`,
// prediction in {-1, 1, yes, no, YES, NO}). Malformed rows, duplicate ids
// and out-of-range qualities are reported with their row numbers.
PredictionSet ingest(std::istream& in);
PredictionSet ingest_file(const std::string& path);

// Owns the geometry and strengths an embedded AgentSystem points into.
struct EmbeddedSystem {
    Geometry geometry;
    StrengthField strengths;
    std::vector<std::int8_t> sigma;

    AgentSystem view() {
        return AgentSystem{sigma, &geometry, &strengths, 0};
    }
};

using QualityMap = std::function<double(double)>;

// Places each prediction on the geometry (by coordinates when provided,
// by ascending agent id otherwise) with sigma = prediction and
// p = s = mapping(quality). Extra sites beyond the record count become
// weak followers: alternating signs with negligible strength.
EmbeddedSystem embed(const PredictionSet& preds, const GeometrySpec& geometry_spec,
                     double beta = 0.0, const QualityMap& mapping = nullptr);

enum class Decision { yes, no, tie };

std::string to_string(Decision d);

struct ConsensusResult {
    Decision decision = Decision::tie;
    double p_yes = 0.5;
    double p_no = 0.5;
    double m_final = 0.0;
    ClusterReport minority; // opposite-sign clusters only
    long minority_agents = 0;
    long steps_to_stationarity = 0;
    bool converged = false;
    bool two_cycle = false;
};

// Relaxes the system to a fixed point / 2-cycle / max_steps and extracts
// the majority decision. A 2-cycle resolves by averaging the two states'
// magnetizations. p_no is computed as 1 - p_yes, so the pair sums to one
// exactly.
ConsensusResult consensus(AgentSystem& system, const NoiseModel& noise,
                          long max_steps, int threads = 1);

} // namespace lmfg
