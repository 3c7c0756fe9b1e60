// Experiment configuration: a flat `key = value` file with dotted section
// prefixes. Unknown keys are hard errors; defaults are materialized and
// echoed into the output directory so every run is reproducible from the
// echo alone.

#pragma once

#include "lmfg/ca.hpp"
#include "lmfg/field.hpp"
#include "lmfg/lattice.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmfg {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Mode { ca, pde, analyze, consensus, sweep };

std::string to_string(Mode m);

// Construction recipe for the strength field f on a grid.
struct StrengthFieldSpec {
    enum class Kind { constant, iid_uniform, linear, smooth_random, disk };
    Kind kind = Kind::constant;
    double value = 1.5;            // constant / disk outside value
    double lo = 0.5, hi = 1.5;     // iid_uniform / smooth_random range
    double offset = 1.0, slope = 0.5; // linear along axis 0, x centred
    int smooth_passes = 10;
    double disk_radius = 4.0;      // disk kind
    double inside_value = 0.5;     // disk kind: f inside the disk
};

// Initial condition for the field v.
struct FieldInitSpec {
    enum class Kind { constant, random, tf_positive, tf_random, disk };
    Kind kind = Kind::random;
    double value = 0.0;        // constant
    double lo = -1.0, hi = 1.0; // random
    double disk_radius = 4.0;  // disk: reversed-branch disk in a TF background
};

struct ExperimentConfig {
    Mode mode = Mode::ca;

    // ca / consensus
    GeometrySpec geometry;
    DisorderSpec disorder;
    InitSpec init;
    NoiseKind noise_kind = NoiseKind::none;
    NoiseDist noise_dist = NoiseDist::gaussian;
    double noise_amplitude = 0.0;
    long steps = 100;
    long snapshot_every = 0;

    // pde
    std::vector<int> field_dims;
    double field_dx = 1.0;
    Boundary field_boundary = Boundary::periodic;
    double gamma = 1.0;
    double alpha = 0.0;
    double dt = 0.0; // 0 = auto: half the stability bound of the initial state
    double t_end = 10.0;
    double conv_tol = 1e-8;
    long record_every = 1;
    StrengthFieldSpec strength;
    FieldInitSpec field_init;

    // seeds
    std::uint64_t seed_disorder = 1;
    std::uint64_t seed_noise = 2;
    std::uint64_t seed_init = 3;
    std::uint64_t seed_field = 4;

    // analysis thresholds
    double eta_dense = 1.0;
    double eta_sparse = 10.0;

    // consensus
    std::string predictions_path;
    long max_steps = 1000;

    // analyze inputs (raster paths)
    std::string analyze_f;
    std::string analyze_state;

    // sweep
    Mode sweep_target = Mode::ca;
    std::vector<std::string> sweep_axes;
    std::map<std::string, std::vector<double>> sweep_values;

    NoiseModel noise_model() const {
        return NoiseModel{noise_kind, noise_dist, noise_amplitude, seed_noise};
    }
};

using KeyValueMap = std::map<std::string, std::string>;

// Reads the flat key = value file; `#` starts a comment. Errors name the
// offending line.
KeyValueMap read_config_file(const std::string& path);

// Validates and materializes a config from raw key-value pairs. Unknown
// keys, type mismatches and constraint violations raise ConfigError
// naming the key.
ExperimentConfig parse_config_map(const KeyValueMap& raw);

ExperimentConfig parse_config(const std::string& path);

// The fully-materialized `key = value` echo of a config (defaults
// included), suitable for re-parsing.
std::string resolved_config_text(const ExperimentConfig& cfg);

// Applies a --seed-override K=V (K in disorder|noise|init|field).
void apply_seed_override(ExperimentConfig& cfg, const std::string& kv);

// Builds the strength field and initial v on a grid per the config.
FieldGrid build_field_grid(const ExperimentConfig& cfg);

} // namespace lmfg
