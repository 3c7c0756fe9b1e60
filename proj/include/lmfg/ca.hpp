// Synchronous cellular-automaton dynamics of binary learning agents.
//
// The update rule is sigma_i' = -sign(sigma_i * I_i + h_i), where the
// rescaled impact I_i sums persuasive influence from disagreeing
// neighbours against supportive influence from agreeing ones, plus the
// agent's own beta-weighted self-support. A zero sign argument keeps the
// current state. All agents update in parallel from the frozen time-t
// state, so the dynamics admits 2-cycles.

#pragma once

#include "lmfg/lattice.hpp"
#include "lmfg/rng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace lmfg {

struct AgentSystem {
    std::vector<std::int8_t> sigma; // each entry in {-1, +1}
    const Geometry* geometry = nullptr;
    const StrengthField* strengths = nullptr;
    long t = 0;

    int size() const { return static_cast<int>(sigma.size()); }
};

enum class NoiseKind { none, site, uniform_global };
enum class NoiseDist { gaussian, uniform };

struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    NoiseDist dist = NoiseDist::gaussian;
    double amplitude = 0.0;
    std::uint64_t seed = 0;

    // Noise acting on agent i at step t. Counter-based: the draw depends
    // only on (seed, t, i), never on evaluation order.
    double draw(long t, int i) const {
        if (kind == NoiseKind::none || amplitude == 0.0) return 0.0;
        CounterRng rng{seed};
        std::uint64_t site = kind == NoiseKind::uniform_global
                                 ? 0
                                 : static_cast<std::uint64_t>(i) + 1;
        std::uint64_t step = static_cast<std::uint64_t>(t);
        if (dist == NoiseDist::gaussian) return amplitude * rng.gaussian(step, site);
        return amplitude * rng.uniform_sym(step, site);
    }
};

// Rescaled learning impact I_i on agent i, including the 2*beta*s_i/norm
// self-support contribution.
double impact(const AgentSystem& sys, int i);

// One synchronous step; returns the number of flipped agents.
long step_sync(AgentSystem& sys, const NoiseModel& noise, int threads = 1);

// Local mean-field quantities (m_i, a_i): weighted majority-minority
// difference and effective self-supportiveness.
std::pair<double, double> mean_field_locals(const AgentSystem& sys, int i);

// Noise-free mean-field update: majority wins when |m_i| > |a_i|,
// otherwise self-support keeps (or flips, for a_i < 0) the state.
long mean_field_step(AgentSystem& sys, int threads = 1);

double magnetization(const AgentSystem& sys);

enum class RunEnd { completed, fixed_point, two_cycle };

struct Trajectory {
    std::vector<double> m;    // m[t] for t = 0..steps_run
    std::vector<long> flips;  // flips[t-1] for step t
    std::vector<std::pair<long, std::vector<std::int8_t>>> snapshots;
    RunEnd end = RunEnd::completed;
    long steps_run = 0;
};

// Runs up to `steps` synchronous updates. With noise off, stops early at
// a fixed point or a 2-cycle and records which. snapshot_every = 0
// disables snapshots; otherwise states at t = 0, k, 2k, ... are stored.
Trajectory run(AgentSystem& sys, const NoiseModel& noise, long steps,
               long snapshot_every = 0, int threads = 1);

enum class InitClass { uniform, mixed, critical };
enum class InitLayout { random, clustered };

struct InitSpec {
    InitClass cls = InitClass::uniform;
    int sign = +1;        // uniform
    double m0 = 0.0;      // mixed
    InitLayout layout = InitLayout::random;
};

std::vector<std::int8_t> make_initial(const InitSpec& spec, const Geometry& geom,
                                      std::uint64_t seed);

} // namespace lmfg
