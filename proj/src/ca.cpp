#include "lmfg/ca.hpp"

#include "lmfg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lmfg {

namespace {

void check_consistent(const AgentSystem& sys) {
    if (!sys.geometry || !sys.strengths)
        throw std::invalid_argument("AgentSystem: geometry/strengths not set");
    if (sys.geometry->size() != sys.size() || sys.strengths->size() != sys.size())
        throw std::invalid_argument("AgentSystem: size mismatch");
}

} // namespace

double impact(const AgentSystem& sys, int i) {
    const auto& st = *sys.strengths;
    const double si = sys.sigma[i];
    double acc = 0.0;
    for (const Neighbor& nb : sys.geometry->neighbors[i]) {
        double prod = si * sys.sigma[nb.index];
        acc += (st.p[nb.index] * (1.0 - prod) - st.s[nb.index] * (1.0 + prod)) * nb.weight;
    }
    // j = i term of the impact sum: weight 1/g(0) = beta, only the
    // supportive part survives since sigma_i*sigma_i = 1.
    acc -= 2.0 * st.beta * st.s[i];
    return acc / st.norm;
}

long step_sync(AgentSystem& sys, const NoiseModel& noise, int threads) {
    check_consistent(sys);
    const int n = sys.size();
    std::vector<std::int8_t> next(n);
    parallel_for(n, threads, [&](std::size_t i) {
        // sigma' = -sign(sigma_i * I_i + h_i); a zero argument keeps the state
        double arg = sys.sigma[i] * impact(sys, static_cast<int>(i)) +
                     noise.draw(sys.t, static_cast<int>(i));
        if (arg > 0.0)
            next[i] = static_cast<std::int8_t>(-1);
        else if (arg < 0.0)
            next[i] = static_cast<std::int8_t>(+1);
        else
            next[i] = sys.sigma[i];
    });
    long flips = 0;
    for (int i = 0; i < n; ++i)
        if (next[i] != sys.sigma[i]) ++flips;
    sys.sigma.swap(next);
    ++sys.t;
    return flips;
}

std::pair<double, double> mean_field_locals(const AgentSystem& sys, int i) {
    check_consistent(sys);
    const auto& st = *sys.strengths;
    double m = 0.0;
    for (const Neighbor& nb : sys.geometry->neighbors[i])
        m += (st.s[nb.index] + st.p[nb.index]) * sys.sigma[nb.index] * nb.weight;
    m /= st.norm;
    const int n = sys.size();
    double mp = std::accumulate(st.p.begin(), st.p.end(), 0.0) / n;
    double ms = std::accumulate(st.s.begin(), st.s.end(), 0.0) / n;
    double a = (ms - mp) / st.norm + st.beta * st.s[i] / st.norm;
    return {m, a};
}

long mean_field_step(AgentSystem& sys, int threads) {
    check_consistent(sys);
    const int n = sys.size();
    std::vector<std::int8_t> next(n);
    parallel_for(n, threads, [&](std::size_t i) {
        auto [m, a] = mean_field_locals(sys, static_cast<int>(i));
        double am = std::fabs(m), aa = std::fabs(a);
        if (am > aa)
            next[i] = static_cast<std::int8_t>(m > 0.0 ? +1 : -1);
        else if (aa > am)
            next[i] = static_cast<std::int8_t>(a > 0.0 ? sys.sigma[i] : -sys.sigma[i]);
        else
            next[i] = sys.sigma[i]; // |m| = |a| tie keeps the state
    });
    long flips = 0;
    for (int i = 0; i < n; ++i)
        if (next[i] != sys.sigma[i]) ++flips;
    sys.sigma.swap(next);
    ++sys.t;
    return flips;
}

double magnetization(const AgentSystem& sys) {
    if (sys.size() < 1) throw std::invalid_argument("magnetization: empty system");
    long sum = 0;
    for (auto s : sys.sigma) sum += s;
    return static_cast<double>(sum) / sys.size();
}

Trajectory run(AgentSystem& sys, const NoiseModel& noise, long steps,
               long snapshot_every, int threads) {
    if (steps < 0) throw std::invalid_argument("run: steps must be >= 0");
    check_consistent(sys);
    Trajectory traj;
    traj.m.push_back(magnetization(sys));
    if (snapshot_every > 0) traj.snapshots.emplace_back(0, sys.sigma);

    const bool detect = noise.kind == NoiseKind::none || noise.amplitude == 0.0;
    std::vector<std::int8_t> prev; // state at t-1, for 2-cycle detection
    for (long t = 1; t <= steps; ++t) {
        std::vector<std::int8_t> cur = sys.sigma;
        long flips = step_sync(sys, noise, threads);
        traj.m.push_back(magnetization(sys));
        traj.flips.push_back(flips);
        if (snapshot_every > 0 && t % snapshot_every == 0)
            traj.snapshots.emplace_back(t, sys.sigma);
        traj.steps_run = t;
        if (detect) {
            if (sys.sigma == cur) {
                traj.end = RunEnd::fixed_point;
                return traj;
            }
            if (!prev.empty() && sys.sigma == prev) {
                traj.end = RunEnd::two_cycle;
                return traj;
            }
        }
        prev.swap(cur);
    }
    traj.end = RunEnd::completed;
    traj.steps_run = steps;
    return traj;
}

std::vector<std::int8_t> make_initial(const InitSpec& spec, const Geometry& geom,
                                      std::uint64_t seed) {
    const int n = geom.size();
    std::vector<std::int8_t> sigma(n);
    switch (spec.cls) {
        case InitClass::uniform: {
            if (spec.sign != 1 && spec.sign != -1)
                throw std::invalid_argument("make_initial: uniform sign must be +-1");
            std::fill(sigma.begin(), sigma.end(), static_cast<std::int8_t>(spec.sign));
            return sigma;
        }
        case InitClass::critical: {
            for (int i = 0; i < n; ++i)
                sigma[i] = to_unit(counter_hash(seed, 0, i)) < 0.5
                               ? static_cast<std::int8_t>(-1)
                               : static_cast<std::int8_t>(+1);
            return sigma;
        }
        case InitClass::mixed: break;
    }
    if (spec.m0 < -1.0 || spec.m0 > 1.0)
        throw std::invalid_argument("make_initial: m0 must lie in [-1, 1]");
    const int majority = spec.m0 >= 0.0 ? +1 : -1;
    if (spec.layout == InitLayout::random) {
        double p_plus = (1.0 + spec.m0) / 2.0;
        for (int i = 0; i < n; ++i)
            sigma[i] = to_unit(counter_hash(seed, 0, i)) < p_plus
                           ? static_cast<std::int8_t>(+1)
                           : static_cast<std::int8_t>(-1);
        return sigma;
    }
    // clustered: one compact minority block realizing m0 as closely as
    // the lattice allows
    if (!geom.spatial())
        throw std::invalid_argument("make_initial: clustered layout requires a spatial geometry");
    long k = std::lround(n * (1.0 - std::fabs(spec.m0)) / 2.0); // minority count
    std::fill(sigma.begin(), sigma.end(), static_cast<std::int8_t>(majority));
    // cells ordered by Chebyshev distance from the lattice centre form a
    // growing square block
    std::vector<int> center(geom.dims.size());
    for (std::size_t a = 0; a < geom.dims.size(); ++a) center[a] = geom.dims[a] / 2;
    std::vector<std::pair<long, int>> order(n);
    for (int i = 0; i < n; ++i) {
        long cheb = 0;
        for (std::size_t a = 0; a < geom.dims.size(); ++a) {
            long d = std::lround(std::fabs(geom.positions[i][a] - center[a]));
            if (geom.boundary == Boundary::periodic)
                d = std::min(d, geom.dims[a] - d);
            cheb = std::max(cheb, d);
        }
        order[i] = {cheb, i};
    }
    std::sort(order.begin(), order.end());
    for (long c = 0; c < k && c < n; ++c)
        sigma[order[c].second] = static_cast<std::int8_t>(-majority);
    return sigma;
}

} // namespace lmfg
