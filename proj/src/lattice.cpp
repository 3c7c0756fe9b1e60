#include "lmfg/lattice.hpp"

#include "lmfg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lmfg {

namespace {

long long total_cells(const std::vector<int>& dims) {
    long long n = 1;
    for (int d : dims) n *= d;
    return n;
}

// row-major index <-> coordinates
std::vector<int> unravel(long long idx, const std::vector<int>& dims) {
    std::vector<int> c(dims.size());
    for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
        c[a] = static_cast<int>(idx % dims[a]);
        idx /= dims[a];
    }
    return c;
}

Geometry build_euclidean(const GeometrySpec& spec) {
    if (spec.dims.empty())
        throw std::invalid_argument("euclidean_lattice: dims must be non-empty");
    for (int d : spec.dims)
        if (d <= 0) throw std::invalid_argument("euclidean_lattice: zero-sized lattice");
    if (spec.radius <= 0.0)
        throw std::invalid_argument("euclidean_lattice: R must be positive");
    if (spec.coupling <= 0.0)
        throw std::invalid_argument("euclidean_lattice: coupling g must be positive");
    int min_dim = *std::min_element(spec.dims.begin(), spec.dims.end());
    if (spec.boundary == Boundary::periodic && spec.radius >= 0.5 * min_dim)
        throw std::invalid_argument(
            "euclidean_lattice: R >= half the smallest periodic axis; "
            "neighborhood would wrap onto itself");

    long long n = total_cells(spec.dims);
    int rmax = static_cast<int>(std::floor(spec.radius));
    int na = static_cast<int>(spec.dims.size());

    // enumerate integer offsets with 0 < |delta| < R
    std::vector<std::vector<int>> offsets;
    std::vector<int> off(na, -rmax);
    while (true) {
        double d2 = 0.0;
        bool zero = true;
        for (int a = 0; a < na; ++a) {
            d2 += static_cast<double>(off[a]) * off[a];
            if (off[a] != 0) zero = false;
        }
        if (!zero && d2 < spec.radius * spec.radius) offsets.push_back(off);
        int a = na - 1;
        while (a >= 0 && ++off[a] > rmax) off[a--] = -rmax;
        if (a < 0) break;
    }

    Geometry g;
    g.kind = GeometryKind::euclidean_lattice;
    g.boundary = spec.boundary;
    g.dims = spec.dims;
    g.radius = spec.radius;
    g.neighbors.resize(n);
    g.positions.resize(n);
    double w = 1.0 / spec.coupling;
    for (long long i = 0; i < n; ++i) {
        auto c = unravel(i, spec.dims);
        g.positions[i].assign(c.begin(), c.end());
        for (const auto& o : offsets) {
            long long j = 0;
            bool ok = true;
            for (int a = 0; a < na; ++a) {
                int x = c[a] + o[a];
                if (spec.boundary == Boundary::periodic) {
                    x = ((x % spec.dims[a]) + spec.dims[a]) % spec.dims[a];
                } else if (x < 0 || x >= spec.dims[a]) {
                    ok = false;
                    break;
                }
                j = j * spec.dims[a] + x;
            }
            if (ok) g.neighbors[i].push_back({static_cast<int>(j), w});
        }
        std::sort(g.neighbors[i].begin(), g.neighbors[i].end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    }
    return g;
}

Geometry build_fully_connected(const GeometrySpec& spec) {
    if (spec.n_agents <= 0)
        throw std::invalid_argument("fully_connected: N must be positive");
    Geometry g;
    g.kind = GeometryKind::fully_connected;
    g.neighbors.resize(spec.n_agents);
    double w = 1.0 / spec.coupling;
    for (int i = 0; i < spec.n_agents; ++i)
        for (int j = 0; j < spec.n_agents; ++j)
            if (j != i) g.neighbors[i].push_back({j, w});
    return g;
}

Geometry build_ultrametric(const GeometrySpec& spec) {
    if (spec.branching < 2) throw std::invalid_argument("ultrametric: b must be >= 2");
    if (spec.depth < 1) throw std::invalid_argument("ultrametric: L must be >= 1");
    long long n = 1;
    for (int l = 0; l < spec.depth; ++l) n *= spec.branching;
    if (n > 1'000'000) throw std::invalid_argument("ultrametric: tree too large");

    Geometry g;
    g.kind = GeometryKind::ultrametric;
    g.neighbors.resize(n);
    for (long long i = 0; i < n; ++i) {
        for (long long j = 0; j < n; ++j) {
            if (j == i) continue;
            // d = smallest level at which i and j fall in the same block
            int d = 0;
            long long bi = i, bj = j;
            while (bi != bj) {
                bi /= spec.branching;
                bj /= spec.branching;
                ++d;
            }
            g.neighbors[i].push_back({static_cast<int>(j),
                                      std::pow(spec.ultra_base, -d)});
        }
    }
    return g;
}

Geometry build_random_dilution(const GeometrySpec& spec) {
    if (spec.n_agents <= 0)
        throw std::invalid_argument("random_dilution: N must be positive");
    if (!(spec.connect_prob > 0.0 && spec.connect_prob <= 1.0))
        throw std::invalid_argument("random_dilution: q must be in (0, 1]");
    Geometry g;
    g.kind = GeometryKind::random_dilution;
    g.neighbors.resize(spec.n_agents);
    double w = 1.0 / spec.coupling;
    for (int i = 0; i < spec.n_agents; ++i) {
        for (int j = i + 1; j < spec.n_agents; ++j) {
            double u = to_unit(counter_hash(spec.seed, i, j));
            if (u < spec.connect_prob) {
                g.neighbors[i].push_back({j, w});
                g.neighbors[j].push_back({i, w});
            }
        }
    }
    return g;
}

} // namespace

Geometry build_geometry(const GeometrySpec& spec) {
    switch (spec.kind) {
        case GeometryKind::euclidean_lattice: return build_euclidean(spec);
        case GeometryKind::fully_connected: return build_fully_connected(spec);
        case GeometryKind::ultrametric: return build_ultrametric(spec);
        case GeometryKind::random_dilution: return build_random_dilution(spec);
    }
    throw std::logic_error("unknown geometry kind");
}

StrengthField sample_disorder(const DisorderSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_disorder: N must be >= 1");
    if (spec.beta < 0.0) throw std::invalid_argument("sample_disorder: beta must be >= 0");
    switch (spec.dist) {
        case DisorderDist::constant:
            if (spec.value <= 0.0)
                throw std::invalid_argument("sample_disorder: constant value must be > 0");
            break;
        case DisorderDist::uniform:
            if (!(spec.lo > 0.0 && spec.lo < spec.hi))
                throw std::invalid_argument(
                    "sample_disorder: uniform requires 0 < lo < hi (support must not touch 0)");
            break;
        case DisorderDist::lognormal:
            if (spec.sigma < 0.0)
                throw std::invalid_argument("sample_disorder: lognormal sigma must be >= 0");
            break;
    }

    StrengthField out;
    out.beta = spec.beta;
    out.p.resize(n);
    out.s.resize(n);
    SeqRng rng(seed);
    auto draw = [&]() -> double {
        switch (spec.dist) {
            case DisorderDist::constant: return spec.value;
            case DisorderDist::uniform: return rng.uniform(spec.lo, spec.hi);
            case DisorderDist::lognormal: return rng.lognormal(spec.mu, spec.sigma);
        }
        return 0.0;
    };
    for (int i = 0; i < n; ++i) out.p[i] = draw();
    if (spec.self_esteem) {
        out.s = out.p;
    } else {
        for (int i = 0; i < n; ++i) out.s[i] = draw();
    }
    double mp = std::accumulate(out.p.begin(), out.p.end(), 0.0) / n;
    double ms = std::accumulate(out.s.begin(), out.s.end(), 0.0) / n;
    out.norm = mp + ms;
    return out;
}

std::string to_string(GeometryKind k) {
    switch (k) {
        case GeometryKind::euclidean_lattice: return "euclidean_lattice";
        case GeometryKind::fully_connected: return "fully_connected";
        case GeometryKind::ultrametric: return "ultrametric";
        case GeometryKind::random_dilution: return "random_dilution";
    }
    return "?";
}

std::string to_string(Boundary b) {
    return b == Boundary::periodic ? "periodic" : "open";
}

} // namespace lmfg
