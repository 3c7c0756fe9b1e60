// Learning-space geometries and quenched strength disorder.
//
// A Geometry is an immutable weighted neighbour structure over N agents.
// Couplings are 1/g(d): a constant 1/g inside the interaction radius of a
// Euclidean lattice, 1/g on every edge of the complete or diluted graph,
// and base^-level on the ultrametric tree. Self-coupling is not stored
// here; it enters the dynamics through beta.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lmfg {

enum class GeometryKind { euclidean_lattice, fully_connected, ultrametric, random_dilution };
enum class Boundary { periodic, open };

struct Neighbor {
    int index;
    double weight; // 1/g(d(i,j))
};

struct Geometry {
    GeometryKind kind = GeometryKind::fully_connected;
    Boundary boundary = Boundary::periodic;
    std::vector<int> dims;   // per-axis sizes; empty for non-spatial kinds
    double radius = 0.0;     // euclidean interaction radius
    std::vector<std::vector<Neighbor>> neighbors;
    std::vector<std::vector<double>> positions; // lattice coordinates; empty otherwise

    int size() const { return static_cast<int>(neighbors.size()); }
    bool spatial() const { return !dims.empty(); }
};

struct GeometrySpec {
    GeometryKind kind = GeometryKind::fully_connected;
    // euclidean_lattice
    std::vector<int> dims;
    double radius = 1.1;
    Boundary boundary = Boundary::periodic;
    // fully_connected / random_dilution
    int n_agents = 0;
    double connect_prob = 1.0;
    std::uint64_t seed = 0;
    // ultrametric
    int branching = 2;
    int depth = 1;
    double ultra_base = 2.0; // g(d) = ultra_base^d
    // constant g for in-range / connected pairs
    double coupling = 1.0;
};

Geometry build_geometry(const GeometrySpec& spec);

enum class DisorderDist { constant, uniform, lognormal };

struct DisorderSpec {
    DisorderDist dist = DisorderDist::constant;
    double value = 1.0;       // constant
    double lo = 0.5, hi = 1.5; // uniform
    double mu = 0.0, sigma = 0.25; // lognormal of exp(N(mu, sigma^2))
    bool self_esteem = true;  // p_i = s_i
    double beta = 0.0;        // self-support scale 1/kT
};

struct StrengthField {
    std::vector<double> p;
    std::vector<double> s;
    double beta = 0.0;
    double norm = 0.0; // mean(p) + mean(s)

    int size() const { return static_cast<int>(p.size()); }
};

StrengthField sample_disorder(const DisorderSpec& spec, int n, std::uint64_t seed);

std::string to_string(GeometryKind k);
std::string to_string(Boundary b);

} // namespace lmfg
