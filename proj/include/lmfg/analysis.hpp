// Analytic objects of the stationary theory: Thomas-Fermi profiles, the
// exponential regime, Airy boundary layers, connected opinion clusters,
// the order parameter eta = S / (2 h_eff) and its phase classification,
// collapse times, and disorder-averaged statistics.

#pragma once

#include "lmfg/field.hpp"
#include "lmfg/lattice.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lmfg {

enum class TFRegime { gamma_zero, gamma_positive, gamma_negative };
enum class BranchRule { positive, negative, random_sign, from_field };

struct StationaryProfile {
    std::vector<double> v0;
    TFRegime regime = TFRegime::gamma_positive;
    std::vector<std::int8_t> branch; // per-cell sign in {-1, 0, +1}
};

// Pointwise stationary solution with the kinetic (alpha) term dropped.
// gamma > 0: v0 = +-sqrt((f-1)/gamma) where f > 1, else 0.
// gamma < 0: v0 = 0 everywhere (the only stable solution).
// gamma = 0 is rejected: that regime has no nontrivial stationary
// profile, see exponential_regime.
StationaryProfile thomas_fermi(const std::vector<double>& f, double gamma,
                               BranchRule rule, std::uint64_t seed = 0,
                               const std::vector<double>* ref_field = nullptr);

// gamma = alpha = 0 solution: v(x, t) = exp((f(x) - 1) t) v(x, 0).
std::vector<double> exponential_regime(const std::vector<double>& v0,
                                       const std::vector<double>& f, double t);

// Transitory-layer thickness l = (alpha f(x0)^2 / f'(x0))^(1/3). Throws
// on tangential crossings (|f'| below tol).
double layer_thickness(double alpha, double f_at_x0, double fprime_at_x0,
                       double tol = 1e-10);

struct BoundaryLayer {
    int axis;          // scan axis of the crossing
    double x0;         // crossing coordinate along the axis, length units
    double fprime;     // |df/dn| at the crossing (centered difference)
    double thickness;  // l
};

// All transversal f = 1 crossings found by axis scans over the grid.
std::vector<BoundaryLayer> find_layers(const std::vector<double>& f,
                                       const std::vector<int>& dims,
                                       Boundary boundary, double dx,
                                       double alpha);

// Asymptotic Airy tail z^(-1/4) exp(-(2/3) z^(3/2)); requires z > 0.
double airy_tail(double z);

struct Cluster {
    int id;
    int sign;
    long size;
    std::vector<double> centroid; // lattice coordinates (spatial) or mean index
    long boundary_len;            // edges to differently-labelled cells
};

struct ClusterReport {
    std::vector<int> labels;
    std::vector<Cluster> clusters;
};

// Connected same-sign components over the geometry's neighbour relation.
// Labels are assigned in order of each cluster's smallest member index.
ClusterReport detect_clusters(const std::vector<std::int8_t>& sign,
                              const Geometry& geom);

// Maps a real field to signs; cells with |v| < eps adopt the majority
// sign of their non-zero neighbours (fallback: global majority).
std::vector<std::int8_t> threshold_field(const std::vector<double>& v,
                                         const Geometry& geom,
                                         double eps = 1e-8);

// Nearest-neighbour adjacency geometry for a regular grid, for cluster
// detection on field snapshots.
Geometry grid_adjacency(const std::vector<int>& dims, Boundary boundary);

// Mean nearest-centroid distance between clusters, in length units
// (dx-scaled for spatial geometries). With fewer than two clusters the
// domain diameter is returned.
double mean_cluster_distance(const ClusterReport& report, const Geometry& geom,
                             double dx = 1.0);

enum class Phase { sparse, middle, dense };

std::string to_string(Phase p);

struct OrderParameter {
    double eta;
    Phase phase;
};

// eta = S / (2 h_eff); dense for eta <= dense_thr, sparse above
// sparse_thr, middle in between.
OrderParameter order_parameter(double S, double h_eff, double dense_thr = 1.0,
                               double sparse_thr = 10.0);

// Minority-cluster collapse time t_max = R0^2 / (2 f(R0)).
double collapse_time(double R0, double f_at_R0);

struct EnsembleStats {
    double P_tot = 0.0;   // mean fraction of cells with f > 1
    double h_eff = 0.0;   // mean layer thickness over all crossings
    double S = 0.0;       // mean nearest-centroid cluster distance
    double eta = 0.0;
    Phase phase = Phase::sparse;
    bool no_clusters = false;
    long n_layers = 0;
};

// Disorder-averaged statistics over one or more strength-field
// realizations and their converged states. states may be empty, in which
// case cluster statistics are taken from the f > 1 regions.
EnsembleStats ensemble_stats(const std::vector<std::vector<double>>& f_realizations,
                             const std::vector<int>& dims, Boundary boundary,
                             double dx, double alpha,
                             const std::vector<std::vector<double>>& converged_states,
                             double dense_thr = 1.0, double sparse_thr = 10.0);

} // namespace lmfg
