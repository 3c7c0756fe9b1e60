#include "lmfg/analysis.hpp"

#include "lmfg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace lmfg {

StationaryProfile thomas_fermi(const std::vector<double>& f, double gamma,
                               BranchRule rule, std::uint64_t seed,
                               const std::vector<double>* ref_field) {
    if (gamma == 0.0)
        throw std::invalid_argument(
            "thomas_fermi: gamma = 0 has no nontrivial stationary profile; "
            "use exponential_regime for that case");
    for (double fi : f)
        if (!(fi > 0.0)) throw std::invalid_argument("thomas_fermi: f must be > 0");
    if (rule == BranchRule::from_field &&
        (!ref_field || ref_field->size() != f.size()))
        throw std::invalid_argument("thomas_fermi: from_field needs a matching reference field");

    const std::size_t n = f.size();
    StationaryProfile out;
    out.v0.assign(n, 0.0);
    out.branch.assign(n, 0);
    if (gamma < 0.0) {
        out.regime = TFRegime::gamma_negative;
        return out; // v0 = 0 is the only stable solution
    }
    out.regime = TFRegime::gamma_positive;
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] <= 1.0) continue;
        int b = +1;
        switch (rule) {
            case BranchRule::positive: b = +1; break;
            case BranchRule::negative: b = -1; break;
            case BranchRule::random_sign:
                b = to_unit(counter_hash(seed, 0, i)) < 0.5 ? -1 : +1;
                break;
            case BranchRule::from_field:
                b = (*ref_field)[i] >= 0.0 ? +1 : -1;
                break;
        }
        out.branch[i] = static_cast<std::int8_t>(b);
        out.v0[i] = b * std::sqrt((f[i] - 1.0) / gamma);
    }
    return out;
}

std::vector<double> exponential_regime(const std::vector<double>& v0,
                                       const std::vector<double>& f, double t) {
    if (v0.size() != f.size())
        throw std::invalid_argument("exponential_regime: shape mismatch");
    if (t < 0.0) throw std::invalid_argument("exponential_regime: t must be >= 0");
    std::vector<double> out(v0.size());
    for (std::size_t i = 0; i < v0.size(); ++i)
        out[i] = std::exp((f[i] - 1.0) * t) * v0[i];
    return out;
}

double layer_thickness(double alpha, double f_at_x0, double fprime_at_x0,
                       double tol) {
    if (!(alpha > 0.0)) throw std::invalid_argument("layer_thickness: alpha must be > 0");
    double fp = std::fabs(fprime_at_x0);
    if (fp <= tol)
        throw std::invalid_argument(
            "layer_thickness: tangential crossing (f' ~ 0), thickness undefined");
    return std::cbrt(alpha * f_at_x0 * f_at_x0 / fp);
}

std::vector<BoundaryLayer> find_layers(const std::vector<double>& f,
                                       const std::vector<int>& dims,
                                       Boundary boundary, double dx,
                                       double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("find_layers: alpha must be > 0");
    int na = static_cast<int>(dims.size());
    long n = 1;
    for (int d : dims) n *= d;
    if (static_cast<long>(f.size()) != n)
        throw std::invalid_argument("find_layers: shape mismatch");

    std::vector<long> strides(na, 1);
    for (int a = na - 2; a >= 0; --a) strides[a] = strides[a + 1] * dims[a + 1];

    std::vector<BoundaryLayer> out;
    for (int a = 0; a < na; ++a) {
        for (long i = 0; i < n; ++i) {
            long c = (i / strides[a]) % dims[a];
            long p;
            if (c + 1 < dims[a])
                p = i + strides[a];
            else if (boundary == Boundary::periodic)
                p = i - c * strides[a];
            else
                continue;
            double fa = f[i], fb = f[p];
            if ((fa - 1.0) * (fb - 1.0) >= 0.0) continue;
            double fprime = std::fabs(fb - fa) / dx;
            if (fprime <= 1e-10) continue; // tangential, skip in scans
            double frac = (1.0 - fa) / (fb - fa);
            out.push_back({a, (static_cast<double>(c) + frac) * dx, fprime,
                           layer_thickness(alpha, 1.0, fprime)});
        }
    }
    return out;
}

double airy_tail(double z) {
    if (!(z > 0.0)) throw std::invalid_argument("airy_tail: z must be > 0");
    return std::pow(z, -0.25) * std::exp(-(2.0 / 3.0) * std::pow(z, 1.5));
}

ClusterReport detect_clusters(const std::vector<std::int8_t>& sign,
                              const Geometry& geom) {
    const int n = geom.size();
    if (static_cast<int>(sign.size()) != n)
        throw std::invalid_argument("detect_clusters: shape mismatch");
    ClusterReport rep;
    rep.labels.assign(n, -1);
    std::deque<int> queue;
    for (int i = 0; i < n; ++i) {
        if (rep.labels[i] >= 0) continue;
        int id = static_cast<int>(rep.clusters.size());
        Cluster cl;
        cl.id = id;
        cl.sign = sign[i];
        cl.size = 0;
        cl.boundary_len = 0;
        std::size_t nd = geom.spatial() ? geom.dims.size() : 1;
        cl.centroid.assign(nd, 0.0);
        rep.labels[i] = id;
        queue.push_back(i);
        while (!queue.empty()) {
            int c = queue.front();
            queue.pop_front();
            ++cl.size;
            if (geom.spatial())
                for (std::size_t a = 0; a < nd; ++a) cl.centroid[a] += geom.positions[c][a];
            else
                cl.centroid[0] += c;
            for (const Neighbor& nb : geom.neighbors[c]) {
                if (sign[nb.index] != sign[i]) continue;
                if (rep.labels[nb.index] >= 0) continue;
                rep.labels[nb.index] = id;
                queue.push_back(nb.index);
            }
        }
        for (double& x : cl.centroid) x /= cl.size;
        rep.clusters.push_back(std::move(cl));
    }
    // boundary length: per cluster, edges to differently-labelled cells
    for (int i = 0; i < n; ++i)
        for (const Neighbor& nb : geom.neighbors[i])
            if (rep.labels[nb.index] != rep.labels[i])
                ++rep.clusters[rep.labels[i]].boundary_len;
    return rep;
}

std::vector<std::int8_t> threshold_field(const std::vector<double>& v,
                                         const Geometry& geom, double eps) {
    const int n = geom.size();
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("threshold_field: shape mismatch");
    std::vector<std::int8_t> s(n, 0);
    long pos = 0, neg = 0;
    for (int i = 0; i < n; ++i) {
        if (v[i] > eps) s[i] = +1, ++pos;
        else if (v[i] < -eps) s[i] = -1, ++neg;
    }
    // numerical zeros adopt the surrounding majority sign
    bool changed = true;
    int guard = 0;
    while (changed && guard++ < n) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            if (s[i] != 0) continue;
            int bal = 0;
            for (const Neighbor& nb : geom.neighbors[i]) bal += s[nb.index];
            if (bal != 0) {
                s[i] = static_cast<std::int8_t>(bal > 0 ? +1 : -1);
                changed = true;
            }
        }
    }
    std::int8_t global = pos >= neg ? +1 : -1;
    for (int i = 0; i < n; ++i)
        if (s[i] == 0) s[i] = global;
    return s;
}

Geometry grid_adjacency(const std::vector<int>& dims, Boundary boundary) {
    GeometrySpec spec;
    spec.kind = GeometryKind::euclidean_lattice;
    spec.dims = dims;
    spec.radius = 1.1; // nearest neighbours only
    spec.boundary = boundary;
    return build_geometry(spec);
}

double mean_cluster_distance(const ClusterReport& report, const Geometry& geom,
                             double dx) {
    auto diameter = [&]() -> double {
        if (!geom.spatial()) return static_cast<double>(geom.size());
        double d2 = 0.0;
        for (int d : geom.dims) d2 += static_cast<double>(d) * d;
        return std::sqrt(d2) * dx;
    };
    if (report.clusters.size() < 2) return diameter();
    double acc = 0.0;
    for (const Cluster& a : report.clusters) {
        double best = std::numeric_limits<double>::infinity();
        for (const Cluster& b : report.clusters) {
            if (b.id == a.id) continue;
            double d2 = 0.0;
            for (std::size_t k = 0; k < a.centroid.size(); ++k) {
                double d = a.centroid[k] - b.centroid[k];
                d2 += d * d;
            }
            best = std::min(best, std::sqrt(d2) * dx);
        }
        acc += best;
    }
    return acc / report.clusters.size();
}

std::string to_string(Phase p) {
    switch (p) {
        case Phase::sparse: return "sparse";
        case Phase::middle: return "middle";
        case Phase::dense: return "dense";
    }
    return "?";
}

OrderParameter order_parameter(double S, double h_eff, double dense_thr,
                               double sparse_thr) {
    if (!(h_eff > 0.0))
        throw std::invalid_argument("order_parameter: h_eff must be > 0");
    double eta = S / (2.0 * h_eff);
    Phase phase = eta <= dense_thr ? Phase::dense
                  : eta <= sparse_thr ? Phase::middle
                                      : Phase::sparse;
    return {eta, phase};
}

double collapse_time(double R0, double f_at_R0) {
    if (R0 < 0.0) throw std::invalid_argument("collapse_time: R0 must be >= 0");
    if (!(f_at_R0 > 0.0)) throw std::invalid_argument("collapse_time: f must be > 0");
    return R0 * R0 / (2.0 * f_at_R0);
}

EnsembleStats ensemble_stats(const std::vector<std::vector<double>>& f_realizations,
                             const std::vector<int>& dims, Boundary boundary,
                             double dx, double alpha,
                             const std::vector<std::vector<double>>& converged_states,
                             double dense_thr, double sparse_thr) {
    if (f_realizations.empty())
        throw std::invalid_argument("ensemble_stats: need at least one realization");
    Geometry adj = grid_adjacency(dims, boundary);

    EnsembleStats st;
    double thick_sum = 0.0;
    double S_sum = 0.0;
    long S_count = 0;
    for (std::size_t r = 0; r < f_realizations.size(); ++r) {
        const auto& f = f_realizations[r];
        long above = 0;
        for (double fi : f)
            if (fi > 1.0) ++above;
        st.P_tot += static_cast<double>(above) / f.size();
        if (alpha > 0.0) {
            for (const BoundaryLayer& l : find_layers(f, dims, boundary, dx, alpha)) {
                thick_sum += l.thickness;
                ++st.n_layers;
            }
        }
        std::vector<std::int8_t> sign;
        if (r < converged_states.size() && !converged_states[r].empty()) {
            sign = threshold_field(converged_states[r], adj);
        } else {
            sign.resize(f.size());
            for (std::size_t i = 0; i < f.size(); ++i)
                sign[i] = static_cast<std::int8_t>(f[i] > 1.0 ? +1 : -1);
        }
        if (above > 0) {
            S_sum += mean_cluster_distance(detect_clusters(sign, adj), adj, dx);
            ++S_count;
        }
    }
    st.P_tot /= f_realizations.size();
    st.h_eff = st.n_layers > 0 ? thick_sum / st.n_layers : 0.0;
    st.S = S_count > 0 ? S_sum / S_count : 0.0;
    if (st.P_tot == 0.0) {
        st.no_clusters = true;
        st.phase = Phase::sparse;
        return st;
    }
    if (st.n_layers > 0) {
        auto op = order_parameter(st.S, st.h_eff, dense_thr, sparse_thr);
        st.eta = op.eta;
        st.phase = op.phase;
    } else {
        st.phase = st.P_tot >= 1.0 ? Phase::dense : Phase::sparse;
    }
    return st;
}

} // namespace lmfg
