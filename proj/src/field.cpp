#include "lmfg/field.hpp"

#include "lmfg/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lmfg {

namespace {

struct GridIndex {
    int na;
    long dims[3];
    long strides[3];
    bool periodic;

    explicit GridIndex(const FieldGrid& g) {
        na = g.ndim();
        periodic = g.boundary == Boundary::periodic;
        long s = 1;
        for (int a = na - 1; a >= 0; --a) {
            dims[a] = g.dims[a];
            strides[a] = s;
            s *= g.dims[a];
        }
    }

    long coord(long i, int a) const { return (i / strides[a]) % dims[a]; }

    // neighbour along axis a in direction dir (+-1); for an open boundary
    // the mirror ghost is the cell itself (zero-flux)
    long shift(long i, int a, int dir) const {
        long c = coord(i, a);
        long cn = c + dir;
        if (cn < 0 || cn >= dims[a]) {
            if (!periodic) return i;
            cn = (cn + dims[a]) % dims[a];
        }
        return i + (cn - c) * strides[a];
    }

    bool has_plus_face(long i, int a) const {
        return periodic ? dims[a] > 1 : coord(i, a) + 1 < dims[a];
    }
};

} // namespace

void FieldGrid::validate() const {
    if (dims.empty() || dims.size() > 3)
        throw std::invalid_argument("FieldGrid: dimension must be 1, 2 or 3");
    for (int d : dims)
        if (d <= 0) throw std::invalid_argument("FieldGrid: zero-sized axis");
    if (dx <= 0.0) throw std::invalid_argument("FieldGrid: dx must be positive");
    long n = cells();
    if (static_cast<long>(v.size()) != n || static_cast<long>(f.size()) != n)
        throw std::invalid_argument("FieldGrid: v/f shape mismatch");
    for (double fi : f)
        if (!(fi > 0.0)) throw std::invalid_argument("FieldGrid: f must be > 0 everywhere");
    if (alpha < 0.0) throw std::invalid_argument("FieldGrid: alpha must be >= 0");
}

std::vector<double> laplacian(const FieldGrid& grid, std::span<const double> u,
                              int threads) {
    GridIndex ix(grid);
    const long n = grid.cells();
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    std::vector<double> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        double acc = 0.0;
        for (int a = 0; a < ix.na; ++a) {
            long p = ix.shift(static_cast<long>(i), a, +1);
            long m = ix.shift(static_cast<long>(i), a, -1);
            acc += u[p] + u[m] - 2.0 * u[i];
        }
        out[i] = acc * inv_dx2;
    });
    return out;
}

std::vector<double> rhs(const FieldGrid& grid, int threads) {
    grid.validate();
    const long n = grid.cells();
    std::vector<double> fv(n);
    for (long i = 0; i < n; ++i) fv[i] = grid.f[i] * grid.v[i];
    std::vector<double> lap = laplacian(grid, fv, threads);
    std::vector<double> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        double vi = grid.v[i];
        out[i] = -vi + grid.f[i] * vi - grid.gamma * vi * vi * vi +
                 grid.alpha * lap[i];
    });
    return out;
}

std::vector<double> rhs_w(const FieldGrid& grid, std::span<const double> w,
                          int threads) {
    grid.validate();
    const long n = grid.cells();
    if (static_cast<long>(w.size()) != n)
        throw std::invalid_argument("rhs_w: shape mismatch");
    std::vector<double> u(n); // sqrt(f) w = f v
    for (long i = 0; i < n; ++i) u[i] = std::sqrt(grid.f[i]) * w[i];
    std::vector<double> lap = laplacian(grid, u, threads);
    std::vector<double> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        double wi = w[i];
        out[i] = (grid.f[i] - 1.0) * wi -
                 grid.gamma * wi * wi * wi / grid.f[i] +
                 grid.alpha * std::sqrt(grid.f[i]) * lap[i];
    });
    return out;
}

double stability_bound(const FieldGrid& grid) {
    double max_f = 0.0, max_fm1 = 0.0, max_v2 = 0.0;
    for (long i = 0; i < grid.cells(); ++i) {
        max_f = std::max(max_f, grid.f[i]);
        max_fm1 = std::max(max_fm1, std::fabs(grid.f[i] - 1.0));
        max_v2 = std::max(max_v2, grid.v[i] * grid.v[i]);
    }
    double bound = 0.1 / std::max(1.0, max_fm1 + 3.0 * std::fabs(grid.gamma) * max_v2);
    if (grid.alpha > 0.0) {
        double diff = grid.dx * grid.dx / (2.0 * grid.ndim() * grid.alpha * max_f);
        bound = std::min(bound, diff);
    }
    return bound;
}

void step(FieldGrid& grid, double dt, int threads) {
    grid.validate();
    if (dt <= 0.0) throw std::invalid_argument("step: dt must be positive");
    double bound = stability_bound(grid);
    if (dt > bound)
        throw std::invalid_argument("step: dt = " + std::to_string(dt) +
                                    " exceeds the stability bound " +
                                    std::to_string(bound));
    std::vector<double> r = rhs(grid, threads);
    const long n = grid.cells();
    parallel_for(n, threads, [&](std::size_t i) { grid.v[i] += dt * r[i]; });
}

double lyapunov(const FieldGrid& grid, int threads) {
    grid.validate();
    GridIndex ix(grid);
    const long n = grid.cells();
    double cell_vol = 1.0;
    for (int a = 0; a < ix.na; ++a) cell_vol *= grid.dx;

    std::vector<double> density(n);
    parallel_for(n, threads, [&](std::size_t i) {
        double fi = grid.f[i];
        double w = std::sqrt(fi) * grid.v[i];
        double u_i = fi * grid.v[i]; // sqrt(f) w
        double d = 0.5 * (1.0 - fi) * w * w +
                   0.25 * grid.gamma * w * w * w * w / fi;
        // gradient energy on the cell's +faces (one-sided differences)
        for (int a = 0; a < ix.na; ++a) {
            if (!ix.has_plus_face(static_cast<long>(i), a)) continue;
            long p = ix.shift(static_cast<long>(i), a, +1);
            double g = (grid.f[p] * grid.v[p] - u_i) / grid.dx;
            d += 0.5 * grid.alpha * g * g;
        }
        density[i] = d;
    });
    // fixed sequential summation order: deterministic across worker counts
    double H = 0.0;
    for (long i = 0; i < n; ++i) H += density[i];
    return H * cell_vol;
}

std::vector<double> to_w(const FieldGrid& grid) {
    grid.validate();
    std::vector<double> w(grid.cells());
    for (long i = 0; i < grid.cells(); ++i) w[i] = std::sqrt(grid.f[i]) * grid.v[i];
    return w;
}

std::vector<double> from_w(std::span<const double> w, std::span<const double> f) {
    if (w.size() != f.size()) throw std::invalid_argument("from_w: shape mismatch");
    std::vector<double> v(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(f[i] > 0.0)) throw std::invalid_argument("from_w: f must be > 0");
        v[i] = w[i] / std::sqrt(f[i]);
    }
    return v;
}

EvolveResult evolve(FieldGrid& grid, double t_end, double dt, double tol,
                    long record_every, int threads) {
    grid.validate();
    if (record_every < 1) record_every = 1;
    EvolveResult res;
    const long n = grid.cells();

    double v0_max = 0.0;
    for (double vi : grid.v) v0_max = std::max(v0_max, std::fabs(vi));
    const double runaway_cap = 10.0 * std::max(v0_max, 1.0);

    double t = 0.0;
    long k = 0;
    while (true) {
        std::vector<double> r = rhs(grid, threads);
        double max_abs = 0.0;
        for (double ri : r) max_abs = std::max(max_abs, std::fabs(ri));
        bool record = (k % record_every == 0);
        if (record) res.series.push_back({t, lyapunov(grid, threads), max_abs});
        if (max_abs < tol) {
            if (!record) res.series.push_back({t, lyapunov(grid, threads), max_abs});
            res.converged = true;
            break;
        }
        if (t >= t_end) {
            if (!record) res.series.push_back({t, lyapunov(grid, threads), max_abs});
            break;
        }
        double bound = stability_bound(grid);
        if (dt > bound)
            throw std::invalid_argument("evolve: dt = " + std::to_string(dt) +
                                        " exceeds the stability bound " +
                                        std::to_string(bound));
        double h = std::min(dt, t_end - t);
        parallel_for(n, threads, [&](std::size_t i) { grid.v[i] += h * r[i]; });
        t += h;
        ++k;
        if (grid.gamma < 0.0) {
            double vmax = 0.0;
            for (double vi : grid.v) vmax = std::max(vmax, std::fabs(vi));
            if (vmax > runaway_cap) {
                res.series.push_back({t, lyapunov(grid, threads), -1.0});
                res.diverged = true;
                break;
            }
        }
    }
    res.steps = k;
    res.t_final = t;
    return res;
}

} // namespace lmfg
