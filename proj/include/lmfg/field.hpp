// Continuous-limit field dynamics: explicit-Euler gradient flow of
//   dv/dt = -v + f v - gamma v^3 + alpha lap(f v)
// together with the Lyapunov functional it descends,
//   H = sum dx^n [ (1-f) w^2/2 + gamma w^4/(4f) ] + (alpha/2) |grad(sqrt(f) w)|^2,
// with w = sqrt(f) v. The gradient energy is accumulated on cell faces
// (one-sided differences), which makes the discrete functional derivative
// of H equal exactly minus the compact-stencil right-hand side.

#pragma once

#include "lmfg/lattice.hpp" // Boundary

#include <span>
#include <vector>

namespace lmfg {

struct FieldGrid {
    std::vector<int> dims; // 1 to 3 axes, row-major storage
    double dx = 1.0;
    Boundary boundary = Boundary::periodic;
    std::vector<double> v;
    std::vector<double> f; // strength field, strictly positive
    double gamma = 1.0;
    double alpha = 0.0;

    long cells() const {
        long n = 1;
        for (int d : dims) n *= d;
        return n;
    }
    int ndim() const { return static_cast<int>(dims.size()); }

    void validate() const;
};

// v-form right-hand side of the dynamical equation.
std::vector<double> rhs(const FieldGrid& grid, int threads = 1);

// w-form right-hand side: (f-1)w - gamma w^3/f + alpha sqrt(f) lap(sqrt(f) w).
// Equals sqrt(f) times the v-form pointwise.
std::vector<double> rhs_w(const FieldGrid& grid, std::span<const double> w,
                          int threads = 1);

// Largest admissible explicit-Euler dt for the current state: the
// diffusion limit dx^2/(2 n alpha max f) combined with the reaction
// limit 0.1/max(1, max|f-1| + 3|gamma| max v^2).
double stability_bound(const FieldGrid& grid);

// One explicit Euler step v <- v + dt * rhs. Throws if dt exceeds the
// stability bound (the message reports the bound).
void step(FieldGrid& grid, double dt, int threads = 1);

double lyapunov(const FieldGrid& grid, int threads = 1);

std::vector<double> to_w(const FieldGrid& grid);
std::vector<double> from_w(std::span<const double> w, std::span<const double> f);

struct EvolveRecord {
    double t;
    double H;
    double max_abs_rhs;
};

struct EvolveResult {
    std::vector<EvolveRecord> series;
    bool converged = false;
    bool diverged = false; // gamma < 0 runaway guard tripped
    long steps = 0;
    double t_final = 0.0;
};

// Repeated stepping until t_end, recording H and max|rhs| every
// record_every steps (and at the start and end). Stops early when
// max|rhs| < tol. With gamma < 0, aborts once max|v| exceeds 10x its
// initial bound.
EvolveResult evolve(FieldGrid& grid, double t_end, double dt, double tol = 1e-8,
                    long record_every = 1, int threads = 1);

// Compact Laplacian of an arbitrary cell field on the grid's topology
// (periodic wrap or zero-flux mirror ghosts). Exposed for analysis code.
std::vector<double> laplacian(const FieldGrid& grid, std::span<const double> u,
                              int threads = 1);

} // namespace lmfg
