#include "lmfg/field.hpp"
#include "lmfg/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

using namespace lmfg;

namespace {

FieldGrid make_grid(std::vector<int> dims, double dx, double f_val, double v_val,
                    double gamma = 1.0, double alpha = 0.0,
                    Boundary b = Boundary::periodic) {
    FieldGrid g;
    g.dims = std::move(dims);
    g.dx = dx;
    g.boundary = b;
    g.gamma = gamma;
    g.alpha = alpha;
    g.f.assign(g.cells(), f_val);
    g.v.assign(g.cells(), v_val);
    return g;
}

// smooth positive strength field: low harmonics plus a seeded phase
void fill_smooth_f(FieldGrid& g, std::uint64_t seed, double lo = 0.5, double hi = 1.5) {
    SeqRng rng(seed);
    double ph1 = rng.uniform(0.0, 6.28), ph2 = rng.uniform(0.0, 6.28);
    long n = g.cells();
    double mid = 0.5 * (lo + hi), amp = 0.5 * (hi - lo);
    for (long i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / n;
        double s = 0.7 * std::sin(2 * 3.14159265358979 * x + ph1) +
                   0.3 * std::sin(6 * 3.14159265358979 * x + ph2);
        g.f[i] = mid + amp * s;
    }
}

void fill_random_v(FieldGrid& g, std::uint64_t seed, double scale = 1.0) {
    SeqRng rng(seed);
    for (double& vi : g.v) vi = rng.uniform(-scale, scale);
}

} // namespace

TEST_CASE("rhs vanishes at v = 0") {
    FieldGrid g = make_grid({8, 8}, 1.0, 1.7, 0.0, 1.0, 0.05);
    for (double r : rhs(g)) CHECK(r == 0.0);
}

TEST_CASE("uniform Thomas-Fermi state is stationary") {
    // f = 2, gamma = 1, v = 1: -1 + 2 - 1 + alpha*lap(const) = 0
    FieldGrid g = make_grid({6, 6}, 1.0, 2.0, 1.0, 1.0, 0.3);
    for (double r : rhs(g)) CHECK(r == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rhs arithmetic at v = 0.5") {
    FieldGrid g = make_grid({4}, 1.0, 2.0, 0.5, 1.0, 0.0);
    for (double r : rhs(g)) CHECK(r == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("rhs is odd in v") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        FieldGrid g = make_grid({12, 12}, 0.5, 1.0, 0.0, 1.0, 0.02,
                                seed % 2 ? Boundary::open : Boundary::periodic);
        fill_smooth_f(g, seed);
        fill_random_v(g, seed + 100);
        std::vector<double> r_plus = rhs(g);
        for (double& vi : g.v) vi = -vi;
        std::vector<double> r_minus = rhs(g);
        for (long i = 0; i < g.cells(); ++i)
            CHECK(r_minus[i] == doctest::Approx(-r_plus[i]).epsilon(1e-14));
    }
}

TEST_CASE("w-form rhs equals sqrt(f) times the v-form rhs") {
    FieldGrid g = make_grid({10, 10}, 0.7, 1.0, 0.0, 1.0, 0.03);
    fill_smooth_f(g, 9);
    fill_random_v(g, 10);
    std::vector<double> rv = rhs(g);
    std::vector<double> w = to_w(g);
    std::vector<double> rw = rhs_w(g, w);
    for (long i = 0; i < g.cells(); ++i)
        CHECK(rw[i] == doctest::Approx(std::sqrt(g.f[i]) * rv[i]).epsilon(1e-12));
}

TEST_CASE("step leaves a stationary state unchanged") {
    FieldGrid g = make_grid({8}, 1.0, 2.0, 1.0, 1.0, 0.1);
    std::vector<double> before = g.v;
    step(g, 0.01);
    CHECK(g.v == before);
}

TEST_CASE("gamma = alpha = 0 matches the exact exponential as dt shrinks") {
    const double f0 = 1.5, t = 1.0, v0 = 0.25;
    double exact = v0 * std::exp((f0 - 1.0) * t);
    double prev_err = 1e9;
    for (double dt : {0.05, 0.025, 0.0125}) {
        FieldGrid g = make_grid({4}, 1.0, f0, v0, 0.0, 0.0);
        long k = std::lround(t / dt);
        for (long s = 0; s < k; ++s) step(g, dt);
        // Euler recursion check: v_k = (1 + dt (f0-1))^k v0
        double euler = v0 * std::pow(1.0 + dt * (f0 - 1.0), static_cast<double>(k));
        CHECK(g.v[0] == doctest::Approx(euler).epsilon(1e-12));
        double err = std::fabs(g.v[0] - exact);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 5e-3);
}

TEST_CASE("step-doubling: local error shrinks as O(dt^2)") {
    auto run_pair = [](double dt) {
        FieldGrid a = make_grid({64}, 0.5, 1.0, 0.0, 1.0, 0.01);
        fill_smooth_f(a, 21);
        fill_random_v(a, 22, 0.5);
        FieldGrid b = a;
        step(a, dt);
        step(b, dt / 2);
        step(b, dt / 2);
        double diff = 0.0;
        for (long i = 0; i < a.cells(); ++i)
            diff = std::max(diff, std::fabs(a.v[i] - b.v[i]));
        return diff;
    };
    double d1 = run_pair(0.02);
    double d2 = run_pair(0.01);
    CHECK(d1 / d2 > 3.0);
    CHECK(d1 / d2 < 5.0);
}

TEST_CASE("step rejects dt above the stability bound and reports it") {
    FieldGrid g = make_grid({16, 16}, 1.0, 1.5, 0.5, 1.0, 0.02);
    double bound = stability_bound(g);
    CHECK_NOTHROW(step(g, bound * 0.99));
    try {
        step(g, bound * 2.0);
        FAIL("expected a stability rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bound") != std::string::npos);
    }
}

TEST_CASE("stability bound combines reaction and diffusion limits") {
    // reaction-only: f = 1.5, gamma = 1, v = 1 -> 0.1 / (0.5 + 3) = 0.1/3.5
    FieldGrid g = make_grid({8}, 1.0, 1.5, 1.0, 1.0, 0.0);
    CHECK(stability_bound(g) == doctest::Approx(0.1 / 3.5).epsilon(1e-14));
    // strong diffusion dominates: dx^2 / (2 n alpha max f)
    FieldGrid h = make_grid({8, 8}, 0.1, 2.0, 0.0, 1.0, 1.0);
    CHECK(stability_bound(h) == doctest::Approx(0.01 / 8.0).epsilon(1e-14));
}

TEST_CASE("lyapunov vanishes at v = 0") {
    FieldGrid g = make_grid({6, 6}, 1.0, 1.3, 0.0, 1.0, 0.1);
    CHECK(lyapunov(g) == 0.0);
}

TEST_CASE("lyapunov arithmetic on unit total volume") {
    // 10 cells, dx = 0.1: total volume 1. H = (1-2)*2/2 + 1*4/(4*2) = -0.5
    FieldGrid g = make_grid({10}, 0.1, 2.0, 1.0, 1.0, 0.7);
    CHECK(lyapunov(g) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("discrete functional derivative of H equals minus the w-form rhs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Boundary b = seed % 2 ? Boundary::open : Boundary::periodic;
        FieldGrid g = make_grid({16, 16}, 0.5, 1.0, 0.0, 1.0, 0.02, b);
        fill_smooth_f(g, seed + 40);
        fill_random_v(g, seed + 60, 0.8);
        std::vector<double> w = to_w(g);
        std::vector<double> rw = rhs_w(g, w);
        double cell_vol = g.dx * g.dx;
        // central-difference probe of H(w) at a spread of cells
        for (long i = 0; i < g.cells(); i += 37) {
            const double eps = 1e-6 * std::max(1.0, std::fabs(w[i]));
            auto H_at = [&](double wi) {
                std::vector<double> wp = w;
                wp[i] = wi;
                FieldGrid gp = g;
                gp.v = from_w(wp, g.f);
                return lyapunov(gp);
            };
            double dHdw = (H_at(w[i] + eps) - H_at(w[i] - eps)) / (2.0 * eps);
            double want = -rw[i] * cell_vol;
            double scale = std::max({std::fabs(want), std::fabs(dHdw), 1e-8});
            CHECK(std::fabs(dHdw - want) / scale < 1e-6);
        }
    }
}

TEST_CASE("w-transform arithmetic and round trip") {
    FieldGrid g = make_grid({5}, 1.0, 4.0, 1.0);
    std::vector<double> w = to_w(g);
    for (double wi : w) CHECK(wi == 2.0);
    std::vector<double> v_back = from_w(w, g.f);
    for (long i = 0; i < g.cells(); ++i)
        CHECK(v_back[i] == doctest::Approx(g.v[i]).epsilon(1e-14));

    FieldGrid id = make_grid({5}, 1.0, 1.0, 0.37);
    std::vector<double> w_id = to_w(id);
    CHECK(w_id == id.v);
}

TEST_CASE("evolve converges immediately on a Thomas-Fermi state with alpha = 0") {
    FieldGrid g = make_grid({32}, 0.25, 1.0, 0.0, 1.0, 0.0);
    fill_smooth_f(g, 3, 0.6, 1.8);
    for (long i = 0; i < g.cells(); ++i)
        g.v[i] = g.f[i] > 1.0 ? std::sqrt((g.f[i] - 1.0) / g.gamma) : 0.0;
    EvolveResult res = evolve(g, 10.0, 0.01, 1e-12);
    CHECK(res.converged);
    CHECK(res.steps == 0);
    CHECK(res.series.back().max_abs_rhs < 1e-12);
}

TEST_CASE("H is non-increasing along a random 64x64 relaxation") {
    FieldGrid g = make_grid({64, 64}, 1.0, 1.0, 0.0, 1.0, 0.01);
    SeqRng rng(91);
    for (long i = 0; i < g.cells(); ++i) g.f[i] = rng.uniform(0.8, 1.2);
    // a couple of smoothing passes keep the spectrum gentle
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> lap = laplacian(g, g.f);
        for (long i = 0; i < g.cells(); ++i) g.f[i] += 0.1 * lap[i];
    }
    fill_random_v(g, 92, 0.5);
    double dt = 0.5 * stability_bound(g);
    EvolveResult res = evolve(g, 20.0, dt, 1e-10, 25);
    REQUIRE(res.series.size() > 3);
    for (std::size_t k = 1; k < res.series.size(); ++k) {
        double slack = 1e-9 * (1.0 + std::fabs(res.series[k - 1].H));
        CHECK(res.series[k].H <= res.series[k - 1].H + slack);
    }
}

TEST_CASE("gamma < 0 near the origin relaxes to v = 0") {
    FieldGrid g = make_grid({16, 16}, 1.0, 0.8, 0.0, -1.0, 0.01);
    fill_random_v(g, 13, 0.05);
    double dt = 0.5 * stability_bound(g);
    EvolveResult res = evolve(g, 200.0, dt, 1e-10, 50);
    CHECK(res.converged);
    CHECK_FALSE(res.diverged);
    for (double vi : g.v) CHECK(std::fabs(vi) < 1e-6);
}

TEST_CASE("gamma < 0 runaway trips the divergence guard") {
    FieldGrid g = make_grid({8}, 1.0, 2.0, 1.5, -1.0, 0.0);
    EvolveResult res = evolve(g, 100.0, 1e-4, 1e-12, 100);
    CHECK(res.diverged);
    CHECK_FALSE(res.converged);
}

TEST_CASE("grid validation rejects malformed inputs") {
    FieldGrid g = make_grid({4, 4}, 1.0, 1.0, 0.0);
    g.f[3] = 0.0;
    CHECK_THROWS(g.validate());
    g.f[3] = 1.0;
    g.dx = 0.0;
    CHECK_THROWS(g.validate());
    g.dx = 1.0;
    g.v.pop_back();
    CHECK_THROWS(g.validate());
    FieldGrid d4;
    d4.dims = {2, 2, 2, 2};
    d4.v.assign(16, 0.0);
    d4.f.assign(16, 1.0);
    CHECK_THROWS(d4.validate());
}

TEST_CASE("rhs and lyapunov are worker-count invariant bit for bit") {
    FieldGrid g = make_grid({48, 48}, 0.5, 1.0, 0.0, 1.0, 0.02);
    fill_smooth_f(g, 71);
    fill_random_v(g, 72);
    std::vector<double> r1 = rhs(g, 1);
    std::vector<double> r8 = rhs(g, 8);
    CHECK(std::memcmp(r1.data(), r8.data(), r1.size() * sizeof(double)) == 0);
    CHECK(lyapunov(g, 1) == lyapunov(g, 8));
}
