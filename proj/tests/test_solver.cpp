#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dnls/library.hpp"
#include "dnls/solver.hpp"

using namespace dnls;

namespace {

FieldState sech_soliton(const Grid1D& grid, double t) {
    FieldState s{t, grid, {std::vector<cplx>(grid.nx)}};
    for (int i = 0; i < grid.nx; ++i)
        s.values[0][i] = std::polar(1.0, t / 2.0) / std::cosh(grid.node(i));
    return s;
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// smooth bump supported well inside the box
std::vector<cplx> interior_bump(const Grid1D& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-grid.length / 8.0,
                                               grid.length / 8.0);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::vector<cplx> u(grid.nx, cplx{0.0, 0.0});
    for (int g = 0; g < 4; ++g) {
        const double c = pos(rng);
        const cplx a{amp(rng), amp(rng)};
        const double w = 1.0 + std::abs(amp(rng));
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.node(i) - c;
            u[i] += a * std::exp(-x * x / (2.0 * w * w));
        }
    }
    return u;
}

}  // namespace

TEST_CASE("grid wavenumbers and dealias cut") {
    const Grid1D grid = Grid1D::make(2.0 * std::numbers::pi, 16);
    CHECK(grid.wavenumber(0) == doctest::Approx(0.0));
    CHECK(grid.wavenumber(1) == doctest::Approx(1.0));
    CHECK(grid.wavenumber(15) == doctest::Approx(-1.0));
    CHECK(grid.dealias_cut() == 5);
    CHECK_THROWS(Grid1D::make(1.0, 100));  // not a power of two
}

TEST_CASE("fft round trip and spectral derivative of a plane wave") {
    const Grid1D grid = Grid1D::make(2.0 * std::numbers::pi, 64);
    std::vector<cplx> u(grid.nx);
    for (int i = 0; i < grid.nx; ++i)
        u[i] = std::polar(1.0, 3.0 * grid.node(i));
    const Fft& fft = fft_for(grid.nx);
    CHECK(max_diff(fft.backward(fft.forward(u)), u) < 1e-14);
    const std::vector<cplx> du = spectral_derivative(grid, u);
    for (int i = 0; i < grid.nx; ++i)
        CHECK(std::abs(du[i] - cplx{0.0, 3.0} * u[i]) < 1e-12);
}

TEST_CASE("free propagation is unitary and invertible") {
    const Grid1D grid = Grid1D::make(40.0, 256);
    FieldState s{0.0, grid, {interior_bump(grid, 3)}};
    const MassVector masses{{2.0}};
    const double l2_before = l2_norm(grid, s.values[0]);
    FieldState fwd = free_propagate(s, 1.7, masses);
    CHECK(l2_norm(grid, fwd.values[0]) == doctest::Approx(l2_before));
    const FieldState back = free_propagate(fwd, -1.7, masses);
    CHECK(max_diff(back.values[0], s.values[0]) < 1e-13);
}

TEST_CASE("integrating-factor step with zero nonlinearity is the free flow") {
    const Grid1D grid = Grid1D::make(40.0, 256);
    CubicSystem sys(1, MassVector{{1.0}}, {});
    FieldState s{0.0, grid, {interior_bump(grid, 4)}};
    const FieldState stepped = step_ifrk4(sys, s, 0.3);
    const FieldState freed = free_propagate(s, 0.3, sys.masses());
    CHECK(stepped.values[0] == freed.values[0]);  // bitwise: shared phase code
}

TEST_CASE("sech soliton is preserved by the focusing cubic flow") {
    const Grid1D grid = Grid1D::make(80.0, 1024);
    const CubicSystem sys = single_nls(cplx{-1.0, 0.0});
    FieldState s = sech_soliton(grid, 0.0);
    const double dt = 1e-3;
    for (int i = 0; i < 1000; ++i) s = step_ifrk4(sys, s, dt);
    CHECK(max_diff(s.values[0], sech_soliton(grid, 1.0).values[0]) < 1e-7);
}

TEST_CASE("fourth-order convergence in dt on the soliton") {
    const Grid1D grid = Grid1D::make(80.0, 1024);
    const CubicSystem sys = single_nls(cplx{-1.0, 0.0});
    const auto err_at = [&](double dt) {
        FieldState s = sech_soliton(grid, 0.0);
        const long n = std::llround(1.0 / dt);
        for (long i = 0; i < n; ++i) s = step_ifrk4(sys, s, dt);
        return max_diff(s.values[0], sech_soliton(grid, 1.0).values[0]);
    };
    const double ratio = err_at(0.02) / err_at(0.01);
    CHECK(ratio > 12.8);
    CHECK(ratio < 19.2);
}

TEST_CASE("dealiased band stays empty under the nonlinear flow") {
    const Grid1D grid = Grid1D::make(40.0, 128);
    const CubicSystem sys = single_nls(cplx{-1.0, 0.0});
    // start from data with an exactly empty band beyond the 2/3 cut
    std::vector<cplx> u = interior_bump(grid, 5);
    const Fft& fft = fft_for(grid.nx);
    std::vector<cplx> hat = fft.forward(u);
    for (int n = 0; n < grid.nx; ++n) {
        const int s = n <= grid.nx / 2 ? n : n - grid.nx;
        if (std::abs(s) > grid.dealias_cut()) hat[n] = cplx{0.0, 0.0};
    }
    FieldState s{0.0, grid, {fft.backward(hat)}};
    for (int i = 0; i < 25; ++i) s = step_ifrk4(sys, s, 0.01);
    hat = fft.forward(s.values[0]);
    double peak = 0.0;
    for (const cplx& v : hat) peak = std::max(peak, std::abs(v));
    // the RHS is dealiased in spectral space but the state lives on the
    // nodes, so the forbidden band only stays empty up to FFT roundoff
    for (int n = 0; n < grid.nx; ++n) {
        const int k = n <= grid.nx / 2 ? n : n - grid.nx;
        if (std::abs(k) > grid.dealias_cut())
            CHECK(std::abs(hat[n]) < 1e-12 * peak);
    }
}

TEST_CASE("run samples, snapshots, determinism and blow-up") {
    const Grid1D grid = Grid1D::make(40.0, 256);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    cfg.sample_times = {0.0, 0.5, 1.0};
    cfg.snapshot_times = {1.0};

    SUBCASE("zero data stays zero") {
        const CubicSystem sys = single_nls(cplx{-1.0, 0.0});
        const FieldState zero{0.0, grid,
                              {std::vector<cplx>(grid.nx, cplx{})}};
        const Trajectory traj = run(sys, cfg, zero);
        REQUIRE(traj.samples.size() == 3);
        for (const Observables& o : traj.samples) {
            CHECK(o.l2[0] == 0.0);
            CHECK(o.linf[0] == 0.0);
        }
    }
    SUBCASE("identical runs agree bitwise") {
        const CubicSystem sys = single_nls(cplx{0.0, -1.0});
        InitialData data;
        const FieldState init = make_initial(grid, 1, 0.3, data);
        const Trajectory a = run(sys, cfg, init);
        const Trajectory b = run(sys, cfg, init);
        REQUIRE(a.snapshots.size() == 1);
        CHECK(a.snapshots[0].values == b.snapshots[0].values);
    }
    SUBCASE("focusing blow-up is detected") {
        const CubicSystem sys = single_nls(cplx{-1.0, 0.0});
        SolverConfig hot = cfg;
        hot.t_end = 5.0;
        hot.blowup_ceiling = 1e3;
        hot.sample_times = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
        InitialData data;
        const FieldState init = make_initial(grid, 1, 12.0, data);
        const Trajectory traj = run(sys, hot, init);
        CHECK_FALSE(traj.completed);
        CHECK(traj.blowup_time >= 0.0);
    }
}

TEST_CASE("scaled Fourier transform of a Gaussian") {
    // with phi = exp(-x^2/2): hat(phi)(k) = exp(-k^2/2) and
    // F_m phi(xi) = |m|^{1/2} e^{-i pi sgn(m)/4} exp(-(m xi)^2/2)
    const Grid1D grid = Grid1D::make(80.0, 1024);
    std::vector<cplx> phi(grid.nx);
    for (int i = 0; i < grid.nx; ++i)
        phi[i] = std::exp(-grid.node(i) * grid.node(i) / 2.0);
    for (double m : {1.0, 3.0, -2.0}) {
        const std::vector<double> xi{0.0, 0.4, -1.1};
        const std::vector<cplx> out = scaled_fourier(phi, grid, m, xi);
        for (std::size_t q = 0; q < xi.size(); ++q) {
            const cplx want =
                std::sqrt(std::abs(m)) *
                std::polar(1.0,
                           -std::numbers::pi / 4.0 * (m > 0 ? 1.0 : -1.0)) *
                std::exp(-m * m * xi[q] * xi[q] / 2.0);
            CHECK(std::abs(out[q] - want) < 1e-12);
        }
    }
}

TEST_CASE("J operator obeys the commutation relation [d/dx, J_m] = 1") {
    const Grid1D grid = Grid1D::make(60.0, 512);
    const MassVector masses{{1.0, -2.5}};
    for (int comp : {1, 2}) {
        FieldState s{2.0, grid, {interior_bump(grid, 6), interior_bump(grid, 7)}};
        const JResult ju = apply_J(s, comp, masses);
        CHECK_FALSE(ju.boundary_warning);
        const std::vector<cplx> dju = spectral_derivative(grid, ju.values);
        FieldState ds = s;
        ds.values[comp - 1] = spectral_derivative(grid, s.values[comp - 1]);
        const JResult jdu = apply_J(ds, comp, masses);
        double worst = 0.0;
        for (int i = 0; i < grid.nx; ++i)
            worst = std::max(
                worst, std::abs(dju[i] - jdu.values[i] - s.values[comp - 1][i]));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("boundary-heavy data raises the J warning") {
    const Grid1D grid = Grid1D::make(60.0, 512);
    std::vector<cplx> u(grid.nx, cplx{1.0, 0.0});  // constant touches the edge
    FieldState s{1.0, grid, {u}};
    CHECK(apply_J(s, 1, MassVector{{1.0}}).boundary_warning);
}
