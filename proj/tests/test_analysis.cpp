#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "dnls/analysis.hpp"
#include "dnls/library.hpp"

using namespace dnls;

namespace {
const cplx kI{0.0, 1.0};

ProfileState sample_profile(double t, int n_components, std::uint64_t seed) {
    ProfileState p;
    p.t = t;
    p.xi_grid = uniform_xi_grid(2.0, 33);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    p.alpha.assign(n_components, std::vector<cplx>(p.xi_grid.size()));
    for (auto& comp : p.alpha)
        for (cplx& v : comp) v = cplx{dist(rng), dist(rng)};
    return p;
}
}  // namespace

TEST_CASE("uniform xi grid is symmetric and ordered") {
    const std::vector<double> xi = uniform_xi_grid(3.0, 7);
    REQUIRE(xi.size() == 7);
    CHECK(xi.front() == doctest::Approx(-3.0));
    CHECK(xi.back() == doctest::Approx(3.0));
    CHECK(xi[3] == doctest::Approx(0.0));
}

TEST_CASE("profile of a free evolution is time invariant") {
    const Grid1D grid = Grid1D::make(600.0, 2048);
    const MassVector masses{{1.0}};
    FieldState s{0.0, grid, {std::vector<cplx>(grid.nx)}};
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.node(i);
        s.values[0][i] = 0.2 * std::exp(-x * x);
    }
    const std::vector<double> xi = uniform_xi_grid(2.0, 65);
    s = free_propagate(s, 2.0, masses);
    const ProfileState early = extract_profile(s, masses, xi);
    s = free_propagate(s, 18.0, masses);
    const ProfileState late = extract_profile(s, masses, xi);
    double worst = 0.0;
    for (std::size_t q = 0; q < xi.size(); ++q)
        worst = std::max(worst,
                         std::abs(early.alpha[0][q] - late.alpha[0][q]));
    CHECK(worst < 1e-10);
    CHECK_THROWS(extract_profile(FieldState{0.5, grid, s.values}, masses, xi));
}

TEST_CASE("reduced ODE reproduces the dissipative closed form") {
    const CubicSystem sys = single_nls(-kI);
    ProfileState init;
    init.t = 1.0;
    init.xi_grid = {0.0, 0.7, 1.4};
    init.alpha = {{cplx{0.3, 0.1}, cplx{0.2, -0.05}, cplx{0.12, 0.08}}};
    const ProfileState fin = integrate_reduced(sys, init, 1000.0, 4000);
    for (std::size_t q = 0; q < init.xi_grid.size(); ++q) {
        const double a0 = std::norm(init.alpha[0][q]);
        const double want = a0 / (1.0 + 2.0 * a0 * std::log(1000.0));
        CHECK(std::abs(std::norm(fin.alpha[0][q]) - want) < 1e-6);
    }
}

TEST_CASE("Lyapunov quantity is nonincreasing along the reduced flow") {
    const CubicSystem sys =
        coupled_derivative(1.0, -kI, kI, cplx{1.0, 0.0});
    const HermitianForm A = HermitianForm::diagonal({3.0, 2.0});
    ProfileState state = sample_profile(1.0, 2, 99);
    std::vector<double> nu = lyapunov_nu(state, A);
    for (int step = 0; step < 20; ++step) {
        const double t_next = state.t * 1.3;
        state = integrate_reduced(sys, state, t_next, 200);
        const std::vector<double> nu_next = lyapunov_nu(state, A);
        for (std::size_t q = 0; q < nu.size(); ++q)
            CHECK(nu_next[q] <= nu[q] + 1e-10);
        nu = nu_next;
    }
}

TEST_CASE("comparison bound holds and matches the closed form") {
    SUBCASE("closed form at p = 2, C1 = 0") {
        const KmsReport rep =
            kms_verify(KmsInput{0.7, 0.0, 2.0, 1.5, 0.8}, 1e5, 120);
        CHECK(rep.pstar == doctest::Approx(2.0));
        for (std::size_t i = 0; i < rep.t.size(); ++i) {
            const double want =
                0.8 / (1.0 + 0.7 * 0.8 * std::log(rep.t[i] / 2.0));
            CHECK(std::abs(rep.psi[i] - want) < 1e-8);
        }
        CHECK(rep.passes());
    }
    SUBCASE("forced case stays under the bound") {
        const KmsReport rep =
            kms_verify(KmsInput{1.0, 1.0, 1.5, 1.25, 1.0}, 1e5, 120);
        CHECK(rep.passes());
    }
    SUBCASE("invalid exponents are rejected") {
        CHECK_THROWS(kms_verify(KmsInput{1.0, 0.0, 1.0, 1.25, 1.0}, 1e4, 50));
        CHECK_THROWS(kms_verify(KmsInput{1.0, 0.0, 2.0, 1.0, 1.0}, 1e4, 50));
    }
}

TEST_CASE("decay fitting recovers synthetic laws") {
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i <= 60; ++i) {
        const double t = 10.0 * std::pow(100.0, i / 60.0);
        series.emplace_back(t, 0.5 / std::sqrt(1.0 + t));
    }
    const DecayFit pure =
        fit_decay(series, DecayModel::PurePower, 0.1, 20.0, 1000.0);
    CHECK(std::abs(pure.slope) < 1e-6);
    CHECK(pure.constancy_ratio == doctest::Approx(1.0));

    // a genuine extra log factor makes the power-log compensation flattest
    std::vector<std::pair<double, double>> logged;
    for (const auto& [t, v] : series)
        logged.emplace_back(t, v / std::sqrt(1.0 + 0.01 * std::log(2.0 + t)));
    const DecayFit pl =
        fit_decay(logged, DecayModel::PowerLog, 0.1, 20.0, 1000.0);
    const DecayFit pp =
        fit_decay(logged, DecayModel::PurePower, 0.1, 20.0, 1000.0);
    CHECK(pl.constancy_ratio < pp.constancy_ratio);
}

TEST_CASE("scattering check demands an exactly vanishing symbol") {
    const std::vector<ProfileState> profiles{
        sample_profile(10.0, 1, 1), sample_profile(20.0, 1, 1),
        sample_profile(40.0, 1, 1), sample_profile(80.0, 1, 1)};
    CHECK_THROWS(scattering_check(single_nls(-kI), profiles, 0.1));
}

TEST_CASE("profile csv round trip") {
    const ProfileState p = sample_profile(7.5, 2, 12);
    const auto path = std::filesystem::temp_directory_path() /
                      "dnls_profile_roundtrip.csv";
    write_profile_csv(p, path.string());
    const ProfileState back = read_profile_csv(path.string());
    CHECK(back.t == doctest::Approx(p.t));
    REQUIRE(back.alpha.size() == p.alpha.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < p.alpha.size(); ++j)
        for (std::size_t q = 0; q < p.xi_grid.size(); ++q)
            worst = std::max(worst,
                             std::abs(back.alpha[j][q] - p.alpha[j][q]));
    CHECK(worst < 1e-14);
    std::filesystem::remove(path);
}
