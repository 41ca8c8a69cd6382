#include <doctest.h>

#include <random>
#include <sstream>

#include "dnls/library.hpp"
#include "dnls/model.hpp"

using namespace dnls;

TEST_CASE("extended masses flip sign for conjugated indices") {
    const MassVector mv{{1.0, 2.5}};
    CHECK(mv.extended(1) == doctest::Approx(1.0));
    CHECK(mv.extended(2) == doctest::Approx(2.5));
    CHECK(mv.extended(3) == doctest::Approx(-1.0));
    CHECK(mv.extended(4) == doctest::Approx(-2.5));
    CHECK_THROWS(mv.extended(0));
    CHECK_THROWS(mv.extended(5));
}

TEST_CASE("gauge weight and derivative count") {
    // |u|^2 u with N = 1: two plain factors, one conjugated
    const Monomial cubic{1, {Factor{1, 0}, Factor{1, 0}, Factor{2, 0}}, 1.0};
    CHECK(cubic.gauge_weight(1) == 1);
    CHECK(cubic.derivative_count() == 0);

    const Monomial deriv{1, {Factor{1, 1}, Factor{2, 1}, Factor{2, 0}}, 1.0};
    CHECK(deriv.gauge_weight(1) == -1);
    CHECK(deriv.derivative_count() == 2);
}

TEST_CASE("canonicalize merges permuted monomials and drops zeros") {
    const cplx c1{0.25, -1.0}, c2{0.75, 1.0};
    CubicSystem sys(1, MassVector{{1.0}},
                    {Monomial{1, {Factor{1, 0}, Factor{2, 0}, Factor{1, 1}}, c1},
                     Monomial{1, {Factor{1, 1}, Factor{1, 0}, Factor{2, 0}}, c2},
                     Monomial{1, {Factor{2, 1}, Factor{1, 0}, Factor{1, 0}},
                              cplx{1e-16, 0.0}}});
    sys.canonicalize();
    REQUIRE(sys.monomials().size() == 1);
    CHECK(sys.monomials()[0].coeff == c1 + c2);

    CubicSystem copy = sys;
    copy.canonicalize();
    CHECK(copy.monomials() == sys.monomials());
}

TEST_CASE("evaluate_F matches hand evaluation") {
    const cplx u{0.4, -0.7}, ux{-0.3, 0.2};
    SUBCASE("plain cubic") {
        const CubicSystem sys = single_nls(cplx{-1.0, 0.5});
        const auto F = sys.evaluate_F(std::vector<cplx>{u},
                                      std::vector<cplx>{ux});
        const cplx want = cplx{-1.0, 0.5} * std::norm(u) * u;
        CHECK(std::abs(F[0] - want) < 1e-15);
    }
    SUBCASE("derivative coupling") {
        const CubicSystem sys = dnls_single();
        const auto F = sys.evaluate_F(std::vector<cplx>{u},
                                      std::vector<cplx>{ux});
        const cplx want =
            cplx{0.0, -1.0} * (std::norm(u) * u + std::norm(ux) * u);
        CHECK(std::abs(F[0] - want) < 1e-15);
    }
}

TEST_CASE("symbol of the derivative model carries the (1 + xi^2) weight") {
    const CubicSystem sys = dnls_single();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double xi = dist(rng);
        const cplx Y{dist(rng), dist(rng)};
        const auto p = sys.symbol_p(xi, std::vector<cplx>{Y});
        const cplx want =
            cplx{0.0, -1.0} * (1.0 + xi * xi) * std::norm(Y) * Y;
        CHECK(std::abs(p[0] - want) < 1e-12 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("model text round trip") {
    const CubicSystem sys =
        coupled_derivative(1.0, cplx{0.3, -0.9}, cplx{-0.2, 0.4},
                           cplx{1.5, -0.1});
    std::stringstream buf;
    save_model(sys, buf, "round trip");
    const CubicSystem back = parse_model(buf);
    CHECK(back.n_components() == sys.n_components());
    CHECK(back.masses().m == sys.masses().m);
    CHECK(back.monomials() == sys.monomials());
}

TEST_CASE("malformed model files are rejected") {
    const auto reject = [](const char* text) {
        std::stringstream buf(text);
        CHECK_THROWS(parse_model(buf));
    };
    reject("masses 1\nmonomial 1 1 0 1 0 2 0 1 0\n");       // missing N
    reject("N 1\nmasses 1\nmonomial 1 5 0 1 0 2 0 1 0\n");  // k out of range
    reject("N 1\nmasses 1\nmonomial 1 1 2 1 0 2 0 1 0\n");  // l not 0/1
    reject("N 2\nmasses 1\n");                              // masses short
    reject("N 1\nmasses 0\n");                              // zero mass
    reject("N 1\nmasses 1\nfrobnicate 3\n");                // unknown directive
}

TEST_CASE("shipped model files match the library builders") {
    const auto same = [](const std::string& path, const CubicSystem& want) {
        const CubicSystem got = load_model("models/" + path);
        CHECK(got.n_components() == want.n_components());
        CHECK(got.masses().m == want.masses().m);
        REQUIRE(got.monomials().size() == want.monomials().size());
        for (std::size_t i = 0; i < want.monomials().size(); ++i) {
            CHECK(got.monomials()[i].target == want.monomials()[i].target);
            CHECK(got.monomials()[i].factors == want.monomials()[i].factors);
            CHECK(std::abs(got.monomials()[i].coeff -
                           want.monomials()[i].coeff) < 1e-15);
        }
    };
    same("nls_single_real.txt", single_nls(cplx{1.0, 0.0}));
    same("nls_single_dissipative.txt", single_nls(cplx{0.0, -1.0}));
    same("dnls_single.txt", dnls_single());
    same("nls_two.txt", two_component(1.0, 3.0, cplx{0.0, -1.0},
                                      cplx{0.0, -1.0}, cplx{1.0, 0.0},
                                      cplx{0.5, 0.0}));
    same("coupled_derivative.txt",
         coupled_derivative(1.0, cplx{0.0, -1.0}, cplx{0.0, 1.0},
                            cplx{1.0, 0.0}));
    same("null_structure.txt", null_structure_three(1.0));
}
