#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nls/potential.hpp"

using namespace nls;

TEST_CASE("single power well") {
    Potential pot = power_well(1, {0.0}, 2.0);
    double x = 3.0;
    CHECK(eval_potential(pot, {&x, 1}) == 9.0);
    REQUIRE(pot.wells.size() == 1);
    CHECK(pot.wells[0].degree == 2.0);
    CHECK(pot.wells[0].location[0] == 0.0);
    auto cls = classify_wells(pot);
    CHECK(cls.r == 2.0);
    REQUIRE(cls.z_bar.size() == 1);
    CHECK(cls.z_bar[0][0] == 0.0);
}

TEST_CASE("product double well derives Taylor models at each root") {
    // (x-1)^2 (x+1)^4: near +1 the model is 16 x^2, near -1 it is 4 x^4.
    Potential pot = product_wells({1.0, -1.0}, {2.0, 4.0});
    REQUIRE(pot.wells.size() == 2);
    CHECK(pot.wells[0].degree == 2.0);
    CHECK(pot.wells[1].degree == 4.0);
    double one = 1.0;
    CHECK(pot.wells[0].model({&one, 1}) == doctest::Approx(16.0).epsilon(1e-14));
    CHECK(pot.wells[1].model({&one, 1}) == doctest::Approx(4.0).epsilon(1e-14));

    // Model consistency sharpens as the shell shrinks.
    for (double delta : {1e-2, 1e-3, 1e-4, 1e-5}) {
        for (double sgn : {1.0, -1.0}) {
            double xq = 1.0 + sgn * delta;
            double hq = sgn * delta;
            double ratio = eval_potential(pot, {&xq, 1}) / pot.wells[0].model({&hq, 1});
            CHECK(std::abs(ratio - 1.0) < 3.0 * delta);
        }
    }

    auto cls = classify_wells(pot);
    CHECK(cls.r == 4.0);
    REQUIRE(cls.z_bar.size() == 1);
    CHECK(cls.z_bar[0][0] == -1.0); // the flatter well wins
    CHECK(cls.z.size() == 2);

    // Remainder exponent is recorded for the derived expansion.
    CHECK(pot.wells[0].remainder_exp == 2.0);
    CHECK(pot.wells[1].remainder_exp == 4.0);
}

TEST_CASE("symmetric double well keeps both flattest wells") {
    Potential pot = product_wells({1.0, -1.0}, {2.0, 2.0});
    auto cls = classify_wells(pot);
    CHECK(cls.r == 2.0);
    CHECK(cls.z_bar.size() == 2);
}

TEST_CASE("anisotropic quadratic") {
    Potential pot = quadratic_well({1.0, 4.0});
    double x[2] = {1.0, 1.0};
    CHECK(eval_potential(pot, x) == 5.0);
    auto g = eval_gradient(pot, x);
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(8.0));
    CHECK(classify_wells(pot).r == 2.0);
}

TEST_CASE("min composite keeps every center as a well") {
    Potential pot = min_wells(2, {{0.0, 0.0}, {3.0, 1.0}}, {2.0, 4.0}, {1.0, 0.5});
    REQUIRE(pot.wells.size() == 2);
    double x[2] = {3.0, 1.0};
    CHECK(eval_potential(pot, x) == 0.0);
    double y[2] = {0.1, 0.0};
    CHECK(eval_potential(pot, y) == doctest::Approx(0.01).epsilon(1e-12));
    auto cls = classify_wells(pot);
    CHECK(cls.r == 4.0);
    REQUIRE(cls.z_bar_index.size() == 1);
    CHECK(cls.z_bar_index[0] == 1);
}

TEST_CASE("piecewise well is positively homogeneous with two slopes") {
    Potential pot = piecewise_well(0.0, 2.0, 1.0, 4.0);
    double xr = 0.5, xl = -0.5;
    CHECK(eval_potential(pot, {&xr, 1}) == doctest::Approx(0.25));
    CHECK(eval_potential(pot, {&xl, 1}) == doctest::Approx(1.0));
    auto gr = eval_gradient(pot, {&xr, 1});
    auto gl = eval_gradient(pot, {&xl, 1});
    CHECK(gr[0] == doctest::Approx(1.0));
    CHECK(gl[0] == doctest::Approx(-4.0));
}

TEST_CASE("analytic gradients agree with central differences") {
    std::mt19937_64 rng(7u);
    std::uniform_real_distribution<double> box(-4.0, 4.0);
    auto check_grad = [&](const Potential& pot, int samples) {
        std::vector<double> x(static_cast<size_t>(pot.dim));
        for (int t = 0; t < samples; ++t) {
            for (double& v : x) v = box(rng);
            bool near_well = false;
            for (const Well& w : pot.wells) {
                double dist = 0.0;
                for (size_t a = 0; a < x.size(); ++a)
                    dist += (x[a] - w.location[a]) * (x[a] - w.location[a]);
                near_well = near_well || dist < 0.04;
            }
            if (near_well) continue; // differencing is ill-conditioned at kinks and zeros
            auto ga = eval_gradient(pot, x);
            Potential blind = pot;
            blind.gradient = nullptr; // force the fallback path
            auto gf = eval_gradient(blind, x);
            for (size_t a = 0; a < x.size(); ++a) {
                double scale = std::max({std::abs(ga[a]), std::abs(gf[a]), 1.0});
                CHECK(std::abs(ga[a] - gf[a]) / scale < 1e-7);
            }
        }
    };
    check_grad(power_well(2, {0.5, -0.25}, 3.0), 40);
    check_grad(quadratic_well({1.0, 4.0, 0.5}), 40);
    check_grad(product_wells({1.0, -1.0}, {2.0, 4.0}), 40);
    check_grad(min_wells(2, {{0.0, 0.0}, {2.0, 1.0}}, {2.0, 4.0}, {1.0, 0.5}), 40);
    check_grad(piecewise_well(0.0, 2.0, 1.0, 4.0), 40);
}

TEST_CASE("homogeneity of every declared model, randomized") {
    std::mt19937_64 rng(11u);
    std::uniform_real_distribution<double> logt(std::log(0.1), std::log(10.0));
    std::normal_distribution<double> nrm;
    auto check = [&](const Potential& pot) {
        std::vector<double> x(static_cast<size_t>(pot.dim)), tx(static_cast<size_t>(pot.dim));
        for (const Well& w : pot.wells) {
            for (int t = 0; t < 200; ++t) {
                double n = 0.0;
                for (double& v : x) { v = nrm(rng); n += v * v; }
                n = std::sqrt(n);
                if (n < 1e-6) continue;
                for (double& v : x) v /= n;
                double scale = std::exp(logt(rng));
                for (size_t a = 0; a < x.size(); ++a) tx[a] = scale * x[a];
                double lhs = w.model(tx);
                double rhs = std::pow(scale, w.degree) * w.model(x);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1e-300));
            }
        }
    };
    check(power_well(3, {0.0, 0.0, 0.0}, 1.5));
    check(quadratic_well({2.0, 0.5}));
    check(product_wells({0.0, 2.0, -2.0}, {2.0, 2.0, 6.0}));
    check(piecewise_well(0.0, 4.0, 2.0, 0.5));
}

TEST_CASE("nonnegativity on a large random sample") {
    std::mt19937_64 rng(13u);
    std::uniform_real_distribution<double> box(-10.0, 10.0);
    Potential pots[] = {product_wells({1.0, -1.0, 3.0}, {2.0, 4.0, 2.0}),
                        min_wells(1, {{0.0}, {2.0}}, {2.0, 4.0}, {1.0, 1.0}),
                        piecewise_well(0.5, 2.0, 1.0, 4.0)};
    for (const Potential& pot : pots) {
        double worst = 0.0;
        std::vector<double> x(static_cast<size_t>(pot.dim));
        for (int t = 0; t < 100000; ++t) {
            for (double& v : x) v = box(rng);
            worst = std::min(worst, eval_potential(pot, x));
        }
        CHECK(worst >= 0.0);
    }
}

TEST_CASE("config-facing builder mirrors the typed builders") {
    Potential pot = build_potential(1, {{"family", "product"}, {"roots", "1,-1"}, {"degrees", "2,4"}});
    REQUIRE(pot.wells.size() == 2);
    CHECK(pot.wells[1].degree == 4.0);
    double x = 0.3;
    Potential direct = product_wells({1.0, -1.0}, {2.0, 4.0});
    CHECK(eval_potential(pot, {&x, 1}) == doctest::Approx(eval_potential(direct, {&x, 1})).epsilon(1e-15));

    Potential q = build_potential(2, {{"family", "quadratic"}, {"coeffs", "1,4"}});
    double y[2] = {1.0, 1.0};
    CHECK(eval_potential(q, y) == 5.0);

    Potential mw = build_potential(2, {{"family", "minwells"},
                                       {"centers", "(0,0);(2,1)"},
                                       {"degrees", "2,4"},
                                       {"coeffs", "1,0.5"}});
    CHECK(mw.wells.size() == 2);

    Potential pw = build_potential(1, {{"family", "piecewise"},
                                       {"degree", "2"},
                                       {"coef_right", "1"},
                                       {"coef_left", "4"}});
    double z = -1.0;
    CHECK(eval_potential(pw, {&z, 1}) == 4.0);
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(quadratic_well({1.0, -4.0}), domain_error);
    CHECK_THROWS_AS(quadratic_well({1.0, 0.0}), domain_error);
    CHECK_THROWS_AS(product_wells({1.0, 1.0}, {2.0, 2.0}), domain_error);
    CHECK_THROWS_AS(product_wells({1.0}, {-2.0}), domain_error);
    CHECK_THROWS_AS(power_well(1, {0.0}, 0.0), domain_error);
    CHECK_THROWS_AS(piecewise_well(0.0, 2.0, -1.0, 4.0), domain_error);
    CHECK_THROWS_AS(build_potential(1, {{"family", "banana"}}), config_error);
    CHECK_THROWS_AS(build_potential(1, {{"family", "power"}, {"center", "0"}}), config_error);
    CHECK_THROWS_AS(build_potential(1, {{"family", "power"}, {"center", "0"}, {"degree", "two"}}),
                    config_error);
    CHECK_THROWS_AS(build_potential(1, {{"family", "quadratic"}, {"coeffs", "1,4"}}), config_error);
}
