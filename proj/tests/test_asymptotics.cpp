#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nls/asymptotics.hpp"

using namespace nls;

namespace {

SolitonConstants consts(int d, double p) { return soliton_constants(solve_soliton(d, p)); }

} // namespace

TEST_CASE("flat-problem energy values for d=1, p=2") {
    SolitonConstants c = consts(1, 2.0);
    CHECK(tilde_e(c, std::sqrt(6.0)) == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(tilde_e(c, 1.0) == doctest::Approx(-0.3 * std::pow(6.0, -2.0 / 3.0)).epsilon(1e-10));
    CHECK(tilde_e(c, 1.0) == doctest::Approx(-0.09086).epsilon(1e-3));
    CHECK(tilde_e(c, 100.0) < tilde_e(c, 10.0));
}

TEST_CASE("scaling law of the flat energy across exponents") {
    for (auto [d, p] : {std::pair{1, 2.0}, std::pair{1, 3.0}, std::pair{1, 1.5}, std::pair{2, 2.0}}) {
        SolitonConstants c = consts(d, p);
        double s = 4.0 * (p - 1.0) / (4.0 - d * (p - 1.0));
        for (double rho : {0.5, 2.0, 17.0}) {
            CHECK(tilde_e(c, 2.0 * rho) / tilde_e(c, rho) ==
                  doctest::Approx(std::pow(2.0, s)).epsilon(1e-12));
        }
    }
}

TEST_CASE("blow-up scale and its exponent identity") {
    SolitonConstants c = consts(1, 2.0);
    CHECK(epsilon_scale(c, 8.0 * std::sqrt(6.0)) == doctest::Approx(0.25).epsilon(1e-12));
    for (auto [d, p] : {std::pair{1, 2.0}, std::pair{1, 3.0}, std::pair{2, 2.0}}) {
        SolitonConstants cc = consts(d, p);
        for (double rho : {0.3, 1.0, 7.0, 123.0}) {
            double eps = epsilon_scale(cc, rho);
            CHECK(eps > 0.0);
            CHECK(eps * eps * energy_scale(cc, rho) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(epsilon_scale(c, 20.0) < epsilon_scale(c, 10.0));
}

TEST_CASE("two-term prediction is an exact algebraic split") {
    SolitonConstants c = consts(1, 2.0);
    double rho = 30.0, lam = 7.739, r = 2.0;
    double gap = predicted_e(c, rho, lam, r) - tilde_e(c, rho);
    CHECK(gap == doctest::Approx(lam / c.a_star * std::pow(epsilon_scale(c, rho), r)).epsilon(1e-15));
    CHECK(predicted_e(c, rho, 0.0, r) == tilde_e(c, rho));
    CHECK(predicted_e(c, rho, lam, r) > tilde_e(c, rho));

    AsymptoticsReport rep = asymptotics_report(c, rho, lam, r);
    CHECK(rep.rho == rho);
    CHECK(rep.tilde_e == tilde_e(c, rho));
    CHECK(rep.epsilon == epsilon_scale(c, rho));
    CHECK(rep.predicted_e == predicted_e(c, rho, lam, r));
}

TEST_CASE("multiplier of the explicit minimizer") {
    SolitonConstants c = consts(1, 2.0);
    // At rho=1 the multiplier is -6^{-2/3} = -0.302853.
    CHECK(tilde_mu(c, 1.0) == doctest::Approx(-std::pow(6.0, -2.0 / 3.0)).epsilon(1e-10));
    CHECK(tilde_mu(c, 1.0) == doctest::Approx(-0.30285).epsilon(1e-4));
    // mu = -alpha^2 = -1/eps^2, and mu = (2 + s) tilde_e with s the energy
    // scaling exponent; both identities at a non-trivial rho.
    double rho = 8.0 * std::sqrt(6.0);
    CHECK(tilde_mu(c, rho) == doctest::Approx(-16.0).epsilon(1e-12));
    double s = 4.0 / 3.0;
    CHECK(tilde_mu(c, rho) == doctest::Approx((2.0 + s) * tilde_e(c, rho)).epsilon(1e-12));
}

TEST_CASE("explicit minimizer: mass, flat energy, multiplier") {
    SolitonProfile prof = solve_soliton(1, 2.0);
    SolitonConstants c = soliton_constants(prof);
    double rho = 8.0 * std::sqrt(6.0); // eps = 1/4
    Grid g{1, 8.0, 1025};
    double center = 0.5;
    Field u = tilde_minimizer(c, prof, rho, {&center, 1}, g);

    CHECK(mass(u) == doctest::Approx(1.0).epsilon(1e-6));

    double flat_energy = 0.5 * dirichlet_integral(u) - rho / 3.0 * lp_integral(u, 3.0);
    CHECK(flat_energy == doctest::Approx(tilde_e(c, rho)).epsilon(1e-3));

    // mu = int |u'|^2 - rho int u^3 for the flat problem at unit mass.
    double mu = dirichlet_integral(u) - rho * lp_integral(u, 3.0);
    CHECK(mu == doctest::Approx(tilde_mu(c, rho)).epsilon(1e-3));

    auto pk = subgrid_max_point(u);
    CHECK(std::abs(pk[0] - center) < 1e-3);
}

TEST_CASE("resolution and domain guards") {
    SolitonProfile prof = solve_soliton(1, 2.0);
    SolitonConstants c = soliton_constants(prof);
    double rho = 8.0 * std::sqrt(6.0);
    Grid coarse{1, 8.0, 65}; // h = 0.25 > eps/8
    double center = 0.0;
    CHECK_THROWS_AS(tilde_minimizer(c, prof, rho, {&center, 1}, coarse), resolution_error);

    CHECK_THROWS_AS(tilde_e(c, 0.0), domain_error);
    CHECK_THROWS_AS(tilde_e(c, -1.0), domain_error);
    CHECK_THROWS_AS(predicted_e(c, 1.0, -0.5, 2.0), domain_error);
    CHECK_THROWS_AS(predicted_e(c, 1.0, 1.0, 0.0), domain_error);

    SolitonConstants critical = c;
    critical.dim = 1;
    critical.exponent = 5.0; // 4 - d(p-1) = 0
    CHECK_THROWS_AS(tilde_e(critical, 1.0), domain_error);
    SolitonConstants super = c;
    super.dim = 2;
    super.exponent = 3.5;
    CHECK_THROWS_AS(epsilon_scale(super, 1.0), domain_error);
}
