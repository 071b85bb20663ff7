#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nls/asymptotics.hpp"
#include "nls/diagnostics.hpp"
#include "nls/groundstate.hpp"
#include "nls/potential.hpp"
#include "nls/soliton.hpp"

using namespace nls;

namespace {

const SolitonProfile& prof1() {
    static SolitonProfile p = solve_soliton(1, 2.0);
    return p;
}
const SolitonConstants& consts1() {
    static SolitonConstants c = soliton_constants(prof1());
    return c;
}

Field soliton_on(const Grid& ref) {
    Field w(ref);
    for (int i = 0; i < ref.points; ++i)
        w.values[static_cast<size_t>(i)] = prof1().value_at(std::abs(ref.coord(i)));
    if (ref.dim != 1) throw std::logic_error("1d helper");
    return w;
}

} // namespace

TEST_CASE("rescale inverts the explicit construction") {
    double rho = 8.0 * std::sqrt(6.0);
    Grid g{1, 8.0, 2049};
    MinimizeResult fake;
    fake.u = tilde_minimizer(consts1(), prof1(), rho, std::vector<double>{0.3}, g);
    fake.rho = rho;
    fake.exponent = 2.0;
    fake.max_point = subgrid_max_point(fake.u);

    Field ubar = rescale(fake, consts1());
    CHECK(std::abs(mass(ubar) - consts1().a_star) < 1e-4);

    Field w = soliton_on(ubar.grid);
    CHECK(max_abs_diff(ubar, w) < 1e-4);
}

TEST_CASE("rescale of a converged flat-problem minimizer") {
    Potential flat;
    flat.dim = 1;
    flat.value = [](std::span<const double>) { return 0.0; };
    flat.describe = "zero";
    double rho = 8.0 * std::sqrt(6.0);
    Grid g{1, 8.0, 2049};
    auto res = minimize(g, flat, prof1(), rho);

    Field ubar = rescale(res, consts1());
    Field w = soliton_on(ubar.grid);
    CHECK(max_abs_diff(ubar, w) < 2e-3);
    CHECK(std::abs(mass(ubar) - consts1().a_star) < 1e-3);
}

TEST_CASE("rescale refuses twin peaks") {
    Grid g{1, 8.0, 1601};
    MinimizeResult fake;
    fake.u = Field(g);
    for (int i = 0; i < g.points; ++i) {
        double x = g.coord(i);
        fake.u.values[static_cast<size_t>(i)] =
            std::exp(-40.0 * (x - 2.0) * (x - 2.0)) + std::exp(-40.0 * (x + 2.0) * (x + 2.0));
    }
    zero_boundary(fake.u);
    normalize(fake.u);
    fake.rho = 100.0;
    fake.exponent = 2.0;
    fake.max_point = subgrid_max_point(fake.u);
    CHECK_THROWS_AS(rescale(fake, consts1()), ambiguity_error);

    fake.rho = 0.0;
    CHECK_THROWS_AS(rescale(fake, consts1()), domain_error);
}

TEST_CASE("decay fit classifies tails") {
    Grid ref = reference_grid(1);

    // soliton: rate -1, prefactor the far-field amplitude
    Field w = soliton_on(ref);
    DecayFit fit = decay_check(w);
    CHECK(fit.decay_ok);
    CHECK(fit.rate == doctest::Approx(-1.0).epsilon(2e-2));
    CHECK(fit.coef == doctest::Approx(6.0).epsilon(0.1));
    CHECK(fit.points > 100);

    // Gaussian: much steeper than the bound over the window
    Field gauss(ref);
    for (int i = 0; i < ref.points; ++i) {
        double x = ref.coord(i);
        gauss.values[static_cast<size_t>(i)] = std::exp(-0.5 * x * x);
    }
    fit = decay_check(gauss);
    CHECK(fit.decay_ok);
    CHECK(fit.rate < -2.0);

    // algebraic tail: too slow
    Field alg(ref);
    for (int i = 0; i < ref.points; ++i) {
        double x = ref.coord(i);
        alg.values[static_cast<size_t>(i)] = 1.0 / (1.0 + x * x);
    }
    fit = decay_check(alg);
    CHECK_FALSE(fit.decay_ok);

    // constant field never enters the window
    Field flat(ref);
    for (double& v : flat.values) v = 0.5;
    CHECK_THROWS_AS(decay_check(flat), accuracy_error);
}

TEST_CASE("concentration report on a quartic well sweep") {
    Potential pot = power_well(1, {0.0}, 4.0);
    auto sel = select_concentration(pot, prof1());
    REQUIRE(sel.z0.size() == 1);

    std::vector<double> rhos = {6.0, 12.0, 24.0, 48.0, 96.0};
    auto results = sweep(pot, prof1(), rhos);
    auto rep = concentration_rate(results, consts1(), prof1(), pot, sel);

    REQUIRE(rep.rho_list.size() == rhos.size());
    // profile convergence, nonincreasing within 10% noise
    for (size_t i = 0; i + 1 < rep.distances_linf.size(); ++i)
        CHECK(rep.distances_linf[i + 1] <= 1.1 * rep.distances_linf[i]);
    CHECK(rep.distances_linf.back() < 0.05);
    for (size_t i = rep.decay_ok.size() - 3; i < rep.decay_ok.size(); ++i)
        CHECK(rep.decay_ok[i]);
    // symmetric well: peak pinned to the origin, offset well below eps
    for (const auto& r : rep.rate_points) CHECK(std::abs(r[0]) < 1.0);
    CHECK(std::abs(rep.rate_points.back()[0]) < 0.5);

    // the energy-gap slope measures half the q-minimum over the soliton mass
    double half_ratio = rep.fitted_lambda_bar * consts1().a_star / sel.lambda_bar0;
    CHECK(half_ratio > 0.45);
    CHECK(half_ratio < 0.55);
}

TEST_CASE("selection violation is reported") {
    Potential pot = product_wells({-1.0, 1.0}, {4.0, 2.0});
    auto sel = select_concentration(pot, prof1());
    REQUIRE(sel.z0.size() == 1);
    REQUIRE(pot.wells[sel.z0.front()].location[0] == doctest::Approx(-1.0));

    // two synthetic entries parked at the wrong (right-hand) well
    std::vector<MinimizeResult> fakes;
    for (double rho : {12.0, 130.0}) {
        Grid g{1, 8.0, 4097};
        MinimizeResult r;
        r.u = tilde_minimizer(consts1(), prof1(), rho, std::vector<double>{1.0}, g);
        r.rho = rho;
        r.exponent = 2.0;
        r.energy = tilde_e(consts1(), rho);
        r.mu = tilde_mu(consts1(), rho);
        r.max_point = subgrid_max_point(r.u);
        fakes.push_back(std::move(r));
    }
    CHECK_THROWS_AS(concentration_rate(fakes, consts1(), prof1(), pot, sel), selection_error);
}

TEST_CASE("probe finds one basin in a single well") {
    Potential pot = quadratic_well({1.0});
    Grid g{1, 8.0, 1025};
    auto rep = uniqueness_probe(g, pot, prof1(), 40.0, 6, 7);

    REQUIRE(rep.runs.size() == 6);
    CHECK(rep.max_distance < 1e-6);
    CHECK(rep.energy_spread < 1e-9);

    auto one = uniqueness_probe(g, pot, prof1(), 40.0, 1, 7);
    CHECK(one.max_distance == 0.0);
}

TEST_CASE("probe splits across a symmetric double well") {
    Potential pot = product_wells({-1.0, 1.0}, {2.0, 2.0});
    Grid g{1, 8.0, 1025};
    auto rep = uniqueness_probe(g, pot, prof1(), 40.0, 8, 11);

    int left = 0, right = 0;
    for (const auto& r : rep.runs) (r.max_point[0] < 0 ? left : right)++;
    CHECK(left > 0);
    CHECK(right > 0);
    CHECK(rep.max_distance > 0.1);
}

TEST_CASE("probe is deterministic across thread counts") {
    Potential pot = quadratic_well({1.0});
    Grid g{1, 8.0, 513};
    auto a = uniqueness_probe(g, pot, prof1(), 12.0, 3, 42, 1);
    auto b = uniqueness_probe(g, pot, prof1(), 12.0, 3, 42, 2);
    REQUIRE(a.runs.size() == b.runs.size());
    for (size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].energy == b.runs[i].energy);
        CHECK(max_abs_diff(a.runs[i].u, b.runs[i].u) == 0.0);
    }
}

TEST_CASE("multiplier bookkeeping") {
    Potential pot = quadratic_well({1.0});
    std::vector<double> rhos = {10.0, 12.0, 14.4};
    auto out = sweep(pot, prof1(), rhos);
    auto rep = equivalence_checks(out[0], out[1], out[2]);
    CHECK(rep.norm_ok);
    CHECK(rep.mu_ok);
    CHECK(rep.mu_gap_rel < 0.01);

    // rho = 0: mu = 2e
    Grid g{1, 12.0, 1201};
    auto res = minimize(g, pot, prof1(), 0.0);
    auto rep0 = equivalence_checks(res);
    CHECK(rep0.norm_ok);
    CHECK(rep0.mu_ok);
    CHECK(rep0.mu_gap_rel < 1e-3);

    CHECK_THROWS_AS(equivalence_checks(out[1], out[0], out[2]), domain_error);
}

TEST_CASE("report input guards") {
    Potential pot = quadratic_well({1.0});
    auto sel = select_concentration(pot, prof1());
    std::vector<double> rhos = {10.0, 12.0};
    auto out = sweep(pot, prof1(), rhos);
    // less than a decade of rho
    CHECK_THROWS_AS(concentration_rate(out, consts1(), prof1(), pot, sel), domain_error);
}
