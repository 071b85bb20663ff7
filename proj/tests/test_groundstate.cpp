#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nls/asymptotics.hpp"
#include "nls/groundstate.hpp"
#include "nls/potential.hpp"
#include "nls/soliton.hpp"

using namespace nls;

namespace {

const SolitonProfile& prof1() {
    static SolitonProfile p = solve_soliton(1, 2.0);
    return p;
}
const SolitonProfile& prof2() {
    static SolitonProfile p = solve_soliton(2, 2.0);
    return p;
}

Potential flat_potential(int dim) {
    Potential v;
    v.dim = dim;
    v.value = [](std::span<const double>) { return 0.0; };
    v.describe = "zero potential";
    return v;
}

} // namespace

// Linear confinement with no interaction reduces to the quantum harmonic
// oscillator: lowest eigenvalue 1, energy 1/2, Gaussian eigenfunction.
TEST_CASE("harmonic oscillator limit") {
    Potential pot = quadratic_well({1.0});
    Grid g{1, 12.0, 1201};
    auto res = minimize(g, pot, prof1(), 0.0);

    CHECK(res.energy == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(chemical_potential(res, pot, 0.0) == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(std::abs(res.max_point[0]) < 2.0 * g.spacing());

    // eigenfunction: u = pi^{-1/4} exp(-x^2/2), compare after discrete renormalization
    Field gauss(g);
    for (int i = 0; i < g.points; ++i) {
        double x = g.coord(i);
        gauss.values[static_cast<size_t>(i)] = std::exp(-0.5 * x * x);
    }
    zero_boundary(gauss);
    normalize(gauss);
    CHECK(max_abs_diff(res.u, gauss) < 1e-3);
}

// With V = 0 the problem has the closed-form value and minimizer of the
// translation-invariant auxiliary functional.
TEST_CASE("flat problem matches closed form") {
    Potential flat = flat_potential(1);
    auto c = soliton_constants(prof1());
    double rho = 8.0 * std::sqrt(6.0);
    Grid g{1, 8.0, 2049};
    auto res = minimize(g, flat, prof1(), rho);

    double te = tilde_e(c, rho);
    CHECK(std::abs(res.energy - te) < 5e-3 * std::abs(te));
    CHECK(res.energy == doctest::Approx(-4.8).epsilon(1e-6));

    double eps = epsilon_scale(c, rho);
    CHECK(eps * eps * res.mu == doctest::Approx(-1.0).epsilon(1e-3));

    Field exact = tilde_minimizer(c, prof1(), rho, res.max_point, g);
    CHECK(max_abs_diff(res.u, exact) < 1e-3);
}

TEST_CASE("constraint, positivity, boundary, recompute") {
    Potential pot = quadratic_well({1.0});
    Grid g{1, 8.0, 801};
    auto res = minimize(g, pot, prof1(), 4.0);

    CHECK(std::abs(l2_norm(res.u) - 1.0) < 1e-12);
    for (double v : res.u.values) CHECK(v >= 0.0);
    CHECK(res.u.values.front() == 0.0);
    CHECK(res.u.values.back() == 0.0);
    CHECK(res.energy == doctest::Approx(energy(res.u, pot, 4.0, 2.0)).epsilon(1e-10));
    CHECK(res.grad_residual < 1e-8);
    CHECK(res.iterations > 0);
}

TEST_CASE("energy descent along the flow and GN floor on iterates") {
    Potential pot = quadratic_well({1.0});
    Grid g{1, 8.0, 801};
    auto c = soliton_constants(prof1());

    std::vector<double> energies;
    std::vector<double> ratios;
    MinimizeOpts opts;
    opts.observer = [&](long long it, const Field& u, double e2, double) {
        energies.push_back(e2);
        if (it % 10 == 0) ratios.push_back(gn_ratio(u, 2.0));
    };
    auto res = minimize(g, pot, prof1(), 6.0, nullptr, opts);
    (void)res;

    REQUIRE(energies.size() > 5);
    for (size_t i = 1; i < energies.size(); ++i)
        CHECK(energies[i] <= energies[i - 1] + 1e-12 * (1.0 + std::abs(energies[i - 1])));
    for (double r : ratios) CHECK(r >= c.c_gn - 1e-6);
}

TEST_CASE("even potential gives even minimizer") {
    Potential pot = quadratic_well({1.0});
    Grid g{1, 8.0, 801};
    auto res = minimize(g, pot, prof1(), 4.0);
    const int n = g.points;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(res.u.values[static_cast<size_t>(i)] -
                                         res.u.values[static_cast<size_t>(n - 1 - i)]));
    CHECK(worst < 1e-10);
}

TEST_CASE("multiplier identities and eigenvalue residual") {
    Potential pot = quadratic_well({1.0});
    Grid g{1, 8.0, 801};
    MinimizeOpts opts;
    auto res = minimize(g, pot, prof1(), 4.0, nullptr, opts);

    // integral and Rayleigh forms agree up to quadrature order
    double mu_int = chemical_potential(res, pot, 4.0);
    CHECK(std::abs(mu_int - res.mu) < 1e-3);

    // the stored multiplier makes the discrete eigenvalue equation tight
    CHECK(eigen_residual(res, pot, 4.0) < 10.0 * opts.tol);
}

// e(rho) - tilde_e(rho) should be the potential energy of the minimizer up to
// the (higher order, nonnegative) excess of the interaction part.
TEST_CASE("energy split against the auxiliary value") {
    Potential pot = quadratic_well({1.0});
    auto c = soliton_constants(prof1());
    double rho = 16.0;
    Grid g{1, 8.0, 1601};
    auto res = minimize(g, pot, prof1(), rho);

    double gap = res.energy - tilde_e(c, rho);
    double pot_term = 0.5 * weighted_mass(res.u, pot.value);
    CHECK(gap >= pot_term - 1e-6);
    CHECK(gap - pot_term < 0.5 * gap);
}

// The sharp constant in front of eps^r: fitting (e - tilde_e)/eps^2 for the
// quadratic well converges to (min Q)/(2 a*), i.e. half the raw Q minimum
// over the soliton mass.  The factor 1/2 is the one in front of the
// potential term of the energy.
TEST_CASE("expansion constant for the quadratic well") {
    Potential pot = quadratic_well({1.0});
    auto c = soliton_constants(prof1());
    double target = (2.0 * M_PI * M_PI - 12.0) / (2.0 * c.a_star);

    double rho = 48.0;
    double eps = epsilon_scale(c, rho);
    Grid g{1, 8.0, 2401}; // h = 1/150 < eps/12
    auto res = minimize(g, pot, prof1(), rho);
    double ratio = (res.energy - tilde_e(c, rho)) / (eps * eps);
    CHECK(ratio == doctest::Approx(target).epsilon(2e-2));
}

TEST_CASE("sweep: monotonicity, lower bound, derivative consistency") {
    Potential pot = quadratic_well({1.0});
    auto c = soliton_constants(prof1());
    std::vector<double> rhos = {8.0, 12.0, 18.0, 27.0, 40.5};
    auto out = sweep(pot, prof1(), rhos);
    REQUIRE(out.size() == rhos.size());

    for (size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].rho == rhos[i]);
        CHECK(out[i].energy >= tilde_e(c, rhos[i]));
        if (i > 0) CHECK(out[i].energy < out[i - 1].energy);
    }
    // envelope identity e'(rho) = -(p-1)/(p+1) rho^{p-2} ∫u^{p+1}, nonuniform 3-point slope
    for (size_t i = 1; i + 1 < out.size(); ++i) {
        double h1 = rhos[i] - rhos[i - 1], h2 = rhos[i + 1] - rhos[i];
        double slope = (-h2 / h1 * out[i - 1].energy + (h2 / h1 - h1 / h2) * out[i].energy +
                        h1 / h2 * out[i + 1].energy) /
                       (h1 + h2);
        double envelope = -1.0 / 3.0 * lp_integral(out[i].u, 3.0);
        CHECK(slope == doctest::Approx(envelope).epsilon(3e-2));
    }
}

TEST_CASE("warm start reproduces the cold start minimum") {
    Potential pot = quadratic_well({1.0});
    std::vector<double> rhos = {10.0, 15.0};
    auto warm = sweep(pot, prof1(), rhos);

    SweepOpts cold_opts;
    cold_opts.warm_start = false;
    auto cold = sweep(pot, prof1(), rhos, cold_opts);
    CHECK(std::abs(warm[1].energy - cold[1].energy) < 1e-9);
    CHECK(max_abs_diff(warm[1].u, cold[1].u) < 1e-5);
}

TEST_CASE("two dimensional well") {
    Potential pot = quadratic_well({1.0, 1.0});
    Grid g{2, 8.0, 257};
    auto res = minimize(g, pot, prof2(), 4.0);

    CHECK(std::abs(l2_norm(res.u) - 1.0) < 1e-12);
    CHECK(res.grad_residual < 1e-8);
    CHECK(eigen_residual(res, pot, 4.0) < 1e-7);
    CHECK(std::abs(res.max_point[0]) < 2.0 * g.spacing());
    CHECK(std::abs(res.max_point[1]) < 2.0 * g.spacing());

    // x <-> y exchange symmetry of the discrete minimizer
    const int n = g.points;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            worst = std::max(worst, std::abs(res.u.values[static_cast<size_t>(i) * n + j] -
                                             res.u.values[static_cast<size_t>(j) * n + i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("failure modes") {
    Potential pot = quadratic_well({1.0});

    // too coarse for the collapse scale
    CHECK_THROWS_AS(minimize((Grid{1, 8.0, 101}), pot, prof1(), 32.0), resolution_error);

    // iteration cap
    MinimizeOpts tiny;
    tiny.max_iters = 3;
    CHECK_THROWS_AS(minimize((Grid{1, 8.0, 801}), pot, prof1(), 0.0, nullptr, tiny),
                    convergence_error);

    CHECK_THROWS_AS(minimize((Grid{1, 8.0, 801}), pot, prof1(), -1.0), domain_error);

    // init on a different grid
    Field wrong(Grid{1, 8.0, 401});
    wrong.values[200] = 1.0;
    CHECK_THROWS_AS(minimize((Grid{1, 8.0, 801}), pot, prof1(), 0.0, &wrong), domain_error);

    // energy() demands unit mass
    Field junk(Grid{1, 8.0, 801});
    junk.values[400] = 1.0;
    CHECK_THROWS_AS(energy(junk, pot, 1.0, 2.0), domain_error);

    // sweep needs increasing rho
    std::vector<double> bad = {4.0, 4.0};
    CHECK_THROWS_AS(sweep(pot, prof1(), bad), domain_error);
}
