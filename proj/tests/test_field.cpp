#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nls/field.hpp"

using namespace nls;

namespace {

Field gaussian(const Grid& g, double sigma, const double* shift = nullptr) {
    Field u(g);
    const int n = g.points;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            double x = g.coord(i) - (shift ? shift[0] : 0.0);
            u.values[static_cast<size_t>(i)] = std::exp(-x * x / (2.0 * sigma * sigma));
        }
    } else if (g.dim == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double x = g.coord(i) - (shift ? shift[0] : 0.0);
                double y = g.coord(j) - (shift ? shift[1] : 0.0);
                u.values[static_cast<size_t>(i) * n + j] =
                    std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            }
    }
    return u;
}

} // namespace

TEST_CASE("grid geometry") {
    Grid g{1, 8.0, 161};
    CHECK(g.spacing() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g.coord(0) == -8.0);
    CHECK(g.coord(160) == 8.0);
    CHECK(g.coord(80) == doctest::Approx(0.0));
    CHECK(g.total() == 161);
    Grid g3{3, 4.0, 33};
    CHECK(g3.total() == 33ull * 33 * 33);
    CHECK(g.same_layout(Grid{1, 8.0, 161}));
    CHECK(!g.same_layout(g3));
}

TEST_CASE("grid validation rejects bad parameters") {
    CHECK_THROWS_AS((Grid{0, 8.0, 65}.validate()), domain_error);
    CHECK_THROWS_AS((Grid{4, 8.0, 65}.validate()), domain_error);
    CHECK_THROWS_AS((Grid{1, -1.0, 65}.validate()), domain_error);
    CHECK_THROWS_AS((Grid{1, 8.0, 8}.validate()), domain_error);
    CHECK_NOTHROW((Grid{2, 8.0, 65}.validate()));
}

TEST_CASE("trapezoid integrals of decaying analytic fields are near-exact") {
    Grid g{1, 8.0, 1601};
    Field u = gaussian(g, std::sqrt(0.5)); // u = exp(-x^2), u^2 = exp(-2x^2)
    CHECK(integrate_nodes(g, u.values) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(mass(u) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-12));
    CHECK(l2_norm(u) == doctest::Approx(std::pow(M_PI / 2.0, 0.25)).epsilon(1e-12));
    CHECK(lp_integral(u, 3.0) == doctest::Approx(std::sqrt(M_PI / 3.0)).epsilon(1e-12));

    Grid g2{2, 8.0, 257};
    Field v = gaussian(g2, 1.0);
    CHECK(mass(v) == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("dirichlet integral matches the analytic value to fourth order") {
    Grid g{1, 10.0, 2001};
    Field u = gaussian(g, 1.0);
    // int (d/dx e^{-x^2/2})^2 = int x^2 e^{-x^2} = sqrt(pi)/2
    CHECK(dirichlet_integral(u) == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-8));

    Grid g2{2, 8.0, 321};
    Field v = gaussian(g2, 1.0);
    // |grad|^2 integrates to pi for the unit radial Gaussian
    CHECK(dirichlet_integral(v) == doctest::Approx(M_PI).epsilon(1e-5));
}

TEST_CASE("weighted mass with a polynomial weight") {
    Grid g{1, 10.0, 2001};
    Field u = gaussian(g, std::sqrt(0.5));
    auto V = [](std::span<const double> x) { return x[0] * x[0]; };
    // int x^2 e^{-2x^2} = sqrt(pi/2)/4
    CHECK(weighted_mass(u, V) == doctest::Approx(0.25 * std::sqrt(0.5 * M_PI)).epsilon(1e-10));
}

TEST_CASE("normalize produces unit mass") {
    Grid g{2, 6.0, 97};
    Field u = gaussian(g, 0.8);
    normalize(u);
    CHECK(mass(u) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("negative laplacian is exact on quadratics") {
    Grid g{1, 4.0, 81};
    Field u(g);
    for (int i = 0; i < g.points; ++i) {
        double x = g.coord(i);
        u.values[static_cast<size_t>(i)] = x * x;
    }
    Field lu(g);
    apply_neg_laplacian(u, lu);
    for (int i = 1; i + 1 < g.points; ++i)
        CHECK(lu.values[static_cast<size_t>(i)] == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("cubic sampling interpolates off-node values") {
    Grid g{1, 8.0, 321};
    Field u = gaussian(g, 1.0);
    for (double x : {0.513, -2.071, 3.9991}) {
        double pt[1] = {x};
        CHECK(value_at(u, pt) == doctest::Approx(std::exp(-0.5 * x * x)).epsilon(1e-5));
    }
    double outside[1] = {9.5};
    CHECK(value_at(u, outside) == 0.0);
}

TEST_CASE("subgrid peak location beats the mesh") {
    Grid g{1, 8.0, 321};
    double shift[1] = {0.3137};
    Field u = gaussian(g, 1.0, shift);
    auto pk = subgrid_max_point(u);
    CHECK(std::abs(pk[0] - 0.3137) < 2e-3);

    Grid g2{2, 6.0, 121};
    double shift2[2] = {0.42, -1.234};
    Field v = gaussian(g2, 1.0, shift2);
    auto pk2 = subgrid_max_point(v);
    CHECK(std::abs(pk2[0] - 0.42) < 5e-3);
    CHECK(std::abs(pk2[1] + 1.234) < 5e-3);
}

TEST_CASE("boundary clearing and elementwise helpers") {
    Grid g{2, 4.0, 33};
    Field u(g);
    for (double& v : u.values) v = 1.0;
    zero_boundary(u);
    const int n = g.points;
    CHECK(u.values[0] == 0.0);
    CHECK(u.values[static_cast<size_t>(n - 1)] == 0.0);
    CHECK(u.values[static_cast<size_t>(n)] == 0.0);       // (1,0) face node
    CHECK(u.values[static_cast<size_t>(n) + 1] == 1.0);   // (1,1) interior
    CHECK(max_value(u) == 1.0);
    Field w = u;
    w.values[40] += 0.25;
    CHECK(max_abs_diff(u, w) == doctest::Approx(0.25));
    CHECK(inner(u, w) > inner(u, u));
}
