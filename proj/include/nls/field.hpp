#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nls/errors.hpp"

namespace nls {

/// Uniform tensor grid on [-L, L]^d with zero-Dirichlet boundary.
/// Supports d = 1, 2, 3.  Trapezoid quadrature weights sum to (2L)^d.
struct Grid {
    int dim = 1;
    double half_width = 8.0; // L
    int points = 129;        // nodes per axis, boundary included

    double spacing() const { return 2.0 * half_width / (points - 1); }
    long long total() const {
        long long t = 1;
        for (int a = 0; a < dim; ++a) t *= points;
        return t;
    }
    double coord(long long i) const { return -half_width + spacing() * static_cast<double>(i); }

    void validate() const;
    bool same_layout(const Grid& o) const {
        return dim == o.dim && points == o.points && half_width == o.half_width;
    }
};

/// Scalar field sampled on a Grid.  Boundary values are kept at zero.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), values(static_cast<size_t>(g.total()), 0.0) {}

    double& operator[](size_t i) { return values[i]; }
    double operator[](size_t i) const { return values[i]; }
    size_t size() const { return values.size(); }
};

void zero_boundary(Field& u);

/// Trapezoid quadrature of the node weights against `per_node`:
/// sum_i weight_i * per_node[i].
double integrate_nodes(const Grid& g, std::span<const double> per_node);

/// ∫ u^2 dx by trapezoid quadrature.
double mass(const Field& u);

/// sqrt(mass)
double l2_norm(const Field& u);

/// ∫ |u|^q dx by trapezoid quadrature.
double lp_integral(const Field& u, double q);

/// Quadrature inner product ⟨a, b⟩.
double inner(const Field& a, const Field& b);

/// ∫ |∇u|^2 dx with fourth-order centered differences in the interior
/// (second order in the two cells nearest the boundary).
double dirichlet_integral(const Field& u);

/// ∫ V(x) u(x)^2 dx for a pointwise potential callback.
template <class V>
double weighted_mass(const Field& u, V&& pot);

/// Rescale to unit L2 norm.  Throws domain_error on the zero field.
void normalize(Field& u);

/// out = -Δ_h u with the standard 3-point (per axis) stencil, zero outside.
void apply_neg_laplacian(const Field& u, Field& out);

/// Cubic Lagrange interpolation; zero outside the box.
double value_at(const Field& u, std::span<const double> x);

/// Location of the maximum refined by per-axis quadratic interpolation
/// through the discrete argmax and its neighbors.
std::vector<double> subgrid_max_point(const Field& u);

/// Discrete argmax node value.
double max_value(const Field& u);

double max_abs_diff(const Field& a, const Field& b);

/// |u|^q with fast paths for small integer q.
inline double pow_abs(double v, double q) {
    if (q == 2.0) return v * v;
    if (q == 3.0) { double a = v < 0 ? -v : v; return a * v * v; }
    if (q == 4.0) { double s = v * v; return s * s; }
    double a = v < 0 ? -v : v;
    return __builtin_pow(a, q);
}

/// sign(v) |v|^q, the nonlinearity u -> u^p extended to negative values.
inline double pow_signed(double v, double q) {
    if (q == 2.0) { double a = v < 0 ? -v : v; return a * v; }
    if (q == 3.0) return v * v * v;
    double a = v < 0 ? -v : v;
    double r = __builtin_pow(a, q);
    return v < 0 ? -r : r;
}

template <class V>
double weighted_mass(const Field& u, V&& pot) {
    const Grid& g = u.grid;
    const int n = g.points;
    const double h = g.spacing();
    auto axis_w = [&](int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
    double acc = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            double x[1] = {g.coord(i)};
            double v = u.values[static_cast<size_t>(i)];
            acc += axis_w(i) * pot(std::span<const double>(x, 1)) * v * v;
        }
    } else if (g.dim == 2) {
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++k) {
                double x[2] = {g.coord(i), g.coord(j)};
                double v = u.values[k];
                if (v == 0.0) continue;
                acc += axis_w(i) * axis_w(j) * pot(std::span<const double>(x, 2)) * v * v;
            }
    } else {
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l, ++k) {
                    double x[3] = {g.coord(i), g.coord(j), g.coord(l)};
                    double v = u.values[k];
                    if (v == 0.0) continue;
                    acc += axis_w(i) * axis_w(j) * axis_w(l) * pot(std::span<const double>(x, 3)) * v * v;
                }
    }
    return acc;
}

} // namespace nls
