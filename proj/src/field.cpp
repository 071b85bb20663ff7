#include "nls/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace nls {

void Grid::validate() const {
    if (dim < 1 || dim > 3) throw domain_error("grid: dim must be 1, 2, or 3");
    if (points < 16) throw domain_error("grid: need at least 16 points per axis");
    if (!(half_width > 0.0)) throw domain_error("grid: half_width must be positive");
}

void zero_boundary(Field& u) {
    const Grid& g = u.grid;
    const int n = g.points;
    if (g.dim == 1) {
        u.values.front() = 0.0;
        u.values.back() = 0.0;
        return;
    }
    if (g.dim == 2) {
        for (int i = 0; i < n; ++i) {
            u.values[static_cast<size_t>(i) * n] = 0.0;
            u.values[static_cast<size_t>(i) * n + n - 1] = 0.0;
            u.values[static_cast<size_t>(i)] = 0.0;
            u.values[static_cast<size_t>(n - 1) * n + i] = 0.0;
        }
        return;
    }
    size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l, ++k)
                if (i == 0 || j == 0 || l == 0 || i == n - 1 || j == n - 1 || l == n - 1)
                    u.values[k] = 0.0;
}

double integrate_nodes(const Grid& g, std::span<const double> per_node) {
    const int n = g.points;
    const double h = g.spacing();
    auto aw = [&](int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
    double acc = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) acc += aw(i) * per_node[static_cast<size_t>(i)];
    } else if (g.dim == 2) {
        size_t k = 0;
        for (int i = 0; i < n; ++i) {
            double wi = aw(i);
            double row = 0.0;
            for (int j = 0; j < n; ++j, ++k) row += aw(j) * per_node[k];
            acc += wi * row;
        }
    } else {
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double wij = aw(i) * aw(j);
                double row = 0.0;
                for (int l = 0; l < n; ++l, ++k) row += aw(l) * per_node[k];
                acc += wij * row;
            }
    }
    return acc;
}

namespace {

// Per-node trapezoid weight as a product of axis weights.
inline double node_weight(const Grid& g, int i, int j, int l) {
    const int n = g.points;
    const double h = g.spacing();
    auto aw = [&](int q) { return (q == 0 || q == n - 1) ? 0.5 * h : h; };
    double w = aw(i);
    if (g.dim > 1) w *= aw(j);
    if (g.dim > 2) w *= aw(l);
    return w;
}

} // namespace

double mass(const Field& u) {
    const Grid& g = u.grid;
    const int n = g.points;
    const double h = g.spacing();
    auto aw = [&](int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
    double acc = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            double v = u.values[static_cast<size_t>(i)];
            acc += aw(i) * v * v;
        }
    } else if (g.dim == 2) {
        size_t k = 0;
        for (int i = 0; i < n; ++i) {
            double wi = aw(i), row = 0.0;
            for (int j = 0; j < n; ++j, ++k) row += aw(j) * u.values[k] * u.values[k];
            acc += wi * row;
        }
    } else {
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double wij = aw(i) * aw(j), row = 0.0;
                for (int l = 0; l < n; ++l, ++k) row += aw(l) * u.values[k] * u.values[k];
                acc += wij * row;
            }
    }
    return acc;
}

double l2_norm(const Field& u) { return std::sqrt(mass(u)); }

double lp_integral(const Field& u, double q) {
    const Grid& g = u.grid;
    const int n = g.points;
    const double h = g.spacing();
    auto aw = [&](int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
    double acc = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) acc += aw(i) * pow_abs(u.values[static_cast<size_t>(i)], q);
    } else if (g.dim == 2) {
        size_t k = 0;
        for (int i = 0; i < n; ++i) {
            double wi = aw(i), row = 0.0;
            for (int j = 0; j < n; ++j, ++k) row += aw(j) * pow_abs(u.values[k], q);
            acc += wi * row;
        }
    } else {
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double wij = aw(i) * aw(j), row = 0.0;
                for (int l = 0; l < n; ++l, ++k) row += aw(l) * pow_abs(u.values[k], q);
                acc += wij * row;
            }
    }
    return acc;
}

double inner(const Field& a, const Field& b) {
    if (!a.grid.same_layout(b.grid)) throw domain_error("inner: grid mismatch");
    const Grid& g = a.grid;
    const int n = g.points;
    const double h = g.spacing();
    auto aw = [&](int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
    double acc = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) acc += aw(i) * a.values[static_cast<size_t>(i)] * b.values[static_cast<size_t>(i)];
    } else if (g.dim == 2) {
        size_t k = 0;
        for (int i = 0; i < n; ++i) {
            double wi = aw(i), row = 0.0;
            for (int j = 0; j < n; ++j, ++k) row += aw(j) * a.values[k] * b.values[k];
            acc += wi * row;
        }
    } else {
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double wij = aw(i) * aw(j), row = 0.0;
                for (int l = 0; l < n; ++l, ++k) row += aw(l) * a.values[k] * b.values[k];
                acc += wij * row;
            }
    }
    return acc;
}

namespace {

// Axis derivative: fourth-order centered in the interior, second order at the
// two cells nearest the boundary, one-sided second order on the boundary.
inline double axis_deriv(const std::vector<double>& v, long long k, long long stride, int i, int n, double h) {
    if (i >= 2 && i <= n - 3)
        return (-v[k + 2 * stride] + 8.0 * v[k + stride] - 8.0 * v[k - stride] + v[k - 2 * stride]) / (12.0 * h);
    if (i == 0) return (-3.0 * v[k] + 4.0 * v[k + stride] - v[k + 2 * stride]) / (2.0 * h);
    if (i == n - 1) return (3.0 * v[k] - 4.0 * v[k - stride] + v[k - 2 * stride]) / (2.0 * h);
    return (v[k + stride] - v[k - stride]) / (2.0 * h);
}

} // namespace

double dirichlet_integral(const Field& u) {
    const Grid& g = u.grid;
    const int n = g.points;
    const double h = g.spacing();
    const std::vector<double>& v = u.values;
    double acc = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            double d = axis_deriv(v, i, 1, i, n, h);
            acc += node_weight(g, i, 0, 0) * d * d;
        }
    } else if (g.dim == 2) {
        const long long si = n, sj = 1;
        long long k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++k) {
                double di = axis_deriv(v, k, si, i, n, h);
                double dj = axis_deriv(v, k, sj, j, n, h);
                acc += node_weight(g, i, j, 0) * (di * di + dj * dj);
            }
    } else {
        const long long si = static_cast<long long>(n) * n, sj = n, sl = 1;
        long long k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l, ++k) {
                    double di = axis_deriv(v, k, si, i, n, h);
                    double dj = axis_deriv(v, k, sj, j, n, h);
                    double dl = axis_deriv(v, k, sl, l, n, h);
                    acc += node_weight(g, i, j, l) * (di * di + dj * dj + dl * dl);
                }
    }
    return acc;
}

void normalize(Field& u) {
    double nrm = l2_norm(u);
    if (!(nrm > 1e-300)) throw domain_error("normalize: zero field");
    double s = 1.0 / nrm;
    for (double& v : u.values) v *= s;
}

void apply_neg_laplacian(const Field& u, Field& out) {
    const Grid& g = u.grid;
    if (!g.same_layout(out.grid)) throw domain_error("apply_neg_laplacian: grid mismatch");
    const int n = g.points;
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    const std::vector<double>& v = u.values;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    if (g.dim == 1) {
        for (int i = 1; i < n - 1; ++i)
            out.values[static_cast<size_t>(i)] =
                (2.0 * v[static_cast<size_t>(i)] - v[static_cast<size_t>(i) - 1] - v[static_cast<size_t>(i) + 1]) * inv_h2;
    } else if (g.dim == 2) {
        const long long si = n;
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j) {
                long long k = static_cast<long long>(i) * n + j;
                out.values[static_cast<size_t>(k)] =
                    (4.0 * v[k] - v[k - 1] - v[k + 1] - v[k - si] - v[k + si]) * inv_h2;
            }
    } else {
        const long long si = static_cast<long long>(n) * n, sj = n;
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j)
                for (int l = 1; l < n - 1; ++l) {
                    long long k = (static_cast<long long>(i) * n + j) * n + l;
                    out.values[static_cast<size_t>(k)] =
                        (6.0 * v[k] - v[k - 1] - v[k + 1] - v[k - sj] - v[k + sj] - v[k - si] - v[k + si]) * inv_h2;
                }
    }
}

namespace {

// Cubic Lagrange weights at local coordinate t measured from the first of
// four consecutive nodes.
inline void cubic_weights(double t, double w[4]) {
    w[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    w[1] = t * (t - 2.0) * (t - 3.0) / 2.0;
    w[2] = -t * (t - 1.0) * (t - 3.0) / 2.0;
    w[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
}

} // namespace

double value_at(const Field& u, std::span<const double> x) {
    const Grid& g = u.grid;
    if (static_cast<int>(x.size()) != g.dim) throw domain_error("value_at: wrong point dimension");
    const int n = g.points;
    const double h = g.spacing();
    int base[3] = {0, 0, 0};
    double w[3][4];
    for (int a = 0; a < g.dim; ++a) {
        if (x[a] < -g.half_width || x[a] > g.half_width) return 0.0;
        double s = (x[a] + g.half_width) / h;
        int b = static_cast<int>(std::floor(s)) - 1;
        b = std::clamp(b, 0, n - 4);
        base[a] = b;
        cubic_weights(s - b, w[a]);
    }
    const std::vector<double>& v = u.values;
    if (g.dim == 1) {
        double acc = 0.0;
        for (int a = 0; a < 4; ++a) acc += w[0][a] * v[static_cast<size_t>(base[0] + a)];
        return acc;
    }
    if (g.dim == 2) {
        double acc = 0.0;
        for (int a = 0; a < 4; ++a) {
            double row = 0.0;
            long long k = static_cast<long long>(base[0] + a) * n + base[1];
            for (int b = 0; b < 4; ++b) row += w[1][b] * v[static_cast<size_t>(k + b)];
            acc += w[0][a] * row;
        }
        return acc;
    }
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double row = 0.0;
            long long k = (static_cast<long long>(base[0] + a) * n + base[1] + b) * n + base[2];
            for (int c = 0; c < 4; ++c) row += w[2][c] * v[static_cast<size_t>(k + c)];
            acc += w[0][a] * w[1][b] * row;
        }
    return acc;
}

double max_value(const Field& u) {
    double m = u.values.empty() ? 0.0 : u.values[0];
    for (double v : u.values) m = std::max(m, v);
    return m;
}

double max_abs_diff(const Field& a, const Field& b) {
    if (!a.grid.same_layout(b.grid)) throw domain_error("max_abs_diff: grid mismatch");
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

std::vector<double> subgrid_max_point(const Field& u) {
    const Grid& g = u.grid;
    const int n = g.points;
    size_t best = 0;
    for (size_t i = 1; i < u.values.size(); ++i)
        if (u.values[i] > u.values[best]) best = i;
    int idx[3] = {0, 0, 0};
    long long rem = static_cast<long long>(best);
    for (int a = g.dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(rem % n);
        rem /= n;
    }
    long long stride = 1;
    std::vector<long long> strides(static_cast<size_t>(g.dim));
    for (int a = g.dim - 1; a >= 0; --a) {
        strides[static_cast<size_t>(a)] = stride;
        stride *= n;
    }
    std::vector<double> pt(static_cast<size_t>(g.dim));
    const double h = g.spacing();
    for (int a = 0; a < g.dim; ++a) {
        double off = 0.0;
        int i = idx[a];
        if (i > 0 && i < n - 1) {
            long long s = strides[static_cast<size_t>(a)];
            double um = u.values[best - static_cast<size_t>(s)];
            double u0 = u.values[best];
            double up = u.values[best + static_cast<size_t>(s)];
            double denom = um - 2.0 * u0 + up;
            if (denom < 0.0) off = std::clamp(0.5 * (um - up) / denom, -0.5, 0.5);
        }
        pt[static_cast<size_t>(a)] = g.coord(i) + off * h;
    }
    return pt;
}

} // namespace nls
