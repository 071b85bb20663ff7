#include "nls/qfunctional.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace nls {

namespace {

struct Quad {
    int dim = 1;
    std::vector<std::array<double, 3>> pts; // r_j * dir_k
    std::vector<double> wts;                // angular weight * w^2 r^{d-1} * trapezoid
    std::vector<std::array<double, 3>> dirs;
    std::vector<double> dir_wts;            // sum to the sphere area
    double tail_factor = 0.0;               // C^2 e^{-2 r_cut} / 2
    double r_cut = 0.0;
};

void append_dirs(int dim, int level, std::vector<std::array<double, 3>>& dirs,
                 std::vector<double>& wts) {
    if (dim == 1) {
        dirs.push_back({1.0, 0.0, 0.0});
        dirs.push_back({-1.0, 0.0, 0.0});
        wts.assign(2, 1.0);
        return;
    }
    if (dim == 2) {
        int m = level;
        for (int k = 0; k < m; ++k) {
            double a = 2.0 * M_PI * k / m;
            dirs.push_back({std::cos(a), std::sin(a), 0.0});
            wts.push_back(2.0 * M_PI / m);
        }
        return;
    }
    // Gauss-Legendre in cos(theta) x uniform phi; exact for low-degree
    // polynomials on the sphere.
    static const double gl8_x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                    0.9602898564975363};
    static const double gl8_w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                    0.1012285362903763};
    static const double gl4_x[2] = {0.3399810435848563, 0.8611363115940526};
    static const double gl4_w[2] = {0.6521451548625461, 0.3478548451374538};
    const double* gx = level >= 8 ? gl8_x : gl4_x;
    const double* gw = level >= 8 ? gl8_w : gl4_w;
    int half = level >= 8 ? 4 : 2;
    int nphi = level >= 8 ? 16 : 8;
    for (int i = -half; i < half; ++i) {
        double c = i < 0 ? -gx[-i - 1] : gx[i];
        double gwi = i < 0 ? gw[-i - 1] : gw[i];
        double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int k = 0; k < nphi; ++k) {
            double a = 2.0 * M_PI * k / nphi;
            dirs.push_back({s * std::cos(a), s * std::sin(a), c});
            wts.push_back(gwi * 2.0 * M_PI / nphi);
        }
    }
}

Quad build_quad(const SolitonProfile& prof, int stride, double r_cut, int angular_level) {
    Quad q;
    q.dim = prof.dim;
    append_dirs(prof.dim, angular_level, q.dirs, q.dir_wts);

    double h = prof.step;
    size_t limit = std::min(prof.w.size() - 1,
                            static_cast<size_t>(std::llround(std::min(r_cut, prof.r_max) / h)));
    size_t m = limit / static_cast<size_t>(stride);
    double H = h * stride;
    q.r_cut = H * static_cast<double>(m);

    q.pts.reserve((m + 1) * q.dirs.size());
    q.wts.reserve((m + 1) * q.dirs.size());
    for (size_t j = 0; j <= m; ++j) {
        double r = H * static_cast<double>(j);
        double wv = prof.w[j * static_cast<size_t>(stride)];
        double trap = (j == 0 || j == m) ? 0.5 * H : H;
        double radial = wv * wv * std::pow(r, prof.dim - 1) * trap;
        if (radial == 0.0) continue;
        for (size_t k = 0; k < q.dirs.size(); ++k) {
            q.pts.push_back({r * q.dirs[k][0], r * q.dirs[k][1], r * q.dirs[k][2]});
            q.wts.push_back(radial * q.dir_wts[k]);
        }
    }

    double w_end = prof.w[m * static_cast<size_t>(stride)];
    double c_eff = w_end * std::exp(q.r_cut) * std::pow(std::max(q.r_cut, 1e-30), 0.5 * (prof.dim - 1));
    q.tail_factor = 0.5 * c_eff * c_eff * std::exp(-2.0 * q.r_cut);
    return q;
}

double quad_eval(const Quad& q, const PointFun& vi, std::span<const double> y,
                 double* tail_fraction) {
    const int d = q.dim;
    double acc = 0.0;
    double x[3];
    for (size_t m = 0; m < q.pts.size(); ++m) {
        for (int a = 0; a < d; ++a) x[a] = q.pts[m][static_cast<size_t>(a)] + y[static_cast<size_t>(a)];
        acc += q.wts[m] * vi(std::span<const double>(x, static_cast<size_t>(d)));
    }
    double tail = 0.0;
    for (size_t k = 0; k < q.dirs.size(); ++k) {
        for (int a = 0; a < d; ++a)
            x[a] = q.r_cut * q.dirs[k][static_cast<size_t>(a)] + y[static_cast<size_t>(a)];
        tail += q.dir_wts[k] * vi(std::span<const double>(x, static_cast<size_t>(d)));
    }
    tail *= q.tail_factor;
    if (tail_fraction) {
        double total = acc + tail;
        *tail_fraction = total != 0.0 ? tail / total : 0.0;
    }
    return acc + tail;
}

/// Greedy compass search with step halving; Q is smooth and coercive here.
std::vector<double> compass(const Quad& q, const PointFun& vi, std::vector<double> y, double step,
                            double step_min, double* value) {
    const int d = q.dim;
    double best = quad_eval(q, vi, y, nullptr);
    while (step > step_min) {
        bool moved = false;
        for (int a = 0; a < d; ++a) {
            for (double sgn : {1.0, -1.0}) {
                std::vector<double> trial = y;
                trial[static_cast<size_t>(a)] += sgn * step;
                double v = quad_eval(q, vi, trial, nullptr);
                if (v < best) {
                    best = v;
                    y = trial;
                    moved = true;
                }
            }
        }
        if (!moved) step *= 0.5;
    }
    *value = best;
    return y;
}

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Cyclic Jacobi eigenvalues of a symmetric n x n (n <= 3) matrix.
void sym_eigenvalues(std::vector<double> a, int n, double* out) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[static_cast<size_t>(i * n + j)] * a[static_cast<size_t>(i * n + j)];
        if (off < 1e-30) break;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double apq = a[static_cast<size_t>(i * n + j)];
                if (std::abs(apq) < 1e-300) continue;
                double app = a[static_cast<size_t>(i * n + i)], aqq = a[static_cast<size_t>(j * n + j)];
                double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    double aik = a[static_cast<size_t>(i * n + k)], ajk = a[static_cast<size_t>(j * n + k)];
                    a[static_cast<size_t>(i * n + k)] = c * aik - s * ajk;
                    a[static_cast<size_t>(j * n + k)] = s * aik + c * ajk;
                }
                for (int k = 0; k < n; ++k) {
                    double aki = a[static_cast<size_t>(k * n + i)], akj = a[static_cast<size_t>(k * n + j)];
                    a[static_cast<size_t>(k * n + i)] = c * aki - s * akj;
                    a[static_cast<size_t>(k * n + j)] = s * aki + c * akj;
                }
            }
    }
    for (int i = 0; i < n; ++i) out[i] = a[static_cast<size_t>(i * n + i)];
}

} // namespace

double q_value(const PointFun& vi, const SolitonProfile& prof, std::span<const double> y,
               const QOpts& opts, double* tail_fraction) {
    if (static_cast<int>(y.size()) != prof.dim) throw domain_error("shift dimension mismatch");
    Quad q = build_quad(prof, opts.stride, opts.r_cut, prof.dim == 3 ? 8 : 32);
    double frac = 0.0;
    double val = quad_eval(q, vi, y, &frac);
    if (tail_fraction) *tail_fraction = frac;
    if (opts.warn && frac > 0.01)
        std::fprintf(stderr, "warning: quadrature tail of Q is %.2f%% of the total; "
                             "increase r_cut\n", 100.0 * frac);
    return val;
}

QResult minimize_q(const PointFun& vi, const SolitonProfile& prof, const QOpts& opts) {
    const int d = prof.dim;
    // Coarse localization on a cheap quadrature, descent on the full one.
    Quad coarse = build_quad(prof, d == 3 ? 64 : 16, opts.r_cut, d == 3 ? 4 : 16);
    Quad fine = build_quad(prof, opts.stride, opts.r_cut, d == 3 ? 8 : 32);

    const double B = opts.search_half_width;
    const int n = static_cast<int>(std::llround(2.0 * B / opts.coarse_step)) + 1;
    long long cells = 1;
    for (int a = 0; a < d; ++a) cells *= n;

    std::vector<double> scan(static_cast<size_t>(cells));
    std::vector<double> y(static_cast<size_t>(d));
    for (long long c = 0; c < cells; ++c) {
        long long rem = c;
        for (int a = d - 1; a >= 0; --a) {
            y[static_cast<size_t>(a)] = -B + opts.coarse_step * static_cast<double>(rem % n);
            rem /= n;
        }
        scan[static_cast<size_t>(c)] = quad_eval(coarse, vi, y, nullptr);
    }

    // Collect coarse basins: cells not above any axis neighbor.
    std::vector<long long> seeds;
    for (long long c = 0; c < cells; ++c) {
        bool local_min = true;
        long long stridec = 1;
        for (int a = d - 1; a >= 0 && local_min; --a) {
            long long idx = (c / stridec) % n;
            if (idx > 0 && scan[static_cast<size_t>(c - stridec)] < scan[static_cast<size_t>(c)])
                local_min = false;
            if (idx + 1 < n && scan[static_cast<size_t>(c + stridec)] < scan[static_cast<size_t>(c)])
                local_min = false;
            stridec *= n;
        }
        if (local_min) seeds.push_back(c);
    }

    std::vector<std::vector<double>> mins;
    std::vector<double> vals;
    for (long long c : seeds) {
        std::vector<double> start(static_cast<size_t>(d));
        long long rem = c;
        for (int a = d - 1; a >= 0; --a) {
            start[static_cast<size_t>(a)] = -B + opts.coarse_step * static_cast<double>(rem % n);
            rem /= n;
        }
        double v = 0.0;
        auto loc = compass(fine, vi, start, opts.coarse_step, 1e-6, &v);
        bool dup = false;
        for (size_t i = 0; i < mins.size() && !dup; ++i)
            if (dist(mins[i], loc) < 0.05) {
                dup = true;
                if (v < vals[i]) { vals[i] = v; mins[i] = loc; }
            }
        if (!dup) {
            mins.push_back(loc);
            vals.push_back(v);
        }
    }

    size_t best = 0;
    for (size_t i = 1; i < mins.size(); ++i)
        if (vals[i] < vals[best]) best = i;

    QResult res;
    res.y0 = mins[best];
    res.lambda_bar = vals[best];
    for (size_t i = 0; i < mins.size(); ++i) {
        if (i == best) continue;
        if (std::abs(vals[i] - vals[best]) <= 1e-8 * std::max(1.0, std::abs(vals[best])) &&
            dist(mins[i], res.y0) > 0.05) {
            res.k0_singleton = false;
            res.extra_minima.push_back(mins[i]);
        }
    }

    // Central second differences around the minimizer.
    const double hs = opts.hessian_step;
    res.hessian.assign(static_cast<size_t>(d * d), 0.0);
    double q0 = quad_eval(fine, vi, res.y0, nullptr);
    for (int a = 0; a < d; ++a) {
        std::vector<double> yp = res.y0, ym = res.y0;
        yp[static_cast<size_t>(a)] += hs;
        ym[static_cast<size_t>(a)] -= hs;
        res.hessian[static_cast<size_t>(a * d + a)] =
            (quad_eval(fine, vi, yp, nullptr) - 2.0 * q0 + quad_eval(fine, vi, ym, nullptr)) / (hs * hs);
        for (int b = a + 1; b < d; ++b) {
            double acc = 0.0;
            for (double sa : {1.0, -1.0})
                for (double sb : {1.0, -1.0}) {
                    std::vector<double> yy = res.y0;
                    yy[static_cast<size_t>(a)] += sa * hs;
                    yy[static_cast<size_t>(b)] += sb * hs;
                    acc += sa * sb * quad_eval(fine, vi, yy, nullptr);
                }
            double hij = acc / (4.0 * hs * hs);
            res.hessian[static_cast<size_t>(a * d + b)] = hij;
            res.hessian[static_cast<size_t>(b * d + a)] = hij;
        }
    }
    double eig[3] = {0, 0, 0};
    sym_eigenvalues(res.hessian, d, eig);
    double min_eig = eig[0];
    for (int a = 1; a < d; ++a) min_eig = std::min(min_eig, eig[a]);
    res.nondegenerate = res.k0_singleton && min_eig > 1e-4;
    return res;
}

ConcentrationSelection select_concentration(const Potential& pot, const SolitonProfile& prof,
                                            const QOpts& opts) {
    if (pot.dim != prof.dim) throw domain_error("potential and profile dimension mismatch");
    WellClassification cls = classify_wells(pot);
    ConcentrationSelection sel;
    sel.lambda_bar0 = std::numeric_limits<double>::infinity();
    for (size_t idx : cls.z_bar_index) {
        QResult r = minimize_q(pot.wells[idx].model, prof, opts);
        r.well_index = idx;
        sel.lambda_bar0 = std::min(sel.lambda_bar0, r.lambda_bar);
        sel.gamma.push_back(std::move(r));
    }
    for (const QResult& r : sel.gamma)
        if (r.lambda_bar <= sel.lambda_bar0 + 1e-8 * std::max(1.0, std::abs(sel.lambda_bar0)))
            sel.z0.push_back(r.well_index);
    return sel;
}

} // namespace nls
