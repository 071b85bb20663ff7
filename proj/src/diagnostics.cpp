#include "nls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>

#include "nls/asymptotics.hpp"

namespace nls {

namespace {

void node_coords(const Grid& g, long long k, std::vector<double>& x) {
    x.resize(static_cast<size_t>(g.dim));
    for (int a = g.dim - 1; a >= 0; --a) {
        x[static_cast<size_t>(a)] = g.coord(k % g.points);
        k /= g.points;
    }
}

} // namespace

Grid reference_grid(int dim) {
    if (dim == 1) return Grid{1, 24.0, 961};
    if (dim == 2) return Grid{2, 16.0, 641};
    if (dim == 3) return Grid{3, 10.0, 201};
    throw domain_error("reference grid supports d in {1,2,3}");
}

Field rescale(const MinimizeResult& res, const SolitonConstants& c, const Grid& ref) {
    if (res.rho <= 0.0) throw domain_error("rescale needs rho > 0");
    if (ref.dim != res.u.grid.dim) throw domain_error("reference grid dimension mismatch");
    const Grid& g = res.u.grid;
    double eps = epsilon_scale(c, res.rho);

    // peak uniqueness: the 0.9-level set of a single collapsing bump has
    // diameter O(eps); anything much wider means separated peaks
    double peak = max_value(res.u);
    double limit = std::max(6.0 * eps, 4.0 * g.spacing());
    std::vector<double> lo(static_cast<size_t>(g.dim), 1e300);
    std::vector<double> hi(static_cast<size_t>(g.dim), -1e300);
    std::vector<double> x;
    for (long long k = 0; k < g.total(); ++k) {
        if (res.u.values[static_cast<size_t>(k)] < 0.9 * peak) continue;
        node_coords(g, k, x);
        for (int a = 0; a < g.dim; ++a) {
            lo[static_cast<size_t>(a)] = std::min(lo[static_cast<size_t>(a)], x[static_cast<size_t>(a)]);
            hi[static_cast<size_t>(a)] = std::max(hi[static_cast<size_t>(a)], x[static_cast<size_t>(a)]);
        }
    }
    for (int a = 0; a < g.dim; ++a)
        if (hi[static_cast<size_t>(a)] - lo[static_cast<size_t>(a)] > limit) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "peak level set spans %.3g along axis %d, expected at most %.3g",
                          hi[static_cast<size_t>(a)] - lo[static_cast<size_t>(a)], a, limit);
            throw ambiguity_error(msg);
        }

    double amp = std::sqrt(c.a_star) * std::pow(eps, 0.5 * g.dim);
    Field out(ref);
    std::vector<double> phys(static_cast<size_t>(g.dim));
    for (long long k = 0; k < ref.total(); ++k) {
        node_coords(ref, k, x);
        for (int a = 0; a < g.dim; ++a)
            phys[static_cast<size_t>(a)] =
                res.max_point[static_cast<size_t>(a)] + eps * x[static_cast<size_t>(a)];
        out.values[static_cast<size_t>(k)] = amp * value_at(res.u, phys);
    }
    zero_boundary(out);
    return out;
}

Field rescale(const MinimizeResult& res, const SolitonConstants& c) {
    return rescale(res, c, reference_grid(res.u.grid.dim));
}

DecayFit decay_check(const Field& u_bar) {
    const Grid& g = u_bar.grid;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = 0;
    std::vector<double> x;
    for (long long k = 0; k < g.total(); ++k) {
        double v = u_bar.values[static_cast<size_t>(k)];
        if (v < 1e-8 || v > 1e-2) continue;
        node_coords(g, k, x);
        double r2 = 0;
        for (double c : x) r2 += c * c;
        double r = std::sqrt(r2), y = std::log(v);
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
        ++n;
    }
    if (n < 8) throw accuracy_error("decay window holds too few samples; enlarge the box");
    double det = static_cast<double>(n) * sxx - sx * sx;
    DecayFit fit;
    fit.rate = (static_cast<double>(n) * sxy - sx * sy) / det;
    fit.coef = std::exp((sy * sxx - sx * sxy) / det);
    fit.points = n;
    fit.decay_ok = fit.rate <= -0.5 + 0.05;
    return fit;
}

ConcentrationReport concentration_rate(const std::vector<MinimizeResult>& results,
                                       const SolitonConstants& c, const SolitonProfile& prof,
                                       const Potential& pot, const ConcentrationSelection& sel) {
    if (results.size() < 2) throw domain_error("concentration rate needs at least two entries");
    if (results.back().rho < 10.0 * results.front().rho)
        throw domain_error("sweep must span at least a decade of rho");
    if (pot.wells.empty() || sel.z0.empty())
        throw domain_error("concentration rate needs recorded wells");

    Grid ref = reference_grid(prof.dim);
    Field w_ref(ref);
    std::vector<double> x;
    for (long long k = 0; k < ref.total(); ++k) {
        node_coords(ref, k, x);
        double r2 = 0;
        for (double v : x) r2 += v * v;
        w_ref.values[static_cast<size_t>(k)] = prof.value_at(std::sqrt(r2));
    }

    double r_deg = pot.wells[sel.z0.front()].degree;
    ConcentrationReport rep;
    for (const MinimizeResult& res : results) {
        double eps = epsilon_scale(c, res.rho);
        rep.rho_list.push_back(res.rho);
        rep.max_points.push_back(res.max_point);

        Field ubar = rescale(res, c, ref);
        rep.distances_linf.push_back(max_abs_diff(ubar, w_ref));
        rep.decay_ok.push_back(decay_check(ubar).decay_ok);

        // measure drift against the nearest selected well
        double best = 1e300;
        size_t best_well = sel.z0.front();
        for (size_t zi : sel.z0) {
            double d2 = 0;
            for (int a = 0; a < prof.dim; ++a) {
                double dx = res.max_point[static_cast<size_t>(a)] -
                            pot.wells[zi].location[static_cast<size_t>(a)];
                d2 += dx * dx;
            }
            if (d2 < best) {
                best = d2;
                best_well = zi;
            }
        }
        std::vector<double> rate(static_cast<size_t>(prof.dim));
        for (int a = 0; a < prof.dim; ++a)
            rate[static_cast<size_t>(a)] = (res.max_point[static_cast<size_t>(a)] -
                                            pot.wells[best_well].location[static_cast<size_t>(a)]) /
                                           eps;
        rep.rate_points.push_back(rate);
    }

    // final entry must sit nearest to a well the rule selects
    {
        const MinimizeResult& last = results.back();
        double best = 1e300;
        size_t best_well = 0;
        for (size_t i = 0; i < pot.wells.size(); ++i) {
            double d2 = 0;
            for (int a = 0; a < prof.dim; ++a) {
                double dx = last.max_point[static_cast<size_t>(a)] -
                            pot.wells[i].location[static_cast<size_t>(a)];
                d2 += dx * dx;
            }
            if (d2 < best) {
                best = d2;
                best_well = i;
            }
        }
        if (std::find(sel.z0.begin(), sel.z0.end(), best_well) == sel.z0.end()) {
            char msg[200];
            std::snprintf(msg, sizeof msg,
                          "peak at rho=%.6g settled near well %zu, outside the selected set "
                          "(first coordinate %.6g)",
                          last.rho, best_well, last.max_point[0]);
            throw selection_error(msg);
        }
    }

    // trailing-half fit of e - tilde_e against eps^r, through the origin
    size_t start = results.size() / 2;
    double num = 0, den = 0;
    for (size_t i = start; i < results.size(); ++i) {
        double eps = epsilon_scale(c, results[i].rho);
        double gap = results[i].energy - tilde_e(c, results[i].rho);
        double basis = std::pow(eps, r_deg);
        num += gap * basis;
        den += basis * basis;
    }
    rep.fitted_lambda_bar = num / den;
    return rep;
}

ProbeReport uniqueness_probe(const Grid& g, const Potential& pot, const SolitonProfile& prof,
                             double rho, int n_inits, std::uint64_t seed, int threads) {
    if (n_inits < 1) throw domain_error("need at least one initialization");
    g.validate();

    // deterministic init family: sums of three positive bumps
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.5, 1.5);
    std::uniform_real_distribution<double> pos(-0.6 * g.half_width, 0.6 * g.half_width);
    std::uniform_real_distribution<double> width(0.3, 1.0);
    std::vector<Field> inits;
    inits.reserve(static_cast<size_t>(n_inits));
    std::vector<double> x;
    for (int i = 0; i < n_inits; ++i) {
        struct Bump {
            double a, s;
            std::vector<double> c;
        };
        std::vector<Bump> bumps(3);
        for (Bump& b : bumps) {
            b.a = amp(rng);
            b.s = width(rng);
            b.c.resize(static_cast<size_t>(g.dim));
            for (double& v : b.c) v = pos(rng);
        }
        Field f(g);
        for (long long k = 0; k < g.total(); ++k) {
            node_coords(g, k, x);
            double v = 0;
            for (const Bump& b : bumps) {
                double r2 = 0;
                for (int a = 0; a < g.dim; ++a) {
                    double dx = x[static_cast<size_t>(a)] - b.c[static_cast<size_t>(a)];
                    r2 += dx * dx;
                }
                v += b.a * std::exp(-0.5 * r2 / (b.s * b.s));
            }
            f.values[static_cast<size_t>(k)] = v;
        }
        zero_boundary(f);
        normalize(f);
        inits.push_back(std::move(f));
    }

    auto run_one = [&](int i) {
        try {
            return minimize(g, pot, prof, rho, &inits[static_cast<size_t>(i)]);
        } catch (const std::exception& e) {
            char msg[200];
            std::snprintf(msg, sizeof msg, "start %d of %d (seed %llu): %s", i, n_inits,
                          static_cast<unsigned long long>(seed), e.what());
            throw convergence_error(msg);
        }
    };

    ProbeReport rep;
    rep.runs.resize(static_cast<size_t>(n_inits));
    if (threads <= 1) {
        for (int i = 0; i < n_inits; ++i) rep.runs[static_cast<size_t>(i)] = run_one(i);
    } else {
        for (int base = 0; base < n_inits; base += threads) {
            int batch = std::min(threads, n_inits - base);
            std::vector<std::future<MinimizeResult>> fut;
            fut.reserve(static_cast<size_t>(batch));
            for (int j = 0; j < batch; ++j)
                fut.push_back(std::async(std::launch::async, run_one, base + j));
            for (int j = 0; j < batch; ++j)
                rep.runs[static_cast<size_t>(base + j)] = fut[static_cast<size_t>(j)].get();
        }
    }

    double emin = 1e300, emax = -1e300;
    for (const MinimizeResult& r : rep.runs) {
        emin = std::min(emin, r.energy);
        emax = std::max(emax, r.energy);
    }
    for (size_t i = 0; i < rep.runs.size(); ++i)
        for (size_t j = i + 1; j < rep.runs.size(); ++j)
            rep.max_distance =
                std::max(rep.max_distance, max_abs_diff(rep.runs[i].u, rep.runs[j].u));
    rep.energy_spread = (emax - emin) / std::max(std::abs(emin), 1e-300);
    return rep;
}

std::vector<int> cluster_peaks(const ProbeReport& rep, double cutoff) {
    const size_t n = rep.runs.size();
    std::vector<size_t> parent(n);
    for (size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double d = 0;
            for (size_t a = 0; a < rep.runs[i].max_point.size(); ++a)
                d = std::max(d, std::abs(rep.runs[i].max_point[a] - rep.runs[j].max_point[a]));
            if (d < cutoff) parent[find(i)] = find(j);
        }
    std::vector<int> label(n, -1);
    int next = 0;
    for (size_t i = 0; i < n; ++i) {
        size_t root = find(i);
        if (label[root] < 0) label[root] = next++;
        label[i] = label[root];
    }
    return label;
}

EquivalenceReport equivalence_checks(const MinimizeResult& lo, const MinimizeResult& mid,
                                     const MinimizeResult& hi) {
    if (!(lo.rho < mid.rho && mid.rho < hi.rho))
        throw domain_error("equivalence checks need an increasing rho triple");
    double h1 = mid.rho - lo.rho, h2 = hi.rho - mid.rho;
    double slope = (-h2 / h1 * lo.energy + (h2 / h1 - h1 / h2) * mid.energy +
                    h1 / h2 * hi.energy) /
                   (h1 + h2);
    EquivalenceReport rep;
    rep.norm_error = std::abs(l2_norm(mid.u) - 1.0);
    rep.mu_gap_rel = std::abs(mid.mu - (2.0 * mid.energy + mid.rho * slope)) /
                     std::max(std::abs(mid.mu), 1e-300);
    rep.norm_ok = rep.norm_error < 1e-8;
    rep.mu_ok = rep.mu_gap_rel < 0.02;
    return rep;
}

EquivalenceReport equivalence_checks(const MinimizeResult& res) {
    EquivalenceReport rep;
    rep.norm_error = std::abs(l2_norm(res.u) - 1.0);
    rep.mu_gap_rel =
        std::abs(res.mu - 2.0 * res.energy) / std::max(std::abs(res.mu), 1e-300);
    rep.norm_ok = rep.norm_error < 1e-8;
    rep.mu_ok = rep.mu_gap_rel < 0.02;
    return rep;
}

} // namespace nls
