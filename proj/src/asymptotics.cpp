#include "nls/asymptotics.hpp"

#include <cmath>

namespace nls {

namespace {

double subcritical_gap(const SolitonConstants& c) {
    double gap = 4.0 - c.dim * (c.exponent - 1.0);
    if (!(gap > 0.0)) throw domain_error("mass-critical or supercritical pair (d, p)");
    return gap;
}

void check_rho(double rho) {
    if (!(rho > 0.0)) throw domain_error("rho must be positive");
}

} // namespace

double energy_scale(const SolitonConstants& c, double rho) {
    check_rho(rho);
    double gap = subcritical_gap(c);
    return std::pow(rho / std::sqrt(c.a_star), 4.0 * (c.exponent - 1.0) / gap);
}

double epsilon_scale(const SolitonConstants& c, double rho) {
    check_rho(rho);
    double gap = subcritical_gap(c);
    return std::pow(rho / std::sqrt(c.a_star), -2.0 * (c.exponent - 1.0) / gap);
}

double tilde_e(const SolitonConstants& c, double rho) {
    return -c.lambda * energy_scale(c, rho);
}

double tilde_mu(const SolitonConstants& c, double rho) {
    return -energy_scale(c, rho);
}

double predicted_e(const SolitonConstants& c, double rho, double lambda_bar0, double r) {
    if (lambda_bar0 < 0.0) throw domain_error("lambda_bar0 must be nonnegative");
    if (!(r > 0.0)) throw domain_error("well degree must be positive");
    return tilde_e(c, rho) + lambda_bar0 / c.a_star * std::pow(epsilon_scale(c, rho), r);
}

Field tilde_minimizer(const SolitonConstants& c, const SolitonProfile& prof, double rho,
                      std::span<const double> center, const Grid& g) {
    if (prof.dim != g.dim || c.dim != g.dim) throw domain_error("dimension mismatch");
    if (static_cast<int>(center.size()) != g.dim) throw domain_error("center dimension mismatch");
    double eps = epsilon_scale(c, rho);
    if (g.spacing() > eps / 8.0)
        throw resolution_error("grid spacing does not resolve the blow-up scale; need h <= eps/8");
    double alpha = 1.0 / eps;
    double amp = std::pow(alpha, 0.5 * g.dim) / std::sqrt(c.a_star);

    Field u(g);
    const int n = g.points;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            double r = std::abs(g.coord(i) - center[0]);
            u.values[static_cast<size_t>(i)] = amp * prof.value_at(alpha * r);
        }
    } else if (g.dim == 2) {
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++k) {
                double dx = g.coord(i) - center[0], dy = g.coord(j) - center[1];
                u.values[k] = amp * prof.value_at(alpha * std::sqrt(dx * dx + dy * dy));
            }
    } else {
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l, ++k) {
                    double dx = g.coord(i) - center[0], dy = g.coord(j) - center[1],
                           dz = g.coord(l) - center[2];
                    u.values[k] = amp * prof.value_at(alpha * std::sqrt(dx * dx + dy * dy + dz * dz));
                }
    }
    zero_boundary(u);
    return u;
}

AsymptoticsReport asymptotics_report(const SolitonConstants& c, double rho, double lambda_bar0,
                                     double r) {
    AsymptoticsReport rep;
    rep.rho = rho;
    rep.tilde_e = tilde_e(c, rho);
    rep.epsilon = epsilon_scale(c, rho);
    rep.predicted_e = predicted_e(c, rho, lambda_bar0, r);
    return rep;
}

} // namespace nls
