#pragma once

#include <span>

#include "nls/field.hpp"
#include "nls/soliton.hpp"

namespace nls {

/// Closed-form predictions for the subcritical constrained problem.  All
/// exponents live here and nowhere else; epsilon_scale and energy_scale are
/// exposed separately so exponent errors cannot cancel silently.
/// Throws domain_error unless 4 - d(p-1) > 0 and rho > 0.

/// Energy scale (rho/sqrt(a*))^{4(p-1)/(4-d(p-1))}; equals alpha^2.
double energy_scale(const SolitonConstants& c, double rho);

/// Blow-up length (rho/sqrt(a*))^{-2(p-1)/(4-d(p-1))}; epsilon^2 * energy_scale = 1.
double epsilon_scale(const SolitonConstants& c, double rho);

/// -lambda * energy_scale; the flat-potential minimum of the energy.
double tilde_e(const SolitonConstants& c, double rho);

/// Multiplier of the explicit minimizer: -energy_scale, i.e. -alpha^2.
double tilde_mu(const SolitonConstants& c, double rho);

/// tilde_e(rho) + (lambda_bar0 / a*) * epsilon^r, the two-term expansion.
double predicted_e(const SolitonConstants& c, double rho, double lambda_bar0, double r);

/// The explicit flat-potential minimizer a*^{-1/2} alpha^{d/2} w(alpha(x - center))
/// sampled on g.  Unit mass up to quadrature error; never renormalized.
/// Throws resolution_error when g.spacing() > epsilon/8.
Field tilde_minimizer(const SolitonConstants& c, const SolitonProfile& prof, double rho,
                      std::span<const double> center, const Grid& g);

/// One row of closed-form predictions, as merged into sweep outputs.
struct AsymptoticsReport {
    double rho = 0.0;
    double tilde_e = 0.0;
    double epsilon = 0.0;
    double predicted_e = 0.0;
};

AsymptoticsReport asymptotics_report(const SolitonConstants& c, double rho, double lambda_bar0,
                                     double r);

} // namespace nls
