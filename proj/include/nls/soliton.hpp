#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "nls/field.hpp"

namespace nls {

/// Radial profile of the positive decaying solution of
///   w'' + ((d-1)/r) w' - w + w^p = 0,  w'(0) = 0,  w(r) -> 0,
/// sampled on the uniform mesh r_j = j * step up to r_max and extended
/// beyond r_max by the fitted far-field form C r^{-(d-1)/2} e^{-r}.
struct SolitonProfile {
    int dim = 1;
    double exponent = 2.0; // p
    double r_max = 25.0;
    double step = 1e-3;
    std::vector<double> w;  // w(r_j)
    std::vector<double> dw; // w'(r_j)
    double w0 = 0.0;        // peak value w(0)
    double tail_rate = 1.0; // fitted exponential decay rate of the tail
    double tail_coef = 0.0; // C in the far-field form
    double ode_residual = 0.0;

    double radius(size_t j) const { return step * static_cast<double>(j); }
    /// Cubic interpolation on the mesh; far-field form beyond r_max.
    double value_at(double r) const;
    double deriv_at(double r) const;
};

/// Scale-invariant constants of a profile, all via trapezoid quadrature with
/// radial weight r^{d-1} plus the analytic far-tail contribution.
struct SolitonConstants {
    int dim = 1;
    double exponent = 2.0;
    double a_star = 0.0;   // ||w||_2^2
    double grad_sq = 0.0;  // ||grad w||_2^2
    double mass_p1 = 0.0;  // ∫ w^{p+1}
    double c_gn = 0.0;     // optimal interpolation-inequality constant
    double lambda = 0.0;   // (1/2)(4-d(p-1)) / (2(p+1)-d(p-1))
};

struct SolverOpts {
    double step = 1e-3;
    double r_max = 25.0;
    double bracket_lo = 1.0;
    double bracket_hi = 10.0;
    int max_bisect = 200;
    double tol = 1e-8; // bound demanded of the measured ODE residual
};

/// Shooting with bisection on w(0), then a collocation polish of the sampled
/// profile.  Throws domain_error for out-of-range (d, p), convergence_error
/// when the bracket fails, accuracy_error when the residual bound is missed.
SolitonProfile solve_soliton(int dim, double p, const SolverOpts& opts = {});

SolitonConstants soliton_constants(const SolitonProfile& prof);

/// {res1, res2}: relative defects of the Pohozaev identity
/// (d-2)∫|∇w|² + d∫w² = (2d/(p+1))∫w^{p+1} and of the identity chain tying
/// ∫|∇w|² to ∫w^{p+1} and ∫w².
std::pair<double, double> pohozaev_residuals(const SolitonProfile& prof);

/// ||∇u||^{(d/2)(p-1)} ||u||^{p+1-(d/2)(p-1)} / ∫|u|^{p+1}.
/// Bounded below by c_gn, with equality exactly at rescalings of w.
double gn_ratio(const Field& u, double p);

/// v -> -Δv + (1 - p w^{p-1}(|x|)) v on the grid interior (fourth-order
/// stencils; the outermost two cells are left at zero).
Field linearized_apply(const SolitonProfile& prof, const Field& v);

/// Two-column text dump (r, w) with a header carrying d, p, w0, tail_rate.
void write_profile(std::ostream& os, const SolitonProfile& prof);
SolitonProfile read_profile(std::istream& is);

} // namespace nls
