#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nls/field.hpp"
#include "nls/potential.hpp"
#include "nls/soliton.hpp"

namespace nls {

struct MinimizeOpts {
    double tol = 1e-8;      // sup-norm of the projected discrete gradient
    double de_tol = 1e-12;  // energy stall threshold
    int de_window = 10;     // consecutive stalled steps required
    long long max_iters = 500000;
    double tau0 = 0.0;      // 0: auto, min(0.1, 0.2 eps^2); halved on energy increase
    /// Optional per-step observer (iteration, current field, energy, residual).
    std::function<void(long long, const Field&, double, double)> observer;
};

struct MinimizeResult {
    Field u;
    double rho = 0.0;
    double exponent = 2.0;
    double energy = 0.0;        // reported functional value (fourth-order gradient)
    double mu = 0.0;            // multiplier of the discrete Euler-Lagrange equation
    double grad_residual = 0.0; // sup-norm of the projected gradient at exit
    long long iterations = 0;
    std::vector<double> max_point;
};

/// (1/2)∫|∇u|^2 + (1/2)∫V u^2 - (rho^{p-1}/(p+1))∫|u|^{p+1} on the grid.
/// Throws domain_error unless ||u||_2 = 1 within 1e-8.
double energy(const Field& u, const Potential& pot, double rho, double p);

/// Normalized gradient flow: Laplacian and potential implicit, nonlinearity
/// and multiplier shift explicit, renormalize every step.  The fixed point
/// solves the discrete Euler-Lagrange equation exactly.  `init` null means
/// the explicit flat-problem minimizer centered at the predicted
/// concentration point.  Throws resolution_error when h > eps(rho)/8 and
/// convergence_error when the iteration cap is hit.
MinimizeResult minimize(const Grid& g, const Potential& pot, const SolitonProfile& prof,
                        double rho, const Field* init = nullptr, const MinimizeOpts& opts = {});

/// mu = 2 E(u) - ((p-1)/(p+1)) rho^{p-1} ∫|u|^{p+1}, the integral identity.
double chemical_potential(const MinimizeResult& res, const Potential& pot, double rho);

/// Sup-norm of -Δu + Vu - mu u - rho^{p-1} u^p with the scheme's Laplacian.
double eigen_residual(const MinimizeResult& res, const Potential& pot, double rho);

struct SweepOpts {
    MinimizeOpts min_opts;
    /// Grid used for a given rho; default: L = max(8, 4 max|x_i|),
    /// h = min(0.02, eps/12), odd point count.
    std::function<Grid(double rho, double eps)> grid_rule;
    bool warm_start = true; // rescale the previous minimizer as the next init
};

/// Minimize over a strictly increasing list of rho values.
std::vector<MinimizeResult> sweep(const Potential& pot, const SolitonProfile& prof,
                                  std::span<const double> rhos, const SweepOpts& opts = {});

} // namespace nls
