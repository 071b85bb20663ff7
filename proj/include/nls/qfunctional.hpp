#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nls/potential.hpp"
#include "nls/soliton.hpp"

namespace nls {

using PointFun = std::function<double(std::span<const double>)>;

struct QOpts {
    double r_cut = 16.0; // radial truncation of the quadrature
    int stride = 2;      // radial node stride over the profile mesh
    bool warn = true;    // stderr note when the tail estimate exceeds 1%
    double search_half_width = 5.0;
    double coarse_step = 0.25;
    double hessian_step = 1e-3;
};

/// Minimization record for one well model.
struct QResult {
    size_t well_index = 0;
    std::vector<double> y0;
    double lambda_bar = 0.0;
    std::vector<double> hessian; // d x d, row major, symmetric
    bool nondegenerate = false;
    /// False when another local minimum sits within 1e-8 of the global value
    /// at separation > 0.05; the tied locations are listed in extra_minima.
    bool k0_singleton = true;
    std::vector<std::vector<double>> extra_minima;
};

/// Q(y) = ∫ V(x + y) w(x)^2 dx over |x| <= r_cut plus an analytic estimate
/// of the truncated tail.  `tail_fraction`, when given, receives the ratio
/// of the tail estimate to the total.
double q_value(const PointFun& vi, const SolitonProfile& prof, std::span<const double> y,
               const QOpts& opts = {}, double* tail_fraction = nullptr);

/// Global minimization of Q over [-B, B]^d: coarse scan, then compass descent
/// from every coarse basin; Hessian by central second differences.
QResult minimize_q(const PointFun& vi, const SolitonProfile& prof, const QOpts& opts = {});

/// Wells of maximal degree, their minimized Q records, and the selected
/// concentration wells (argmin of lambda_bar over the flattest wells).
struct ConcentrationSelection {
    std::vector<size_t> z0;      // indices into pot.wells, all ties reported
    double lambda_bar0 = 0.0;
    std::vector<QResult> gamma;  // one record per flattest well
};

ConcentrationSelection select_concentration(const Potential& pot, const SolitonProfile& prof,
                                            const QOpts& opts = {});

} // namespace nls
