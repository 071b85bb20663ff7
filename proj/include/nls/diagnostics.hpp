#pragma once

#include <cstdint>
#include <vector>

#include "nls/groundstate.hpp"
#include "nls/qfunctional.hpp"

namespace nls {

/// Default grid for rescaled profiles, sized per dimension so the whole
/// fit window of decay_check (values down to 1e-8) fits in the box.
Grid reference_grid(int dim);

/// Zoom a minimizer into soliton coordinates,
///   ubar(x) = sqrt(a*) eps^{d/2} u(eps x + x_rho),
/// centered on the interpolated peak, so ||ubar||_2^2 = a* and ubar
/// approaches the soliton profile for large rho.  Throws ambiguity_error
/// when the 0.9-level set of u is much wider than the collapse scale
/// (two or more separated peaks: no single center exists).
Field rescale(const MinimizeResult& res, const SolitonConstants& c, const Grid& ref);
Field rescale(const MinimizeResult& res, const SolitonConstants& c);

struct DecayFit {
    bool decay_ok = false;
    double rate = 0.0; // least squares slope of log u against |x|
    double coef = 0.0; // exp(intercept)
    size_t points = 0; // samples inside the fit window
};

/// Exponential decay test on a rescaled profile: fit log u ~ c + s|x| over
/// the shell where u lies in [1e-8, 1e-2]; passes when s <= -1/2 + 0.05.
/// Throws accuracy_error when the window holds too few samples.
DecayFit decay_check(const Field& u_bar);

struct ConcentrationReport {
    std::vector<double> rho_list;
    std::vector<double> distances_linf;           // |ubar - w|_inf per entry
    std::vector<bool> decay_ok;
    std::vector<std::vector<double>> max_points;  // peak location per entry
    std::vector<std::vector<double>> rate_points; // (x_rho - x0)/eps per entry
    /// Least squares slope, through the origin, of e - tilde_e against eps^r
    /// over the trailing half of the sweep.
    double fitted_lambda_bar = 0.0;
};

/// Concentration summary of a sweep: rescaled profile distances, decay
/// flags, peak drift measured against the well the selection rule picks.
/// Throws selection_error if the final peak sits nearest to a well the
/// rule excludes, domain_error when the sweep spans less than a decade.
ConcentrationReport concentration_rate(const std::vector<MinimizeResult>& results,
                                       const SolitonConstants& c, const SolitonProfile& prof,
                                       const Potential& pot, const ConcentrationSelection& sel);

struct ProbeReport {
    std::vector<MinimizeResult> runs;
    double max_distance = 0.0;  // max pairwise L_inf between raw fields
    double energy_spread = 0.0; // (max e - min e) / |min e|
};

/// Multi-start experiment: flow n_inits random positive bump sums (drawn
/// deterministically from seed) to minimizers on one grid and measure how
/// far apart they end up.  threads > 1 solves several starts concurrently;
/// the inits and the report are identical either way.
ProbeReport uniqueness_probe(const Grid& g, const Potential& pot, const SolitonProfile& prof,
                             double rho, int n_inits, std::uint64_t seed, int threads = 1);

/// Single-linkage clustering of probe runs by peak location (L_inf metric,
/// merge below cutoff).  Returns a cluster index per run; indices are dense
/// and ordered by first appearance.
std::vector<int> cluster_peaks(const ProbeReport& rep, double cutoff);

struct EquivalenceReport {
    double norm_error = 0.0; // | ||u||_2 - 1 |
    double mu_gap_rel = 0.0; // |mu - (2e + rho e'_fd)| / |mu|
    bool norm_ok = false;
    bool mu_ok = false;
};

/// Multiplier bookkeeping on a sweep triple: nonuniform three-point e'(rho)
/// at mid.rho feeds mu = 2 e(rho) + rho e'(rho).
EquivalenceReport equivalence_checks(const MinimizeResult& lo, const MinimizeResult& mid,
                                     const MinimizeResult& hi);

/// rho = 0 variant: the derivative term carries a rho factor and drops out,
/// leaving mu = 2e.
EquivalenceReport equivalence_checks(const MinimizeResult& res);

} // namespace nls
