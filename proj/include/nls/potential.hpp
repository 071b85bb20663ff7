#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nls/field.hpp"

namespace nls {

/// One zero of the trapping potential together with its homogeneous local
/// model: V(x_i + x) = V_i(x) (1 + o(1)) with V_i(t x) = t^{r_i} V_i(x).
struct Well {
    std::vector<double> location;                            // x_i
    double degree = 0.0;                                     // r_i
    std::function<double(std::span<const double>)> model;    // V_i
    /// Exponent s_i with |grad V - grad V_i| = O(|x|^{s_i}) near the well,
    /// recorded when the expansion provides it (infinity when V = V_i there).
    double remainder_exp = 0.0;
};

/// Nonnegative trapping potential with finitely many isolated zeros.
/// Immutable after construction; safe to share between threads.
struct Potential {
    int dim = 1;
    std::function<double(std::span<const double>)> value;
    /// Analytic gradient when the family provides one; empty otherwise.
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    std::vector<Well> wells;
    std::string describe;
};

/// Z, r = max_i r_i, and the flattest wells (those of maximal degree).
struct WellClassification {
    std::vector<std::vector<double>> z;
    double r = 0.0;
    std::vector<std::vector<double>> z_bar;
    std::vector<size_t> z_bar_index; // positions within pot.wells
};

/// Supported families, typed entry points.  Every builder validates the
/// declared invariants by sampling and throws domain_error on violation.
Potential power_well(int dim, std::vector<double> center, double s);
Potential quadratic_well(std::vector<double> coeffs);
Potential product_wells(std::vector<double> roots, std::vector<double> degrees);
Potential min_wells(int dim, std::vector<std::vector<double>> centers, std::vector<double> degrees,
                    std::vector<double> coeffs);
Potential piecewise_well(double center, double degree, double coef_right, double coef_left);

/// Config-facing constructor.  Keys: family = power | quadratic | product |
/// minwells | piecewise, plus family parameters (center, degree, coeffs,
/// roots, degrees, centers, coef_right, coef_left).  Unknown family or
/// malformed numbers raise config_error; semantic violations domain_error.
Potential build_potential(int dim, const std::map<std::string, std::string>& spec);

double eval_potential(const Potential& pot, std::span<const double> x);

/// Analytic gradient where available, else centered differences (step 1e-6).
std::vector<double> eval_gradient(const Potential& pot, std::span<const double> x);

WellClassification classify_wells(const Potential& pot);

} // namespace nls
