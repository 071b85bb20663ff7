#include "nls/potential.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

namespace nls {

namespace {

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

std::string point_str(std::span<const double> x) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    return os.str();
}

void unit_vector(std::mt19937_64& rng, std::span<double> out) {
    std::normal_distribution<double> nrm(0.0, 1.0);
    double n = 0.0;
    do {
        for (double& v : out) v = nrm(rng);
        n = norm(out);
    } while (n < 1e-3);
    for (double& v : out) v /= n;
}

/// Sampled checks of the declared invariants: zeros at wells, nonnegativity,
/// homogeneity of each local model, and model consistency on shrinking shells.
void validate(const Potential& pot) {
    if (pot.wells.empty()) throw domain_error("potential has no declared zero");
    const int d = pot.dim;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::vector<double> x(static_cast<size_t>(d)), y(static_cast<size_t>(d));

    for (const Well& w : pot.wells) {
        if (static_cast<int>(w.location.size()) != d)
            throw domain_error("well location dimension mismatch");
        double v0 = pot.value(w.location);
        if (std::abs(v0) > 1e-12)
            throw domain_error("potential does not vanish at declared well " + point_str(w.location));

        std::uniform_real_distribution<double> logt(std::log(0.1), std::log(10.0));
        for (int trial = 0; trial < 32; ++trial) {
            unit_vector(rng, x);
            double t = std::exp(logt(rng));
            for (int a = 0; a < d; ++a) y[static_cast<size_t>(a)] = t * x[static_cast<size_t>(a)];
            double lhs = w.model(y);
            double rhs = std::pow(t, w.degree) * w.model(x);
            if (std::abs(lhs - rhs) > 1e-10 * std::max(lhs, 1e-300))
                throw domain_error("local model is not homogeneous at well " + point_str(w.location));
        }

        const double shells[3] = {1e-2, 1e-3, 1e-4};
        const double slack[3] = {0.1, 0.03, 0.01};
        for (int s = 0; s < 3; ++s) {
            for (int trial = 0; trial < 16; ++trial) {
                unit_vector(rng, x);
                for (int a = 0; a < d; ++a) {
                    y[static_cast<size_t>(a)] = shells[s] * x[static_cast<size_t>(a)];
                    x[static_cast<size_t>(a)] = w.location[static_cast<size_t>(a)] + y[static_cast<size_t>(a)];
                }
                double ratio = pot.value(x) / w.model(y);
                if (!(ratio > 1.0 - slack[s] && ratio < 1.0 + slack[s]))
                    throw domain_error("potential does not match its local model near " +
                                       point_str(w.location));
            }
        }
    }

    std::uniform_real_distribution<double> box(-10.0, 10.0);
    for (int trial = 0; trial < 2000; ++trial) {
        for (double& v : x) v = box(rng);
        if (pot.value(x) < -1e-12) throw domain_error("potential is negative at " + point_str(x));
    }
}

std::vector<double> power_grad(std::span<const double> x, std::span<const double> c, double s,
                               double coef) {
    std::vector<double> g(x.size(), 0.0);
    double n2 = 0.0;
    for (size_t a = 0; a < x.size(); ++a) {
        g[a] = x[a] - c[a];
        n2 += g[a] * g[a];
    }
    double n = std::sqrt(n2);
    if (n == 0.0) {
        std::fill(g.begin(), g.end(), 0.0);
        return g;
    }
    double f = coef * s * std::pow(n, s - 2.0);
    for (double& v : g) v *= f;
    return g;
}

} // namespace

Potential power_well(int dim, std::vector<double> center, double s) {
    if (dim < 1 || dim > 3) throw domain_error("potential dimension must be 1, 2 or 3");
    if (static_cast<int>(center.size()) != dim) throw domain_error("well center dimension mismatch");
    if (!(s > 0.0)) throw domain_error("power well needs a positive degree");
    Potential pot;
    pot.dim = dim;
    auto c = center;
    pot.value = [c, s](std::span<const double> x) {
        double n2 = 0.0;
        for (size_t a = 0; a < x.size(); ++a) n2 += (x[a] - c[a]) * (x[a] - c[a]);
        return std::pow(n2, 0.5 * s);
    };
    pot.gradient = [c, s](std::span<const double> x, std::span<double> out) {
        auto g = power_grad(x, c, s, 1.0);
        std::copy(g.begin(), g.end(), out.begin());
    };
    Well w;
    w.location = center;
    w.degree = s;
    w.model = [s](std::span<const double> x) { return std::pow(norm(x), s); };
    w.remainder_exp = std::numeric_limits<double>::infinity();
    pot.wells.push_back(std::move(w));
    char buf[128];
    std::snprintf(buf, sizeof buf, "power center=%s degree=%g", point_str(center).c_str(), s);
    pot.describe = buf;
    validate(pot);
    return pot;
}

Potential quadratic_well(std::vector<double> coeffs) {
    int dim = static_cast<int>(coeffs.size());
    if (dim < 1 || dim > 3) throw domain_error("potential dimension must be 1, 2 or 3");
    for (double c : coeffs)
        if (!(c > 0.0)) throw domain_error("anisotropic quadratic needs strictly positive coefficients");
    Potential pot;
    pot.dim = dim;
    auto cs = coeffs;
    pot.value = [cs](std::span<const double> x) {
        double v = 0.0;
        for (size_t a = 0; a < x.size(); ++a) v += cs[a] * x[a] * x[a];
        return v;
    };
    pot.gradient = [cs](std::span<const double> x, std::span<double> out) {
        for (size_t a = 0; a < x.size(); ++a) out[a] = 2.0 * cs[a] * x[a];
    };
    Well w;
    w.location.assign(static_cast<size_t>(dim), 0.0);
    w.degree = 2.0;
    w.model = pot.value;
    w.remainder_exp = std::numeric_limits<double>::infinity();
    pot.wells.push_back(std::move(w));
    std::ostringstream os;
    os << "quadratic coeffs=" << point_str(coeffs);
    pot.describe = os.str();
    validate(pot);
    return pot;
}

Potential product_wells(std::vector<double> roots, std::vector<double> degrees) {
    if (roots.empty() || roots.size() != degrees.size())
        throw domain_error("product well needs matching nonempty roots and degrees");
    for (double r : degrees)
        if (!(r > 0.0)) throw domain_error("product well degrees must be positive");
    for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < 1e-9)
                throw domain_error("product well roots must be distinct");
    Potential pot;
    pot.dim = 1;
    auto rs = roots;
    auto ds = degrees;
    pot.value = [rs, ds](std::span<const double> x) {
        double v = 1.0;
        for (size_t i = 0; i < rs.size(); ++i) v *= std::pow(std::abs(x[0] - rs[i]), ds[i]);
        return v;
    };
    pot.gradient = [rs, ds](std::span<const double> x, std::span<double> out) {
        // V' = V * sum_i r_i / (x - x_i) away from the roots.
        double v = 1.0;
        for (size_t i = 0; i < rs.size(); ++i) {
            double dx = x[0] - rs[i];
            if (std::abs(dx) < 1e-14) { // at a root the product vanishes to order >= 1
                out[0] = 0.0;
                return;
            }
            v *= std::pow(std::abs(dx), ds[i]);
        }
        double s = 0.0;
        for (size_t i = 0; i < rs.size(); ++i) s += ds[i] / (x[0] - rs[i]);
        out[0] = v * s;
    };
    for (size_t k = 0; k < roots.size(); ++k) {
        // Taylor coefficient of the homogeneous model: product of the other
        // factors frozen at this root.
        double coef = 1.0;
        for (size_t i = 0; i < roots.size(); ++i)
            if (i != k) coef *= std::pow(std::abs(roots[k] - roots[i]), degrees[i]);
        Well w;
        w.location = {roots[k]};
        w.degree = degrees[k];
        double dk = degrees[k];
        w.model = [coef, dk](std::span<const double> x) { return coef * std::pow(std::abs(x[0]), dk); };
        w.remainder_exp = degrees[k]; // |grad V - grad V_k| = O(|x|^{r_k}) here
        pot.wells.push_back(std::move(w));
    }
    std::ostringstream os;
    os << "product roots=" << point_str(roots) << " degrees=" << point_str(degrees);
    pot.describe = os.str();
    validate(pot);
    return pot;
}

Potential min_wells(int dim, std::vector<std::vector<double>> centers, std::vector<double> degrees,
                    std::vector<double> coeffs) {
    if (dim < 1 || dim > 3) throw domain_error("potential dimension must be 1, 2 or 3");
    if (centers.empty() || centers.size() != degrees.size() || centers.size() != coeffs.size())
        throw domain_error("min composite needs matching centers, degrees and coefficients");
    for (double r : degrees)
        if (!(r > 0.0)) throw domain_error("min composite degrees must be positive");
    for (double c : coeffs)
        if (!(c > 0.0)) throw domain_error("min composite coefficients must be positive");
    Potential pot;
    pot.dim = dim;
    auto ctr = centers;
    auto ds = degrees;
    auto cf = coeffs;
    auto branch = [ctr, ds, cf](std::span<const double> x, size_t i) {
        double n2 = 0.0;
        for (size_t a = 0; a < x.size(); ++a) n2 += (x[a] - ctr[i][a]) * (x[a] - ctr[i][a]);
        return cf[i] * std::pow(n2, 0.5 * ds[i]);
    };
    pot.value = [branch, n = centers.size()](std::span<const double> x) {
        double v = branch(x, 0);
        for (size_t i = 1; i < n; ++i) v = std::min(v, branch(x, i));
        return v;
    };
    pot.gradient = [branch, ctr, ds, cf, n = centers.size()](std::span<const double> x,
                                                             std::span<double> out) {
        size_t best = 0;
        double v = branch(x, 0);
        for (size_t i = 1; i < n; ++i) {
            double b = branch(x, i);
            if (b < v) { v = b; best = i; }
        }
        auto g = power_grad(x, ctr[best], ds[best], cf[best]);
        std::copy(g.begin(), g.end(), out.begin());
    };
    for (size_t k = 0; k < centers.size(); ++k) {
        Well w;
        w.location = centers[k];
        w.degree = degrees[k];
        double dk = degrees[k], ck = coeffs[k];
        w.model = [ck, dk](std::span<const double> x) { return ck * std::pow(norm(x), dk); };
        w.remainder_exp = std::numeric_limits<double>::infinity();
        pot.wells.push_back(std::move(w));
    }
    std::ostringstream os;
    os << "minwells";
    for (size_t k = 0; k < centers.size(); ++k)
        os << " " << point_str(centers[k]) << "^" << degrees[k] << "*" << coeffs[k];
    pot.describe = os.str();
    validate(pot);
    return pot;
}

Potential piecewise_well(double center, double degree, double coef_right, double coef_left) {
    if (!(degree > 0.0)) throw domain_error("piecewise well needs a positive degree");
    if (!(coef_right > 0.0) || !(coef_left > 0.0))
        throw domain_error("piecewise well coefficients must be positive");
    Potential pot;
    pot.dim = 1;
    pot.value = [center, degree, coef_right, coef_left](std::span<const double> x) {
        double h = x[0] - center;
        return (h >= 0.0 ? coef_right : coef_left) * std::pow(std::abs(h), degree);
    };
    pot.gradient = [center, degree, coef_right, coef_left](std::span<const double> x,
                                                           std::span<double> out) {
        double h = x[0] - center;
        double c = h >= 0.0 ? coef_right : coef_left;
        out[0] = h == 0.0 ? 0.0 : c * degree * std::pow(std::abs(h), degree - 1.0) * (h > 0 ? 1.0 : -1.0);
    };
    Well w;
    w.location = {center};
    w.degree = degree;
    w.model = [degree, coef_right, coef_left](std::span<const double> x) {
        return (x[0] >= 0.0 ? coef_right : coef_left) * std::pow(std::abs(x[0]), degree);
    };
    w.remainder_exp = std::numeric_limits<double>::infinity();
    pot.wells.push_back(std::move(w));
    char buf[160];
    std::snprintf(buf, sizeof buf, "piecewise center=%g degree=%g right=%g left=%g", center, degree,
                  coef_right, coef_left);
    pot.describe = buf;
    validate(pot);
    return pot;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double num(const std::string& s) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw config_error("potential spec: cannot parse number '" + s + "'");
    }
}

std::vector<double> num_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) out.push_back(num(tok));
    return out;
}

std::vector<double> parse_point(std::string s) {
    if (!s.empty() && s.front() == '(') s = s.substr(1);
    if (!s.empty() && s.back() == ')') s.pop_back();
    return num_list(s);
}

const std::string& need(const std::map<std::string, std::string>& spec, const std::string& key) {
    auto it = spec.find(key);
    if (it == spec.end()) throw config_error("potential spec missing '" + key + "'");
    return it->second;
}

} // namespace

Potential build_potential(int dim, const std::map<std::string, std::string>& spec) {
    const std::string& family = need(spec, "family");
    if (family == "power") {
        return power_well(dim, parse_point(need(spec, "center")), num(need(spec, "degree")));
    }
    if (family == "quadratic") {
        auto coeffs = num_list(need(spec, "coeffs"));
        if (static_cast<int>(coeffs.size()) != dim)
            throw config_error("quadratic spec: coefficient count must equal the dimension");
        return quadratic_well(coeffs);
    }
    if (family == "product") {
        if (dim != 1) throw config_error("product wells are one-dimensional");
        return product_wells(num_list(need(spec, "roots")), num_list(need(spec, "degrees")));
    }
    if (family == "minwells") {
        std::vector<std::vector<double>> centers;
        for (const auto& tok : split(need(spec, "centers"), ';')) centers.push_back(parse_point(tok));
        auto degrees = num_list(need(spec, "degrees"));
        std::vector<double> coeffs(centers.size(), 1.0);
        if (spec.count("coeffs")) coeffs = num_list(spec.at("coeffs"));
        return min_wells(dim, std::move(centers), std::move(degrees), std::move(coeffs));
    }
    if (family == "piecewise") {
        if (dim != 1) throw config_error("piecewise wells are one-dimensional");
        double center = spec.count("center") ? num(spec.at("center")) : 0.0;
        return piecewise_well(center, num(need(spec, "degree")), num(need(spec, "coef_right")),
                              num(need(spec, "coef_left")));
    }
    throw config_error("unknown potential family '" + family + "'");
}

double eval_potential(const Potential& pot, std::span<const double> x) {
    return pot.value(x);
}

std::vector<double> eval_gradient(const Potential& pot, std::span<const double> x) {
    std::vector<double> g(x.size(), 0.0);
    if (pot.gradient) {
        pot.gradient(x, g);
        return g;
    }
    const double h = 1e-6;
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    for (size_t a = 0; a < x.size(); ++a) {
        xp[a] = x[a] + h;
        xm[a] = x[a] - h;
        g[a] = (pot.value(xp) - pot.value(xm)) / (2.0 * h);
        xp[a] = x[a];
        xm[a] = x[a];
    }
    return g;
}

WellClassification classify_wells(const Potential& pot) {
    if (pot.wells.empty()) throw domain_error("potential has no wells to classify");
    WellClassification cls;
    cls.r = 0.0;
    for (const Well& w : pot.wells) {
        cls.z.push_back(w.location);
        cls.r = std::max(cls.r, w.degree);
    }
    for (size_t i = 0; i < pot.wells.size(); ++i) {
        if (pot.wells[i].degree > cls.r - 1e-9) {
            cls.z_bar.push_back(pot.wells[i].location);
            cls.z_bar_index.push_back(i);
        }
    }
    return cls;
}

} // namespace nls
