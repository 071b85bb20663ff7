#include "nls/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nls/errors.hpp"

namespace nls {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    throw config_error(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_num(const std::string& origin, int line, const std::string& key,
                 const std::string& v) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        fail(origin, line, "key '" + key + "': cannot parse number from '" + v + "'");
    }
}

long long parse_int(const std::string& origin, int line, const std::string& key,
                    const std::string& v) {
    try {
        size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        fail(origin, line, "key '" + key + "': cannot parse integer from '" + v + "'");
    }
}

std::vector<double> parse_list(const std::string& origin, int line, const std::string& key,
                               const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) {
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (tok.empty()) continue;
        out.push_back(parse_num(origin, line, key, tok));
    }
    if (out.empty()) fail(origin, line, "key '" + key + "': empty list");
    return out;
}

const std::set<std::string> kModes = {"soliton", "constants", "qmin",  "minimize",
                                      "sweep",   "verify",    "probe"};
const std::set<std::string> kPotentialKeys = {"family", "center",     "degree",
                                              "coeffs", "roots",      "degrees",
                                              "centers", "coef_right", "coef_left"};

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        size_t hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(origin, line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "problem" && section != "potential" && section != "grid" &&
                section != "solver" && section != "probe" && section != "run")
                fail(origin, line, "unknown section [" + section + "]");
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) fail(origin, line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty()) fail(origin, line, "empty key");
        if (val.empty()) fail(origin, line, "key '" + key + "': empty value");

        if (section.empty() || section == "run") {
            if (key == "mode") {
                if (!kModes.count(val)) fail(origin, line, "unknown mode '" + val + "'");
                cfg.mode = val;
            } else if (key == "seed") {
                long long v = parse_int(origin, line, key, val);
                if (v < 0) fail(origin, line, "seed must be nonnegative");
                cfg.seed = static_cast<std::uint64_t>(v);
            } else if (key == "threads") {
                cfg.threads = static_cast<int>(parse_int(origin, line, key, val));
            } else if (key == "out") {
                cfg.out_dir = val;
            } else {
                fail(origin, line, "unknown key '" + key + "' in section [run]");
            }
        } else if (section == "problem") {
            if (key == "d")
                cfg.dim = static_cast<int>(parse_int(origin, line, key, val));
            else if (key == "p")
                cfg.p = parse_num(origin, line, key, val);
            else if (key == "rho")
                cfg.rho = parse_num(origin, line, key, val);
            else if (key == "rho_list")
                cfg.rho_list = parse_list(origin, line, key, val);
            else
                fail(origin, line, "unknown key '" + key + "' in section [problem]");
        } else if (section == "potential") {
            if (!kPotentialKeys.count(key))
                fail(origin, line, "unknown key '" + key + "' in section [potential]");
            cfg.potential_spec[key] = val;
        } else if (section == "grid") {
            if (key == "L") {
                if (val != "auto") cfg.grid_half_width = parse_num(origin, line, key, val);
            } else if (key == "n") {
                if (val != "auto") cfg.grid_points = static_cast<int>(parse_int(origin, line, key, val));
            } else {
                fail(origin, line, "unknown key '" + key + "' in section [grid]");
            }
        } else if (section == "solver") {
            if (key == "tol")
                cfg.tol = parse_num(origin, line, key, val);
            else if (key == "max_iters")
                cfg.max_iters = parse_int(origin, line, key, val);
            else
                fail(origin, line, "unknown key '" + key + "' in section [solver]");
        } else if (section == "probe") {
            if (key == "n_inits")
                cfg.n_inits = static_cast<int>(parse_int(origin, line, key, val));
            else
                fail(origin, line, "unknown key '" + key + "' in section [probe]");
        }
    }
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void validate_config(const ExperimentConfig& cfg) {
    if (!kModes.count(cfg.mode))
        throw config_error("mode '" + cfg.mode + "' is not one of soliton, constants, qmin, "
                           "minimize, sweep, verify, probe");
    if (cfg.dim < 1 || cfg.dim > 3) throw config_error("d must be 1, 2 or 3");

    double critical = 1.0 + 4.0 / cfg.dim;
    bool minimization = cfg.mode == "qmin" || cfg.mode == "minimize" || cfg.mode == "sweep" ||
                        cfg.mode == "verify" || cfg.mode == "probe";
    if (minimization) {
        if (!(cfg.p > 1.0 && cfg.p < critical)) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "p=%.17g violates the subcritical bound 1 < p < 1 + 4/d = %.17g",
                          cfg.p, critical);
            throw config_error(msg);
        }
    } else if (!(cfg.p > 1.0 && cfg.p <= critical)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "p=%.17g outside (1, 1 + 4/d] = (1, %.17g]", cfg.p,
                      critical);
        throw config_error(msg);
    }

    if (cfg.mode == "minimize" || cfg.mode == "probe") {
        if (!cfg.rho) throw config_error("mode " + cfg.mode + " needs [problem] rho");
        if (*cfg.rho < 0.0) throw config_error("rho must be nonnegative");
    }
    if (cfg.mode == "sweep" || cfg.mode == "verify") {
        if (cfg.rho_list.size() < 2)
            throw config_error("mode " + cfg.mode + " needs [problem] rho_list with >= 2 entries");
        for (size_t i = 0; i + 1 < cfg.rho_list.size(); ++i)
            if (!(cfg.rho_list[i] < cfg.rho_list[i + 1]))
                throw config_error("rho_list must be strictly increasing");
        if (cfg.rho_list.front() <= 0.0) throw config_error("rho_list entries must be positive");
    }
    if (cfg.mode == "verify" && cfg.rho_list.back() < 10.0 * cfg.rho_list.front())
        throw config_error("verify needs rho_list spanning at least a decade");
    if ((cfg.mode == "qmin" || cfg.mode == "verify") && cfg.potential_spec.empty())
        throw config_error("mode " + cfg.mode + " needs a [potential] section with wells");
    if (cfg.mode == "probe" && cfg.n_inits < 1) throw config_error("n_inits must be >= 1");

    if (cfg.grid_points && (*cfg.grid_points < 9 || *cfg.grid_points % 2 == 0))
        throw config_error("grid n must be an odd integer >= 9");
    if (cfg.grid_half_width && !(*cfg.grid_half_width > 0.0))
        throw config_error("grid L must be positive");
    if (!(cfg.tol > 0.0)) throw config_error("tol must be positive");
    if (cfg.max_iters < 1) throw config_error("max_iters must be positive");
    if (cfg.threads < 1) throw config_error("threads must be >= 1");
}

std::string canonical_text(const ExperimentConfig& cfg) {
    char buf[64];
    std::ostringstream out;
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "mode=" << cfg.mode << "\n";
    out << "d=" << cfg.dim << "\n";
    out << "p=" << num(cfg.p) << "\n";
    for (const auto& [k, v] : cfg.potential_spec) out << "potential." << k << "=" << v << "\n";
    if (cfg.rho) out << "rho=" << num(*cfg.rho) << "\n";
    if (!cfg.rho_list.empty()) {
        out << "rho_list=";
        for (size_t i = 0; i < cfg.rho_list.size(); ++i)
            out << (i ? " " : "") << num(cfg.rho_list[i]);
        out << "\n";
    }
    if (cfg.grid_half_width) out << "grid.L=" << num(*cfg.grid_half_width) << "\n";
    if (cfg.grid_points) out << "grid.n=" << *cfg.grid_points << "\n";
    out << "tol=" << num(cfg.tol) << "\n";
    out << "max_iters=" << cfg.max_iters << "\n";
    if (cfg.mode == "probe" || cfg.mode == "verify") out << "n_inits=" << cfg.n_inits << "\n";
    out << "seed=" << cfg.seed << "\n";
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::string text = canonical_text(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Potential make_potential(const ExperimentConfig& cfg) {
    if (cfg.potential_spec.empty() ||
        (cfg.potential_spec.count("family") && cfg.potential_spec.at("family") == "zero")) {
        Potential flat;
        flat.dim = cfg.dim;
        flat.value = [](std::span<const double>) { return 0.0; };
        flat.describe = "zero potential";
        return flat;
    }
    return build_potential(cfg.dim, cfg.potential_spec);
}

} // namespace nls
