#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nls/potential.hpp"

namespace nls {

/// One experiment, fully determined: mode, problem, grid, solver knobs,
/// seed.  "auto" grid entries stay unset here and are resolved by the
/// runner from the collapse-scale rule.
struct ExperimentConfig {
    std::string mode; // soliton | constants | qmin | minimize | sweep | verify | probe
    int dim = 1;
    double p = 2.0;
    /// Keys forwarded to build_potential; empty map means V = 0, and
    /// family=zero is accepted as an explicit spelling of the same.
    std::map<std::string, std::string> potential_spec;
    std::optional<double> rho;
    std::vector<double> rho_list;
    std::optional<double> grid_half_width;
    std::optional<int> grid_points;
    double tol = 1e-8;
    long long max_iters = 500000;
    int n_inits = 10;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
};

/// Parse the flat sectioned key=value format.  Errors name the key and
/// line.  The mode may be omitted here and injected by the subcommand.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

/// Mode-aware validation, run after command line overrides are applied.
void validate_config(const ExperimentConfig& cfg);

/// Canonical key=value rendering of everything that identifies the
/// experiment (output directory and thread count excluded: they do not
/// change any computed number).
std::string canonical_text(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical text; stamped into every output header.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Potential described by the config; V = 0 when no spec was given.
Potential make_potential(const ExperimentConfig& cfg);

} // namespace nls
