#pragma once

#include <stdexcept>
#include <string>

namespace nls {

/// Input violates a documented precondition (bad parameters, mismatched grids).
struct domain_error : std::invalid_argument {
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// An iteration failed to reach its tolerance within its budget.
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// A computed quantity is not trustworthy at the requested tolerance.
struct accuracy_error : std::runtime_error {
    explicit accuracy_error(const std::string& what) : std::runtime_error(what) {}
};

/// The grid is too coarse for the length scale of the requested problem.
struct resolution_error : domain_error {
    explicit resolution_error(const std::string& what) : domain_error(what) {}
};

/// Config file could not be parsed or validated; message names key and line.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A field has several well separated near-maximal peaks, so "the" peak
/// location is undefined (concentration not reached, or minimizer not unique).
struct ambiguity_error : std::runtime_error {
    explicit ambiguity_error(const std::string& what) : std::runtime_error(what) {}
};

/// A minimizer settled at a well the selection rule excludes; the message
/// carries the measured location.
struct selection_error : std::runtime_error {
    explicit selection_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nls
