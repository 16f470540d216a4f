#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace falforge {

/// Base class for all falforge errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file or JSON document.
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Structurally invalid input (bad nerve, bad dimer, mismatched geometry, ...).
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Iterative solver failed to reach the requested tolerance.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, std::vector<double> trace)
        : Error(msg), residual_trace(std::move(trace)) {}
    std::vector<double> residual_trace;
};

/// A built complex failed one of its structural audits.
struct AuditError : Error {
    AuditError(const std::string& msg, std::string cell)
        : Error(msg), cell_name(std::move(cell)) {}
    std::string cell_name;
};

} // namespace falforge
