#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracsemi {

// Invalid problem parameters or grid setup detected before any computation.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Two fields (or a field and an operator) built on different grids.
class GridMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A cross-check between two independent computations of the same quantity
// disagreed beyond tolerance, or an iteration broke a structural property
// (monotonicity, positivity) that the discretization is supposed to carry.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative solver hit its cap. Carries the best iterate values, the residual
// it reached, and a trace of residuals for postmortem.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> best_values,
                     double residual, int iterations, std::vector<double> trace = {})
        : std::runtime_error(what),
          best(std::move(best_values)),
          residual(residual),
          iterations(iterations),
          trace(std::move(trace)) {}

    std::vector<double> best;
    double residual;
    int iterations;
    std::vector<double> trace;
};

// A search (threshold scan, bracket hunt) exhausted its range. Carries the
// (parameter, margin/indicator) pairs visited.
class SearchError : public std::runtime_error {
public:
    SearchError(const std::string& what, std::vector<std::pair<double, double>> trace = {})
        : std::runtime_error(what), trace(std::move(trace)) {}

    std::vector<std::pair<double, double>> trace;
};

}  // namespace fracsemi
