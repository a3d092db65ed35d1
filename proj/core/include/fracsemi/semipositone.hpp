#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracsemi/fraclap.hpp"
#include "fracsemi/grid.hpp"

namespace fracsemi {

enum class Classification { monotone_limit, minimizer, mountain_pass };
const char* classification_name(Classification c);

struct SolveReport {
    FieldFunction solution;
    std::optional<double> energy;  // filled only by the variational solvers
    double residual_inf = 0.0;
    int iterations = 0;
    bool converged = false;
    Classification classification = Classification::monotone_limit;
    bool ordering_ok = false;
    double min_value = 0.0;
    std::optional<double> decay_exponent;  // absent when the limit is not positive
    double tol = 0.0;                      // the tolerance the run was asked for
};

enum class Direction { ascend, descend };

// Monotone iteration u_{k+1} = (A + shift I)^{-1}(lambda(u^q - 1) + mu u^r + shift u)
// with t^q, t^r extended by 0 for t < 0. Ascend starts from `lower` (must be a
// certified subsolution, with `upper` a certified supersolution above it);
// descend starts from `upper`. Each step is checked for pointwise monotonicity;
// a violation beyond rounding slack aborts. A descend limit with nonpositive
// minimum is a normal outcome (nonexistence evidence), reported with
// converged = true and ordering_ok = false.
SolveReport monotone_iterate(const DiscreteFracLap& op, double lambda, double mu, double q,
                             double r, const FieldFunction* lower, const FieldFunction* upper,
                             Direction direction, double tol, int max_iter = 50000,
                             double shift = 0.0);

// ub = lambda^alpha2 * psi and its supersolution margin
// min_i[(A ub)_i - lambda(ub^q - 1) - mu ub^r]; certificate passes iff >= 0.
std::pair<FieldFunction, double> supersolution_mu(const DiscreteFracLap& op, double lambda,
                                                  double mu, double q, double r, double alpha2,
                                                  const FieldFunction& psi);

struct Lambda0Bracket {
    double lambda_lo = 0.0;  // detector false here
    double lambda_hi = 0.0;  // detector true here
    bool detector_lo = false;
    bool detector_hi = false;
    std::vector<std::pair<double, bool>> trace;  // every detector evaluation, in call order
};

// Bisection bracket for lambda0 = inf{lambda : the discrete problem has a
// positive solution}. The detector declares lambda feasible iff the descend
// iteration from z_lambda converges to a limit with positive interior minimum
// and residual within tol. Fully deterministic.
Lambda0Bracket estimate_lambda0(const DiscreteFracLap& op, double q, double rel_tol,
                                double detector_tol = 1e-9, double lambda_start = 0.01,
                                double cap = 1e8);

}  // namespace fracsemi
