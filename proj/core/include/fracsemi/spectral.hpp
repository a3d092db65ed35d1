#pragma once

#include <vector>

#include "fracsemi/fraclap.hpp"
#include "fracsemi/grid.hpp"

namespace fracsemi {

// Solves (A + shift*I) u = rhs by conjugate gradients to a relative l2
// residual of tol. Starts from `initial` when given (warm starts matter in the
// monotone iterations). Throws ConvergenceError with the best iterate when the
// cap is hit.
FieldFunction solve_linear(const DiscreteFracLap& op, double shift, const FieldFunction& rhs,
                           double tol, int max_iter = 50000,
                           const FieldFunction* initial = nullptr);

struct Eigenpair {
    double lambda1 = 0.0;
    FieldFunction phi1;        // positive, sup-normalized to 1
    double residual_inf = 0.0; // ||A phi - lambda phi||_inf at exit
    int iterations = 0;
};

// Principal eigenpair by inverse power iteration with Rayleigh-quotient
// stopping: residual_inf <= rtol * lambda1.
Eigenpair principal_eigenpair(const DiscreteFracLap& op, double rtol, int max_iter = 400,
                              const FieldFunction* start = nullptr);

// Discrete best constant sup_{u != 0} ||u||_Lp / ||u||_A by normalized ascent
// on the ratio (step 0.1, halved on non-increase) from `starts` seeded random
// starts; the maximum over starts is returned. The value under-estimates the
// true discrete supremum by at most the ascent resolution: the iteration only
// stops once no step of length >= eta_min improves the ratio.
double embedding_constant(const DiscreteFracLap& op, double p, double tol = 1e-13,
                          unsigned seed = 1234, int starts = 5, long max_iter = 400000);

}  // namespace fracsemi
