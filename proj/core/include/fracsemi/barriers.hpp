#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fracsemi/fraclap.hpp"
#include "fracsemi/grid.hpp"
#include "fracsemi/spectral.hpp"

namespace fracsemi {

// Discrete torsion function: solves A psi = 1.
FieldFunction torsion(const DiscreteFracLap& op, double tol);

// Positive solution of A z = lambda z^q (0 < q < 1) by monotone descent from
// the explicit supersolution t*psi with t^(1-q) >= lambda * max(psi)^q.
// The iterates are pointwise nonincreasing; a negative iterate means the
// M-matrix property broke and is fatal.
FieldFunction solve_sublinear(const DiscreteFracLap& op, double lambda, double q, double tol,
                              int max_iter = 20000);

// h(x_i) = int (phi1(x_i) - phi1(y))^2 |x_i - y|^(-1-2s) dy computed two ways:
// from the operator identity A(phi^2) = 2 lambda1 phi^2 - c_ns h (route b,
// returned) and by direct elementwise quadrature of the defining integral with
// the closed-form exterior tail (route a, kept as the consistency oracle).
struct HComputation {
    FieldFunction h;             // route (b)
    FieldFunction h_quadrature;  // route (a)
    double max_rel_diff_interior = 0.0;  // over |x| <= 0.9 * half_width
};
HComputation compute_h(const DiscreteFracLap& op, const Eigenpair& eig);

// lambda^alpha1 * phi1^2 with alpha1 strictly inside (1, 1/(1-q)).
FieldFunction subsolution(const Eigenpair& eig, double lambda, double alpha1, double q);

// max_i [ (A u_)_i - lambda (u_^q - 1) ]; the certificate passes iff <= 0.
double certify_subsolution(const DiscreteFracLap& op, const FieldFunction& u_under,
                           double lambda, double q);

struct ThresholdSearch {
    double lambda_star = 0.0;    // least certified lambda found (to rel tol)
    double margin_at_star = 0.0;
    double lambda_below = 0.0;   // certification fails here
    double margin_below = 0.0;
    double lambda_ordered = 0.0; // least lambda >= lambda_star with u_ <= z_lambda
    bool ordering_at_star = false;
    std::vector<std::pair<double, double>> margin_trace;  // (lambda, margin)
};

// Geometric scan + bisection for the least lambda whose subsolution
// certificate passes, then the least lambda at which u_ <= z_lambda holds.
ThresholdSearch subsolution_threshold(const DiscreteFracLap& op, const Eigenpair& eig, double q,
                                      double alpha1, double tol, double cap = 1e8);

struct BarrierSet {
    double lambda = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    FieldFunction u_under;
    FieldFunction z_super;
    FieldFunction psi_super;  // lambda^alpha2 * psi
    double sub_margin = 0.0;    // max_i[(A u_)_i - rhs(u_)]; pass iff <= 0
    double super_margin = 0.0;  // min_i[(A ub)_i - rhs(ub)]; pass iff >= 0
    bool ordering_ok = false;   // u_under <= z_super pointwise
};

// Builds and certifies all three barriers at the given (lambda, mu).
BarrierSet make_barrier_set(const DiscreteFracLap& op, const Eigenpair& eig, double lambda,
                            double mu, double q, double r, double alpha1, double alpha2,
                            double tol);

// CSV columns: x, phi1, h, u_under, z_super, psi.
void write_barriers_csv(const std::string& path, const Grid& grid, const FieldFunction& phi1,
                        const FieldFunction& h, const FieldFunction& u_under,
                        const FieldFunction& z_super, const FieldFunction& psi);

}  // namespace fracsemi
