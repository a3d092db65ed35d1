#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracsemi/fraclap.hpp"
#include "fracsemi/grid.hpp"
#include "fracsemi/semipositone.hpp"

namespace fracsemi {

// The nonlinearities of the cut-off problem. Below the frozen subsolution
// u_ the right-hand side is frozen at the u_ values, so every critical point
// of the associated energy sits above u_ and solves the original problem.
//
//   f(x,t) = u_(x)^r    for t <= u_(x),   t^r      above
//   g(x,t) = u_(x)^q - 1 for t <= u_(x),  t^q - 1  above
//
// with primitives F, G continuous across the knot. Both are defined for all
// real t via the lower branch.
struct CutoffNonlinearity {
    double lambda = 0.0;  // >= 0 (0 only makes sense for gradient diagnostics)
    double mu = 0.0;      // >= 0
    double q = 0.0;       // in (0,1)
    double r = 0.0;       // in (1, crit_exp - 1]
    double s = 0.0;       // in (0, 1/2)
    double crit_exp = 0.0;  // 2/(1-2s), the critical exponent for N = 1
    FieldFunction u_under;
    double growth_c = 0.0;
    double growth_cprime = 0.0;

    bool critical() const { return r >= crit_exp - 1.0 - 1e-12; }
};

CutoffNonlinearity make_cutoff(double lambda, double mu, double q, double r, double s,
                               FieldFunction u_under);

enum class CutoffKind { f, g, F, G };

// Pointwise branch formulas; node is 1-based.
double cutoff_eval(const CutoffNonlinearity& nl, int node, double t, CutoffKind kind);

// Constants (c, c') for which |F(x,t)| <= c + c'|t| + |t|^{r+1}/(r+1) and the
// G analogue hold for all t at every node:
//   c' = max(M^r, M^q + 1, 1),  c = max(r/(r+1) M^{r+1}, q/(q+1) M^{q+1})
// with M the sup of u_.
std::pair<double, double> growth_constants(double q, double r, double u_under_max);

// I_mu(u) = 1/2 h u'Au - mu h sum F(x_i,u_i) - lambda h sum G(x_i,u_i).
// Returns +inf when u is large enough to overflow the powers.
double energy(const CutoffNonlinearity& nl, const DiscreteFracLap& op, const FieldFunction& u);

// grad_i = h [ (Au)_i - mu f(x_i,u_i) - lambda g(x_i,u_i) ]; the exact
// gradient of energy().
FieldFunction energy_gradient(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                              const FieldFunction& u);

struct ThresholdReport {
    double rho = 0.0;
    double mu_lambda = 0.0;
    double mu0_critical = 0.0;
    double embed_1 = 0.0;
    double embed_q1 = 0.0;
    double embed_r1 = 0.0;
    double embed_crit = 0.0;
    double boundary_inf_bound = 0.0;  // at mu = nl.mu; positive certifies the sphere barrier
};

// Certified lower bound of I_mu on the sphere ||u||_A = rho, via the grid's
// embedding constants. Exposed for tests and the threshold report.
double sphere_lower_bound(const CutoffNonlinearity& nl, double abs_domain, double rho, double mu,
                          const ThresholdReport& embeds);

// Picks rho on a geometric ladder so the mu-free part of the sphere bound
// keeps a 10% positivity margin, then the largest mu (bisection) with a
// positive full bound, and evaluates the critical-case mu0 formula
// crit/(4 S^crit (2 rho)^(crit-2)) with S the critical embedding constant.
ThresholdReport choose_rho_mu(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                              unsigned seed = 1234, double rho_cap = 1e12);

// Same, reusing already-computed embedding constants (they depend on the grid
// only, so ladders over lambda can share them).
ThresholdReport choose_rho_mu_with_embeddings(const CutoffNonlinearity& nl, double abs_domain,
                                              const ThresholdReport& embeddings,
                                              double rho_cap = 1e12);

// Projected gradient descent in the A-norm ball of radius rho (projection =
// rescaling, exact in the induced metric), Armijo line search, three starts,
// then a fixed-point polish once the iterate is interior and above u_.
// Returns the lowest-energy converged point.
SolveReport minimize_in_ball(const CutoffNonlinearity& nl, const DiscreteFracLap& op, double rho,
                             double tol, unsigned seed = 1234, int max_iter = 50000);

struct MountainPassResult {
    SolveReport report;            // classification mountain-pass, energy = m_mu
    double t0 = 0.0;               // ray endpoint scale
    int sweeps = 0;
    double separation = 0.0;       // ||u~ - u0||_inf
    bool merged = false;           // separation below the declared threshold
    std::vector<double> level_trace;  // reported m_mu after each sweep (nonincreasing)
};

class MountainPassError : public std::runtime_error {
public:
    MountainPassError(const std::string& what, std::vector<double> path_energies)
        : std::runtime_error(what), path_energies(std::move(path_energies)) {}
    std::vector<double> path_energies;
};

// Mountain-pass search between 0 and t0*phi1: deformation of a discrete path
// (steepest descent at the running argmax with local reparametrization),
// followed by a damped Newton polish of the saddle. Subcritical only.
MountainPassResult mountain_pass(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                                 const FieldFunction& phi1, const FieldFunction& u0, double rho,
                                 double tol, int path_points = 32, int max_sweeps = 10000);

struct CheckReport {
    double uncut_residual_inf = 0.0;
    double cutoff_residual_inf = 0.0;
    double min_value = 0.0;
    bool ordering_ok = false;  // u >= u_ - eps with eps = 1e-8 ||u_||_inf
    std::optional<double> decay_exponent;
    double energy = 0.0;
    bool positive = false;
};

CheckReport verify_solution(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                            const FieldFunction& u);

}  // namespace fracsemi
