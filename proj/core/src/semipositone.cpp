#include "fracsemi/semipositone.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fracsemi/barriers.hpp"
#include "fracsemi/spectral.hpp"

namespace fracsemi {

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::monotone_limit: return "monotone-limit";
        case Classification::minimizer: return "minimizer";
        case Classification::mountain_pass: return "mountain-pass";
    }
    return "unknown";
}

namespace {

double pow_cut(double t, double e) { return t > 0.0 ? std::pow(t, e) : 0.0; }

// residual of the equation with the zero extension of t^q, t^r for t < 0;
// coincides with the uncut equation wherever u > 0
double residual_inf_uncut(const DiscreteFracLap& op, const FieldFunction& u, double lambda,
                          double mu, double q, double r) {
    FieldFunction au = apply(op, u);
    double res = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double rhs = lambda * (pow_cut(u[i], q) - 1.0) + mu * pow_cut(u[i], r);
        res = std::max(res, std::abs(au[i] - rhs));
    }
    return res;
}

}  // namespace

SolveReport monotone_iterate(const DiscreteFracLap& op, double lambda, double mu, double q,
                             double r, const FieldFunction* lower, const FieldFunction* upper,
                             Direction direction, double tol, int max_iter, double shift) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("monotone_iterate: q must lie in (0,1)");
    if (mu < 0.0) throw std::domain_error("monotone_iterate: mu must be nonnegative");
    if (shift < 0.0) throw std::domain_error("monotone_iterate: shift must be nonnegative");
    if (!(tol > 0.0)) throw std::domain_error("monotone_iterate: tol must be positive");

    const FieldFunction* start = direction == Direction::ascend ? lower : upper;
    if (!start) {
        throw ConfigError("monotone_iterate: ascend needs a lower barrier, descend an upper one");
    }
    require_same_grid(op.grid, start->grid, "monotone_iterate");

    if (direction == Direction::ascend) {
        if (!upper) throw ConfigError("monotone_iterate: ascend needs an upper barrier as well");
        for (int i = 0; i < start->size(); ++i) {
            if ((*lower)[i] > (*upper)[i]) {
                throw ConfigError("monotone_iterate: barriers not ordered at node " +
                                  std::to_string(i + 1));
            }
        }
        // cheap certificate check: the lower start must actually be a subsolution
        FieldFunction al = apply(op, *lower);
        for (int i = 0; i < lower->size(); ++i) {
            const double rhs = lambda * (pow_cut((*lower)[i], q) - 1.0) + mu * pow_cut((*lower)[i], r);
            if (al[i] > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) {
                throw ConfigError("monotone_iterate: lower barrier is not a subsolution (node " +
                                  std::to_string(i + 1) + ")");
            }
        }
    }

    const int n = op.grid.n;
    const double cg_tol = 1e-14;
    FieldFunction u = *start;
    FieldFunction rhs = make_field(op.grid);

    SolveReport rep;
    rep.classification = Classification::monotone_limit;
    rep.tol = tol;

    for (int it = 1; it <= max_iter; ++it) {
        for (int i = 0; i < n; ++i) {
            rhs[i] = lambda * (pow_cut(u[i], q) - 1.0) + mu * pow_cut(u[i], r) + shift * u[i];
        }
        FieldFunction un = solve_linear(op, shift, rhs, cg_tol, 200000, &u);

        const double slack = 1e-12 * std::max(1.0, sup_norm(u));
        double step = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = un[i] - u[i];
            if (direction == Direction::ascend ? (d < -slack) : (d > slack)) {
                throw ConsistencyError(
                    std::string("monotone_iterate: ") +
                    (direction == Direction::ascend ? "ascending" : "descending") +
                    " iterate moved the wrong way at node " + std::to_string(i + 1) +
                    " by " + std::to_string(std::abs(d)) + " (discretization fault)");
            }
            step = std::max(step, std::abs(d));
        }
        u = un;
        rep.iterations = it;
        // both gates required: small step and small equation residual
        if (step < tol) {
            const double res = residual_inf_uncut(op, u, lambda, mu, q, r);
            if (res <= tol) {
                rep.converged = true;
                rep.residual_inf = res;
                break;
            }
        }
    }
    if (!rep.converged) {
        rep.residual_inf = residual_inf_uncut(op, u, lambda, mu, q, r);
    }

    rep.solution = u;
    rep.min_value = min_value(u);
    rep.ordering_ok = rep.min_value > 0.0;
    if (lower && rep.ordering_ok) {
        const double eps = 1e-9 * std::max(1.0, sup_norm(*lower));
        for (int i = 0; i < n; ++i) {
            if (u[i] < (*lower)[i] - eps) {
                rep.ordering_ok = false;
                break;
            }
        }
    }
    if (upper && rep.ordering_ok && direction == Direction::ascend) {
        const double eps = 1e-9 * std::max(1.0, sup_norm(*upper));
        for (int i = 0; i < n; ++i) {
            if (u[i] > (*upper)[i] + eps) {
                rep.ordering_ok = false;
                break;
            }
        }
    }
    if (rep.min_value > 0.0) {
        try {
            rep.decay_exponent = boundary_decay_exponent(u);
        } catch (const std::exception&) {
            // window unusable on this grid; leave the exponent absent
        }
    }
    return rep;
}

std::pair<FieldFunction, double> supersolution_mu(const DiscreteFracLap& op, double lambda,
                                                  double mu, double q, double r, double alpha2,
                                                  const FieldFunction& psi) {
    if (!(alpha2 > 1.0 / (1.0 - q))) {
        throw ConfigError("supersolution_mu: alpha2 must exceed 1/(1-q) = " +
                          std::to_string(1.0 / (1.0 - q)));
    }
    require_same_grid(op.grid, psi.grid, "supersolution_mu");
    FieldFunction ub = psi;
    const double scale = std::pow(lambda, alpha2);
    for (int i = 0; i < ub.size(); ++i) ub[i] *= scale;

    FieldFunction au = apply(op, ub);
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ub.size(); ++i) {
        const double v =
            au[i] - lambda * (std::pow(ub[i], q) - 1.0) - mu * std::pow(ub[i], r);
        margin = std::min(margin, v);
    }
    return {std::move(ub), margin};
}

Lambda0Bracket estimate_lambda0(const DiscreteFracLap& op, double q, double rel_tol,
                                double detector_tol, double lambda_start, double cap) {
    if (!(rel_tol > 0.0)) throw std::domain_error("estimate_lambda0: rel_tol must be positive");

    // z_1 once; z_lambda follows from the exact discrete scaling
    FieldFunction z1 = solve_sublinear(op, 1.0, q, std::min(detector_tol, 1e-11));
    Lambda0Bracket out;

    auto detector = [&](double lam) {
        FieldFunction z = z1;
        const double zs = std::pow(lam, 1.0 / (1.0 - q));
        for (int i = 0; i < z.size(); ++i) z[i] *= zs;
        // mu = 0, so the r exponent is inert here
        SolveReport rep = monotone_iterate(op, lam, 0.0, q, 2.0, nullptr, &z,
                                           Direction::descend, detector_tol, 100000);
        const bool ok = rep.converged && rep.min_value > 0.0;
        out.trace.emplace_back(lam, ok);
        return ok;
    };

    double lam = lambda_start;
    if (detector(lam)) {
        throw SearchError("estimate_lambda0: detector already true at the initial bracket " +
                          std::to_string(lam) + "; lambda0 lies below the search range");
    }
    double lo = lam, hi = 0.0;
    while (lam < cap) {
        lam *= 2.0;
        if (detector(lam)) {
            hi = lam;
            break;
        }
        lo = lam;
    }
    if (hi == 0.0) {
        throw SearchError("estimate_lambda0: detector false up to the cap " + std::to_string(cap));
    }
    while ((hi - lo) / hi > rel_tol) {
        const double mid = 0.5 * (lo + hi);
        if (detector(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // re-verify the endpoints for the report
    out.detector_lo = detector(lo);
    out.detector_hi = detector(hi);
    out.lambda_lo = lo;
    out.lambda_hi = hi;
    if (out.detector_lo || !out.detector_hi) {
        throw ConsistencyError("estimate_lambda0: endpoint re-verification disagrees with the "
                               "bisection history");
    }
    return out;
}

}  // namespace fracsemi
