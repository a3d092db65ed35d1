#include "fracsemi/variational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fracsemi/spectral.hpp"

namespace fracsemi {

namespace {

constexpr double kOverflowGuard = 1e100;

double pow_cut(double t, double e) { return t > 0.0 ? std::pow(t, e) : 0.0; }

}  // namespace

CutoffNonlinearity make_cutoff(double lambda, double mu, double q, double r, double s,
                               FieldFunction u_under) {
    if (!(s > 0.0 && s < 0.5)) {
        throw ConfigError("make_cutoff: the variational machinery needs s in (0, 1/2), got s=" +
                          std::to_string(s));
    }
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("make_cutoff: q must lie in (0,1)");
    const double crit = 2.0 / (1.0 - 2.0 * s);
    if (!(r > 1.0 && r <= crit - 1.0 + 1e-12)) {
        throw ConfigError("make_cutoff: r must lie in (1, " + std::to_string(crit - 1.0) +
                          "] for s=" + std::to_string(s) + " (r=" + std::to_string(r) +
                          " is supercritical)");
    }
    if (lambda < 0.0 || mu < 0.0) throw ConfigError("make_cutoff: lambda, mu must be >= 0");
    for (int i = 0; i < u_under.size(); ++i) {
        if (!(u_under[i] > 0.0)) {
            throw ConfigError("make_cutoff: u_under must be strictly positive (node " +
                              std::to_string(i + 1) + ")");
        }
    }
    CutoffNonlinearity nl;
    nl.lambda = lambda;
    nl.mu = mu;
    nl.q = q;
    nl.r = r;
    nl.s = s;
    nl.crit_exp = crit;
    nl.u_under = std::move(u_under);
    const auto [c, cp] = growth_constants(q, r, max_value(nl.u_under));
    nl.growth_c = c;
    nl.growth_cprime = cp;
    return nl;
}

double cutoff_eval(const CutoffNonlinearity& nl, int node, double t, CutoffKind kind) {
    const double ub = nl.u_under[node - 1];
    const double q = nl.q, r = nl.r;
    switch (kind) {
        case CutoffKind::f:
            return t <= ub ? std::pow(ub, r) : std::pow(t, r);
        case CutoffKind::g:
            return t <= ub ? std::pow(ub, q) - 1.0 : std::pow(t, q) - 1.0;
        case CutoffKind::F:
            if (t <= ub) return std::pow(ub, r) * t;
            return std::pow(t, r + 1.0) / (r + 1.0) + r / (r + 1.0) * std::pow(ub, r + 1.0);
        case CutoffKind::G:
            if (t <= ub) return (std::pow(ub, q) - 1.0) * t;
            return std::pow(t, q + 1.0) / (q + 1.0) - t + q / (q + 1.0) * std::pow(ub, q + 1.0);
    }
    return 0.0;
}

std::pair<double, double> growth_constants(double q, double r, double u_under_max) {
    const double m = u_under_max;
    const double cp = std::max({std::pow(m, r), std::pow(m, q) + 1.0, 1.0});
    const double c =
        std::max(r / (r + 1.0) * std::pow(m, r + 1.0), q / (q + 1.0) * std::pow(m, q + 1.0));
    return {c, cp};
}

double energy(const CutoffNonlinearity& nl, const DiscreteFracLap& op, const FieldFunction& u) {
    require_same_grid(op.grid, u.grid, "energy");
    require_same_grid(nl.u_under.grid, u.grid, "energy");
    if (sup_norm(u) > kOverflowGuard) return std::numeric_limits<double>::infinity();
    const double h = op.grid.h;
    double sf = 0.0, sg = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        sf += cutoff_eval(nl, i + 1, u[i], CutoffKind::F);
        sg += cutoff_eval(nl, i + 1, u[i], CutoffKind::G);
    }
    return 0.5 * quadratic_form(op, u, u) - nl.mu * h * sf - nl.lambda * h * sg;
}

FieldFunction energy_gradient(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                              const FieldFunction& u) {
    require_same_grid(op.grid, u.grid, "energy_gradient");
    require_same_grid(nl.u_under.grid, u.grid, "energy_gradient");
    const double h = op.grid.h;
    FieldFunction g = apply(op, u);
    for (int i = 0; i < u.size(); ++i) {
        g[i] = h * (g[i] - nl.mu * cutoff_eval(nl, i + 1, u[i], CutoffKind::f) -
                    nl.lambda * cutoff_eval(nl, i + 1, u[i], CutoffKind::g));
    }
    return g;
}

double sphere_lower_bound(const CutoffNonlinearity& nl, double abs_domain, double rho, double mu,
                          const ThresholdReport& e) {
    const double lam = nl.lambda;
    return 0.5 * rho * rho - (lam + mu) * nl.growth_c * abs_domain -
           (lam + mu) * nl.growth_cprime * e.embed_1 * rho -
           lam * std::pow(e.embed_q1 * rho, nl.q + 1.0) -
           mu * std::pow(e.embed_r1 * rho, nl.r + 1.0);
}

ThresholdReport choose_rho_mu(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                              unsigned seed, double rho_cap) {
    ThresholdReport embeds;
    embeds.embed_1 = embedding_constant(op, 1.0, 1e-13, seed);
    embeds.embed_q1 = embedding_constant(op, nl.q + 1.0, 1e-13, seed + 1);
    embeds.embed_r1 = embedding_constant(op, nl.r + 1.0, 1e-13, seed + 2);
    embeds.embed_crit = embedding_constant(op, nl.crit_exp, 1e-13, seed + 3);
    return choose_rho_mu_with_embeddings(nl, op.grid.length(), embeds, rho_cap);
}

ThresholdReport choose_rho_mu_with_embeddings(const CutoffNonlinearity& nl, double abs_domain,
                                              const ThresholdReport& embeddings,
                                              double rho_cap) {
    ThresholdReport rep = embeddings;
    const double lam = nl.lambda;

    // mu-free part of the sphere bound with a 10% positivity margin
    auto lambda_part = [&](double rho) {
        return 0.5 * rho * rho - lam * nl.growth_c * abs_domain -
               lam * nl.growth_cprime * rep.embed_1 * rho -
               lam * std::pow(rep.embed_q1 * rho, nl.q + 1.0);
    };
    double rho = 1.0;
    while (rho < rho_cap && lambda_part(rho) < 0.1 * 0.5 * rho * rho) rho *= 1.25;
    if (rho >= rho_cap) {
        throw SearchError("choose_rho_mu: no radius below the cap keeps the sphere bound "
                          "positive; lambda too large for this grid's constants",
                          {{rho_cap, lambda_part(rho_cap)}});
    }
    rep.rho = rho;

    // largest mu keeping the full bound positive (the bound is affine in mu,
    // but a bisection keeps this robust to formula changes)
    auto bound = [&](double mu) { return sphere_lower_bound(nl, abs_domain, rho, mu, rep); };
    double mu_hi = 1.0;
    while (bound(mu_hi) > 0.0 && mu_hi < 1e30) mu_hi *= 2.0;
    double mu_lo = 0.0;
    for (int it = 0; it < 200 && (mu_hi - mu_lo) > 1e-12 * mu_hi; ++it) {
        const double mid = 0.5 * (mu_lo + mu_hi);
        if (bound(mid) > 0.0) {
            mu_lo = mid;
        } else {
            mu_hi = mid;
        }
    }
    rep.mu_lambda = mu_lo;

    const double crit = nl.crit_exp;
    rep.mu0_critical =
        crit / (4.0 * std::pow(rep.embed_crit, crit) * std::pow(2.0 * rho, crit - 2.0));
    rep.boundary_inf_bound = bound(nl.mu);
    return rep;
}

namespace {

double a_norm_cached(const DiscreteFracLap& op, const FieldFunction& u) { return a_norm(op, u); }

FieldFunction project_ball(const DiscreteFracLap& op, const FieldFunction& u, double rho) {
    const double an = a_norm_cached(op, u);
    if (an <= rho) return u;
    FieldFunction v = u;
    const double sc = rho / an;
    for (int i = 0; i < v.size(); ++i) v[i] *= sc;
    return v;
}

// Fixed-point polish u <- A^{-1}(lambda g + mu f): contractive near the stable
// critical point, drives the algebraic residual to solver accuracy. Returns
// true if it reached grad tol without leaving the ball or increasing energy.
bool fixed_point_polish(const CutoffNonlinearity& nl, const DiscreteFracLap& op, double rho,
                        double tol, FieldFunction& u, int max_polish = 400) {
    const int n = u.size();
    FieldFunction rhs = make_field(op.grid);
    FieldFunction cur = u;
    double best_grad = sup_norm(energy_gradient(nl, op, cur));
    FieldFunction best = cur;
    for (int it = 0; it < max_polish; ++it) {
        for (int i = 0; i < n; ++i) {
            rhs[i] = nl.lambda * cutoff_eval(nl, i + 1, cur[i], CutoffKind::g) +
                     nl.mu * cutoff_eval(nl, i + 1, cur[i], CutoffKind::f);
        }
        FieldFunction nxt = solve_linear(op, 0.0, rhs, 1e-14, 200000, &cur);
        const double gn = sup_norm(energy_gradient(nl, op, nxt));
        if (gn < best_grad && a_norm_cached(op, nxt) <= rho) {
            best = nxt;
            best_grad = gn;
        }
        if (gn > 10.0 * best_grad) break;  // diverging (e.g. near an unstable point)
        cur = nxt;
        if (gn < tol) break;
    }
    if (best_grad < sup_norm(energy_gradient(nl, op, u))) {
        u = best;
    }
    return best_grad < tol;
}

}  // namespace

SolveReport minimize_in_ball(const CutoffNonlinearity& nl, const DiscreteFracLap& op, double rho,
                             double tol, unsigned seed, int max_iter) {
    require_same_grid(op.grid, nl.u_under.grid, "minimize_in_ball");
    if (!(rho > 0.0)) throw std::domain_error("minimize_in_ball: rho must be positive");
    if (!(tol > 0.0)) throw std::domain_error("minimize_in_ball: tol must be positive");

    const int n = op.grid.n;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<FieldFunction> starts;
    {
        FieldFunction a = nl.u_under;
        for (int i = 0; i < n; ++i) a[i] *= 0.1;  // small multiple of u_
        starts.push_back(std::move(a));

        FieldFunction b = make_field(op.grid);
        for (int i = 0; i < n; ++i) b[i] = 0.01 * gauss(rng);
        starts.push_back(std::move(b));

        // 0.5 rho along phi1: sqrt(u_) is exactly the phi1 direction since
        // u_ = lambda^alpha1 phi1^2
        FieldFunction c = nl.u_under;
        for (int i = 0; i < n; ++i) c[i] = std::sqrt(std::max(c[i], 0.0));
        const double an = a_norm_cached(op, c);
        for (int i = 0; i < n; ++i) c[i] *= 0.5 * rho / an;
        starts.push_back(std::move(c));
    }

    SolveReport best;
    bool have_best = false;

    for (const FieldFunction& s0 : starts) {
        FieldFunction u = project_ball(op, s0, rho);
        double e = energy(nl, op, u);
        double alpha = 1.0;
        int it = 0;
        bool stalled = false;
        for (; it < max_iter; ++it) {
            FieldFunction g = energy_gradient(nl, op, u);
            const double gn = sup_norm(g);
            const bool interior = a_norm_cached(op, u) < rho * (1.0 - 1e-12);
            if (gn < tol && interior) break;

            double a = alpha;
            bool moved = false;
            FieldFunction v = u;
            double ev = e;
            for (int bt = 0; bt < 70; ++bt) {
                FieldFunction w = u;
                for (int i = 0; i < n; ++i) w[i] -= a * g[i];
                w = project_ball(op, w, rho);
                const double ew = energy(nl, op, w);
                double decrease = 0.0;
                for (int i = 0; i < n; ++i) decrease += g[i] * (u[i] - w[i]);
                if (ew <= e - 1e-4 * decrease && ew < e) {
                    v = std::move(w);
                    ev = ew;
                    moved = true;
                    break;
                }
                a *= 0.5;
            }
            if (!moved) {
                stalled = true;  // energy comparisons hit the fp floor
                break;
            }
            u = std::move(v);
            e = ev;
            alpha = std::min(a * 2.0, 1e8);
        }

        // polish: once the iterate is interior, the stable critical point is a
        // contraction fixed point and the linear solver finishes the job
        double gn = sup_norm(energy_gradient(nl, op, u));
        if (gn >= tol || stalled) {
            fixed_point_polish(nl, op, rho, tol, u);
            gn = sup_norm(energy_gradient(nl, op, u));
        }

        SolveReport rep;
        rep.solution = u;
        rep.energy = energy(nl, op, u);
        rep.tol = tol;
        rep.iterations = it;
        const bool interior = a_norm_cached(op, u) < rho * (1.0 - 1e-12);
        rep.converged = gn < tol && interior;
        rep.classification = Classification::minimizer;
        rep.min_value = min_value(u);
        {
            FieldFunction au = apply(op, u);
            double res = 0.0;
            for (int i = 0; i < n; ++i) {
                const double rhs = nl.lambda * (pow_cut(u[i], nl.q) - 1.0) +
                                   nl.mu * pow_cut(u[i], nl.r);
                res = std::max(res, std::abs(au[i] - rhs));
            }
            rep.residual_inf = res;
        }
        const double eps = 1e-8 * sup_norm(nl.u_under);
        rep.ordering_ok = true;
        for (int i = 0; i < n; ++i) {
            if (u[i] < nl.u_under[i] - eps) {
                rep.ordering_ok = false;
                break;
            }
        }
        if (rep.min_value > 0.0) {
            try {
                rep.decay_exponent = boundary_decay_exponent(u);
            } catch (const std::exception&) {
            }
        }

        if (rep.converged && (!have_best || !best.converged ||
                              *rep.energy < *best.energy)) {
            best = std::move(rep);
            have_best = true;
        } else if (!have_best) {
            best = std::move(rep);
        }
    }

    if (!best.converged) {
        throw ConvergenceError("minimize_in_ball: no start converged to gradient tol " +
                                   std::to_string(tol),
                               best.solution.values, best.residual_inf, best.iterations);
    }
    return best;
}

namespace {

FieldFunction newton_saddle_polish(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                                   const FieldFunction& start, double tol, bool& ok,
                                   int max_newton = 60) {
    const int n = op.grid.n;
    const double h = op.grid.h;

    // dense operator matrix for the Jacobian solves
    Eigen::MatrixXd a_dense(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a_dense(i, j) = (i == j) ? op.diag[static_cast<size_t>(i)]
                                     : -op.weights[static_cast<size_t>(std::abs(i - j) - 1)];
        }
    }

    FieldFunction u = start;
    ok = false;
    double gn_prev = sup_norm(energy_gradient(nl, op, u));
    for (int it = 0; it < max_newton; ++it) {
        FieldFunction g = energy_gradient(nl, op, u);
        const double gn = sup_norm(g);
        if (gn < tol) {
            ok = true;
            return u;
        }
        Eigen::MatrixXd jac = a_dense;
        for (int i = 0; i < n; ++i) {
            const double ub = nl.u_under[i];
            double d = 0.0;
            if (u[i] > ub) {
                d = nl.lambda * nl.q * std::pow(u[i], nl.q - 1.0) +
                    nl.mu * nl.r * std::pow(u[i], nl.r - 1.0);
            }
            jac(i, i) -= d;
        }
        jac *= h;
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) rhs(i) = g[i];
        Eigen::VectorXd step = jac.partialPivLu().solve(rhs);

        // damping on the gradient norm (energy is useless at a saddle)
        double a = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            FieldFunction v = u;
            for (int i = 0; i < n; ++i) v[i] -= a * step(i);
            const double gv = sup_norm(energy_gradient(nl, op, v));
            if (gv < gn) {
                u = std::move(v);
                moved = true;
                break;
            }
            a *= 0.5;
        }
        if (!moved) return u;
        gn_prev = gn;
    }
    (void)gn_prev;
    ok = sup_norm(energy_gradient(nl, op, u)) < tol;
    return u;
}

}  // namespace

MountainPassResult mountain_pass(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                                 const FieldFunction& phi1, const FieldFunction& u0, double rho,
                                 double tol, int path_points, int max_sweeps) {
    require_same_grid(op.grid, phi1.grid, "mountain_pass");
    require_same_grid(op.grid, u0.grid, "mountain_pass");
    if (nl.critical()) {
        throw ConfigError("mountain_pass: r = crit_exp - 1 is the critical case; only the "
                          "minimizer is available there");
    }
    if (!(nl.mu > 0.0)) {
        throw ConfigError("mountain_pass: needs mu > 0 (the energy is coercive along phi1 "
                          "otherwise and no admissible t0 exists)");
    }
    if (path_points < 4) throw std::domain_error("mountain_pass: need at least 4 path points");

    const int n = op.grid.n;

    // smallest dyadic t0 with ||t0 phi1||_A > rho and I(t0 phi1) < 0
    double t0 = 1.0;
    auto ray_at = [&](double t) {
        FieldFunction v = phi1;
        for (int i = 0; i < n; ++i) v[i] *= t;
        return v;
    };
    const double phi_an = a_norm(op, phi1);
    int guard = 0;
    while (guard++ < 2000) {
        if (t0 * phi_an > rho && energy(nl, op, ray_at(t0)) < 0.0) break;
        t0 *= 2.0;
        if (t0 > 1e280) {
            throw MountainPassError("mountain_pass: no admissible t0 below overflow", {});
        }
    }

    const int np = path_points;  // points including both endpoints
    std::vector<FieldFunction> path;
    std::vector<double> en(static_cast<size_t>(np));
    path.reserve(static_cast<size_t>(np));
    for (int j = 0; j < np; ++j) {
        const double t = t0 * static_cast<double>(j) / static_cast<double>(np - 1);
        path.push_back(ray_at(t));
        en[static_cast<size_t>(j)] = energy(nl, op, path.back());
    }

    MountainPassResult out;
    out.t0 = t0;

    auto argmax = [&]() {
        int j = 0;
        for (int k = 1; k < np; ++k) {
            if (en[static_cast<size_t>(k)] > en[static_cast<size_t>(j)]) j = k;
        }
        return j;
    };

    double reported = -std::numeric_limits<double>::infinity();
    {
        double cur = -std::numeric_limits<double>::infinity();
        for (int k = 1; k < np - 1; ++k) cur = std::max(cur, en[static_cast<size_t>(k)]);
        reported = cur;
    }

    int sweep = 0;
    bool gate = false;
    double stall_ref = reported;
    for (; sweep < max_sweeps; ++sweep) {
        const int j = argmax();
        if (j == 0 || j == np - 1) {
            throw MountainPassError("mountain_pass: path max drifted to an endpoint", en);
        }
        FieldFunction g = energy_gradient(nl, op, path[static_cast<size_t>(j)]);
        const double gn = sup_norm(g);
        if (gn < tol) break;

        // step length capped by the local segment so the discrete path stays a path
        double seg = std::numeric_limits<double>::infinity();
        {
            FieldFunction d1 = path[static_cast<size_t>(j)];
            for (int i = 0; i < n; ++i) d1[i] -= path[static_cast<size_t>(j - 1)][i];
            FieldFunction d2 = path[static_cast<size_t>(j + 1)];
            for (int i = 0; i < n; ++i) d2[i] -= path[static_cast<size_t>(j)][i];
            seg = std::min(a_norm(op, d1), a_norm(op, d2));
        }
        const double g_an = a_norm(op, g);
        double a = g_an > 0.0 ? 0.25 * seg / g_an : 0.0;
        const double e0 = en[static_cast<size_t>(j)];
        bool moved = false;
        for (int bt = 0; bt < 60 && a > 0.0; ++bt) {
            FieldFunction v = path[static_cast<size_t>(j)];
            for (int i = 0; i < n; ++i) v[i] -= a * g[i];
            const double ev = energy(nl, op, v);
            double decrease = 0.0;
            for (int i = 0; i < n; ++i) decrease += g[i] * g[i];
            if (ev < e0 - 1e-4 * a * decrease) {
                path[static_cast<size_t>(j)] = std::move(v);
                en[static_cast<size_t>(j)] = ev;
                moved = true;
                break;
            }
            a *= 0.5;
        }
        if (!moved) {
            gate = true;  // descent at the max hit the fp floor; hand over to Newton
        }

        // local reparametrization: tie the neighbors to the moved point
        for (int jj : {j - 1, j + 1}) {
            if (jj <= 0 || jj >= np - 1) continue;
            FieldFunction mid = path[static_cast<size_t>(jj - 1)];
            for (int i = 0; i < n; ++i) {
                mid[i] = 0.5 * (path[static_cast<size_t>(jj - 1)][i] +
                                path[static_cast<size_t>(jj + 1)][i]);
            }
            path[static_cast<size_t>(jj)] = std::move(mid);
            en[static_cast<size_t>(jj)] =
                energy(nl, op, path[static_cast<size_t>(jj)]);
        }

        double cur = -std::numeric_limits<double>::infinity();
        for (int k = 1; k < np - 1; ++k) cur = std::max(cur, en[static_cast<size_t>(k)]);
        reported = std::min(reported, cur);
        out.level_trace.push_back(reported);

        // stall detection hands the localized saddle to Newton
        if (sweep % 100 == 99) {
            if (reported > stall_ref - std::abs(stall_ref) * 1e-6) gate = true;
            stall_ref = reported;
        }
        if (gate) break;
    }
    out.sweeps = sweep;

    const int j = argmax();
    if (j == 0 || j == np - 1) {
        throw MountainPassError("mountain_pass: path max drifted to an endpoint", en);
    }
    bool newton_ok = false;
    FieldFunction ut = newton_saddle_polish(nl, op, path[static_cast<size_t>(j)], tol, newton_ok);
    if (!newton_ok) {
        throw MountainPassError("mountain_pass: gradient stagnation above tol (argmax grad " +
                                    std::to_string(sup_norm(energy_gradient(nl, op, ut))) + ")",
                                en);
    }

    SolveReport rep;
    rep.solution = ut;
    rep.energy = energy(nl, op, ut);
    rep.tol = tol;
    rep.iterations = sweep;
    rep.converged = true;
    rep.classification = Classification::mountain_pass;
    rep.min_value = min_value(ut);
    {
        FieldFunction au = apply(op, ut);
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            const double rhs =
                nl.lambda * (pow_cut(ut[i], nl.q) - 1.0) + nl.mu * pow_cut(ut[i], nl.r);
            res = std::max(res, std::abs(au[i] - rhs));
        }
        rep.residual_inf = res;
    }
    const double eps = 1e-8 * sup_norm(nl.u_under);
    rep.ordering_ok = true;
    for (int i = 0; i < n; ++i) {
        if (ut[i] < nl.u_under[i] - eps) {
            rep.ordering_ok = false;
            break;
        }
    }
    if (rep.min_value > 0.0) {
        try {
            rep.decay_exponent = boundary_decay_exponent(ut);
        } catch (const std::exception&) {
        }
    }

    double sep = 0.0;
    for (int i = 0; i < n; ++i) sep = std::max(sep, std::abs(ut[i] - u0[i]));
    out.separation = sep;
    const double sep_min = 1e-3 * std::max(sup_norm(u0), 1.0);
    out.merged = sep <= sep_min;

    if (*rep.energy <= 0.0) {
        throw MountainPassError("mountain_pass: polished point has nonpositive level " +
                                    std::to_string(*rep.energy) +
                                    " (descended into a basin, no saddle certificate)",
                                en);
    }
    out.report = std::move(rep);
    return out;
}

CheckReport verify_solution(const CutoffNonlinearity& nl, const DiscreteFracLap& op,
                            const FieldFunction& u) {
    require_same_grid(op.grid, u.grid, "verify_solution");
    const int n = op.grid.n;
    CheckReport rep;
    FieldFunction au = apply(op, u);
    double uncut = 0.0, cut = 0.0;
    for (int i = 0; i < n; ++i) {
        const double rhs_uncut =
            nl.lambda * (pow_cut(u[i], nl.q) - 1.0) + nl.mu * pow_cut(u[i], nl.r);
        const double rhs_cut = nl.lambda * cutoff_eval(nl, i + 1, u[i], CutoffKind::g) +
                               nl.mu * cutoff_eval(nl, i + 1, u[i], CutoffKind::f);
        uncut = std::max(uncut, std::abs(au[i] - rhs_uncut));
        cut = std::max(cut, std::abs(au[i] - rhs_cut));
    }
    rep.uncut_residual_inf = uncut;
    rep.cutoff_residual_inf = cut;
    rep.min_value = min_value(u);
    rep.positive = rep.min_value > 0.0;
    const double eps = 1e-8 * sup_norm(nl.u_under);
    rep.ordering_ok = true;
    for (int i = 0; i < n; ++i) {
        if (u[i] < nl.u_under[i] - eps) {
            rep.ordering_ok = false;
            break;
        }
    }
    if (rep.positive) {
        try {
            rep.decay_exponent = boundary_decay_exponent(u);
        } catch (const std::exception&) {
        }
    }
    rep.energy = energy(nl, op, u);
    return rep;
}

}  // namespace fracsemi
