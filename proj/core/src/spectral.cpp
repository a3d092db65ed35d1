#include "fracsemi/spectral.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fracsemi {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

FieldFunction apply_shifted(const DiscreteFracLap& op, double shift, const FieldFunction& u) {
    FieldFunction au = apply(op, u);
    if (shift != 0.0) {
        for (int i = 0; i < u.size(); ++i) au[i] += shift * u[i];
    }
    return au;
}

}  // namespace

FieldFunction solve_linear(const DiscreteFracLap& op, double shift, const FieldFunction& rhs,
                           double tol, int max_iter, const FieldFunction* initial) {
    require_same_grid(op.grid, rhs.grid, "solve_linear");
    if (!(tol > 0.0)) throw std::domain_error("solve_linear: tol must be positive");
    if (shift < 0.0) throw std::domain_error("solve_linear: shift must be nonnegative");

    const int n = op.grid.n;
    const double bnorm = norm2(rhs.values);
    if (bnorm == 0.0) return make_field(op.grid);

    FieldFunction x = initial ? *initial : make_field(op.grid);
    if (initial) require_same_grid(op.grid, initial->grid, "solve_linear initial guess");

    std::vector<double> trace;
    int total_iters = 0;

    // recursive-residual CG with one true-residual verification at the end;
    // restart from the current iterate if rounding drifted past tol
    for (int sweep = 0; sweep < 3; ++sweep) {
        FieldFunction ax = apply_shifted(op, shift, x);
        std::vector<double> r(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)] = rhs[i] - ax[i];
        double rnorm = norm2(r);
        if (rnorm <= tol * bnorm) return x;

        std::vector<double> p = r;
        double rs = dot(r, r);
        FieldFunction pf = make_field(op.grid);
        for (int it = 0; it < max_iter && total_iters < max_iter; ++it, ++total_iters) {
            pf.values = p;
            FieldFunction apv = apply_shifted(op, shift, pf);
            const double pap = dot(p, apv.values);
            if (!(pap > 0.0)) break;  // lost positive-definiteness to rounding
            const double alpha = rs / pap;
            for (int i = 0; i < n; ++i) {
                x[i] += alpha * p[static_cast<size_t>(i)];
                r[static_cast<size_t>(i)] -= alpha * apv[i];
            }
            const double rs_new = dot(r, r);
            const double rn = std::sqrt(rs_new);
            if ((it & 63) == 0) trace.push_back(rn / bnorm);
            if (rn <= 0.5 * tol * bnorm) break;
            const double beta = rs_new / rs;
            for (int i = 0; i < n; ++i) {
                p[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] + beta * p[static_cast<size_t>(i)];
            }
            rs = rs_new;
        }

        FieldFunction check = apply_shifted(op, shift, x);
        double true_res = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = rhs[i] - check[i];
            true_res += d * d;
        }
        true_res = std::sqrt(true_res);
        if (true_res <= tol * bnorm) return x;
        if (total_iters >= max_iter) {
            throw ConvergenceError("solve_linear: CG cap of " + std::to_string(max_iter) +
                                       " iterations exceeded (relative residual " +
                                       std::to_string(true_res / bnorm) + ")",
                                   x.values, true_res / bnorm, total_iters, trace);
        }
    }
    // three sweeps without reaching tol means tol sits below the rounding floor
    FieldFunction check = apply_shifted(op, shift, x);
    double true_res = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = rhs[i] - check[i];
        true_res += d * d;
    }
    throw ConvergenceError("solve_linear: stagnated above tol (rounding floor)", x.values,
                           std::sqrt(true_res) / bnorm, total_iters, trace);
}

Eigenpair principal_eigenpair(const DiscreteFracLap& op, double rtol, int max_iter,
                              const FieldFunction* start) {
    if (!(rtol > 0.0)) throw std::domain_error("principal_eigenpair: rtol must be positive");
    const int n = op.grid.n;

    FieldFunction v = start ? *start : make_field(op.grid, 1.0);
    if (start) require_same_grid(op.grid, start->grid, "principal_eigenpair start");

    // inner solves two digits tighter than the eigen target, but never below
    // the CG rounding floor
    const double cg_tol = std::clamp(rtol * 1e-2, 2e-14, 1e-10);
    std::vector<double> res_trace;
    double lambda = 0.0;

    for (int it = 1; it <= max_iter; ++it) {
        FieldFunction y = solve_linear(op, 0.0, v, cg_tol, 100000, &v);
        const double m = sup_norm(y);
        if (!(m > 0.0)) {
            throw ConvergenceError("principal_eigenpair: iterate vanished", y.values, 0.0, it,
                                   res_trace);
        }
        for (int i = 0; i < n; ++i) y[i] /= m;

        FieldFunction ay = apply(op, y);
        lambda = dot(y.values, ay.values) / dot(y.values, y.values);
        double rinf = 0.0;
        for (int i = 0; i < n; ++i) rinf = std::max(rinf, std::abs(ay[i] - lambda * y[i]));
        res_trace.push_back(rinf / lambda);

        if (rinf <= rtol * lambda) {
            // sup-normalize with positive sign
            int arg = 0;
            for (int i = 0; i < n; ++i) {
                if (std::abs(y[i]) > std::abs(y[arg])) arg = i;
            }
            const double scale = y[arg];
            Eigenpair out;
            out.phi1 = make_field(op.grid);
            for (int i = 0; i < n; ++i) out.phi1[i] = y[i] / scale;
            for (int i = 0; i < n; ++i) {
                if (!(out.phi1[i] > 0.0)) {
                    throw ConsistencyError(
                        "principal_eigenpair: eigenvector not strictly positive at node " +
                        std::to_string(i + 1));
                }
            }
            out.lambda1 = lambda;
            out.residual_inf = rinf / std::abs(scale);
            out.iterations = it;
            return out;
        }
        v = y;
    }
    throw ConvergenceError("principal_eigenpair: no convergence in " + std::to_string(max_iter) +
                               " iterations",
                           v.values, res_trace.empty() ? 0.0 : res_trace.back(), max_iter,
                           res_trace);
}

double embedding_constant(const DiscreteFracLap& op, double p, double tol, unsigned seed,
                          int starts, long max_iter) {
    if (!(p >= 1.0)) throw std::domain_error("embedding_constant: need p >= 1");
    const int n = op.grid.n;
    const double h = op.grid.h;

    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double best = 0.0;
    for (int st = 0; st < starts; ++st) {
        FieldFunction u = make_field(op.grid);
        for (int i = 0; i < n; ++i) u[i] = gauss(rng);
        double an = a_norm(op, u);
        for (int i = 0; i < n; ++i) u[i] /= an;

        double ratio = lp_norm(u, p);
        double eta = 0.1;
        for (long it = 0; it < max_iter; ++it) {
            // gradient of N(u)/||u||_A on the sphere ||u||_A = 1
            FieldFunction au = apply(op, u);
            FieldFunction g = make_field(op.grid);
            const double np1 = std::pow(ratio, 1.0 - p);
            for (int i = 0; i < n; ++i) {
                const double dn =
                    h * std::pow(std::abs(u[i]), p - 1.0) * (u[i] >= 0.0 ? 1.0 : -1.0) * np1;
                g[i] = dn - ratio * h * au[i];
            }
            FieldFunction v = u;
            for (int i = 0; i < n; ++i) v[i] += eta * g[i];
            const double vn = a_norm(op, v);
            for (int i = 0; i < n; ++i) v[i] /= vn;
            const double rv = lp_norm(v, p);
            if (rv > ratio) {
                u = v;
                ratio = rv;
            } else {
                eta *= 0.5;
                if (eta < tol) break;  // no improving step at the resolution limit
            }
        }
        best = std::max(best, ratio);
    }
    return best;
}

}  // namespace fracsemi
