#include "fracsemi/barriers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

namespace fracsemi {

FieldFunction torsion(const DiscreteFracLap& op, double tol) {
    FieldFunction one = make_field(op.grid, 1.0);
    FieldFunction psi = solve_linear(op, 0.0, one, tol);
    for (int i = 0; i < psi.size(); ++i) {
        if (!(psi[i] > 0.0)) {
            throw ConsistencyError("torsion: nonpositive value at node " + std::to_string(i + 1) +
                                   "; M-matrix inverse positivity is broken");
        }
    }
    return psi;
}

FieldFunction solve_sublinear(const DiscreteFracLap& op, double lambda, double q, double tol,
                              int max_iter) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("solve_sublinear: q must lie in (0,1)");
    if (!(lambda > 0.0)) throw std::domain_error("solve_sublinear: lambda must be positive");
    if (!(tol > 0.0)) throw std::domain_error("solve_sublinear: tol must be positive");

    const int n = op.grid.n;
    const double cg_tol = 1e-14;

    FieldFunction psi = torsion(op, std::min(tol, 1e-12));
    // t*psi is a supersolution when t >= lambda t^q max(psi)^q
    const double t = 1.0001 * std::pow(lambda * std::pow(max_value(psi), q), 1.0 / (1.0 - q));
    FieldFunction z = psi;
    for (int i = 0; i < n; ++i) z[i] *= t;

    FieldFunction rhs = make_field(op.grid);
    const double scale_tol = tol * std::max(1.0, sup_norm(z));
    for (int it = 1; it <= max_iter; ++it) {
        for (int i = 0; i < n; ++i) rhs[i] = lambda * std::pow(std::max(z[i], 0.0), q);
        FieldFunction zn = solve_linear(op, 0.0, rhs, cg_tol, 100000, &z);
        const double slack = 1e-12 * std::max(1.0, sup_norm(z));
        double step = 0.0;
        for (int i = 0; i < n; ++i) {
            if (zn[i] > z[i] + slack) {
                throw ConsistencyError("solve_sublinear: descent iterate increased at node " +
                                       std::to_string(i + 1));
            }
            if (!(zn[i] > 0.0)) {
                throw ConsistencyError("solve_sublinear: iterate lost positivity at node " +
                                       std::to_string(i + 1) + " (broken M-matrix property)");
            }
            step = std::max(step, std::abs(zn[i] - z[i]));
        }
        z = zn;
        if (step < scale_tol) {
            FieldFunction az = apply(op, z);
            double res = 0.0;
            for (int i = 0; i < n; ++i) {
                res = std::max(res, std::abs(az[i] - lambda * std::pow(z[i], q)));
            }
            if (res <= tol * std::max(1.0, lambda)) return z;
        }
    }
    throw ConvergenceError("solve_sublinear: no convergence in " + std::to_string(max_iter) +
                               " sweeps",
                           z.values, 0.0, max_iter);
}

HComputation compute_h(const DiscreteFracLap& op, const Eigenpair& eig) {
    require_same_grid(op.grid, eig.phi1.grid, "compute_h");
    const Grid& g = op.grid;
    const int n = g.n;
    const double h = g.h;
    const double s = op.s;

    // route (b): A(phi^2) = 2 lambda1 phi^2 - c_ns h
    FieldFunction phi2 = make_field(g);
    for (int i = 0; i < n; ++i) phi2[i] = eig.phi1[i] * eig.phi1[i];
    FieldFunction aphi2 = apply(op, phi2);
    HComputation out;
    out.h = make_field(g);
    for (int i = 0; i < n; ++i) {
        out.h[i] = (2.0 * eig.lambda1 * phi2[i] - aphi2[i]) / op.c_ns;
    }

    // route (a): exact integral of (phi(x_i) - I phi(y))^2 against the kernel,
    // element by element, plus phi_i^2 times the exterior tail. The difference
    // vanishes linearly at x_i, so the two adjacent elements are regular.
    out.h_quadrature = make_field(g);
    std::vector<double> vals(static_cast<size_t>(n + 2), 0.0);  // with boundary zeros
    for (int i = 0; i < n; ++i) vals[static_cast<size_t>(i + 1)] = eig.phi1[i];
    for (int i = 1; i <= n; ++i) {
        const double xi = g.node(i);
        const double pi_ = vals[static_cast<size_t>(i)];
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) {  // element [x_k, x_{k+1}]
            const double ya = g.x_left + k * h;
            const double va = vals[static_cast<size_t>(k)];
            const double vb = vals[static_cast<size_t>(k + 1)];
            if (k == i - 1 || k == i) {
                // adjacent element: D = m z exactly, with z the distance to x_i
                const double other = (k == i) ? vb : va;
                const double m = (pi_ - other) / h;
                acc += m * m * std::pow(h, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
                continue;
            }
            double a, b, pa, pb;  // D at the near and far end of the element
            if (ya >= xi) {
                a = ya - xi;
                b = a + h;
                pa = pi_ - va;
                pb = pi_ - vb;
            } else {
                a = xi - (ya + h);
                b = a + h;
                pa = pi_ - vb;
                pb = pi_ - va;
            }
            const double m = (pb - pa) / h;
            const double al = pa - m * a;  // D(z) = al + m z
            acc += al * al * kernel::i0(a, b, s) + 2.0 * al * m * kernel::i1(a, b, s) +
                   m * m * kernel::i2(a, b, s);
        }
        out.h_quadrature[i - 1] = acc + pi_ * pi_ * exterior_tail(g, s, i);
    }

    const double center = 0.5 * (g.x_left + g.x_right);
    const double cut = 0.9 * g.half_width();
    for (int i = 1; i <= n; ++i) {
        if (std::abs(g.node(i) - center) > cut) continue;
        const double rel =
            std::abs(out.h[i - 1] - out.h_quadrature[i - 1]) / std::abs(out.h_quadrature[i - 1]);
        out.max_rel_diff_interior = std::max(out.max_rel_diff_interior, rel);
    }
    if (out.max_rel_diff_interior > 0.05) {
        throw ConsistencyError("compute_h: identity and quadrature routes disagree by " +
                               std::to_string(out.max_rel_diff_interior * 100.0) +
                               "% on the interior (discretization fault)");
    }
    for (int i = 0; i < n; ++i) {
        if (!(out.h[i] > 0.0)) {
            throw ConsistencyError("compute_h: h is nonpositive at node " + std::to_string(i + 1));
        }
    }
    return out;
}

FieldFunction subsolution(const Eigenpair& eig, double lambda, double alpha1, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("subsolution: q must lie in (0,1)");
    const double hi = 1.0 / (1.0 - q);
    if (!(alpha1 > 1.0 && alpha1 < hi)) {
        throw ConfigError("subsolution: alpha1 must lie strictly inside (1, " +
                          std::to_string(hi) + "), got " + std::to_string(alpha1));
    }
    if (!(lambda > 0.0)) throw std::domain_error("subsolution: lambda must be positive");
    FieldFunction u = make_field(eig.phi1.grid);
    const double scale = std::pow(lambda, alpha1);
    for (int i = 0; i < u.size(); ++i) u[i] = scale * eig.phi1[i] * eig.phi1[i];
    return u;
}

double certify_subsolution(const DiscreteFracLap& op, const FieldFunction& u_under,
                           double lambda, double q) {
    require_same_grid(op.grid, u_under.grid, "certify_subsolution");
    for (int i = 0; i < u_under.size(); ++i) {
        if (!(u_under[i] > 0.0)) {
            throw std::domain_error("certify_subsolution: u_under must be strictly positive");
        }
    }
    FieldFunction au = apply(op, u_under);
    double margin = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < u_under.size(); ++i) {
        margin = std::max(margin, au[i] - lambda * (std::pow(u_under[i], q) - 1.0));
    }
    return margin;
}

ThresholdSearch subsolution_threshold(const DiscreteFracLap& op, const Eigenpair& eig, double q,
                                      double alpha1, double tol, double cap) {
    if (!(tol > 0.0 && tol < 1.0)) {
        throw std::domain_error("subsolution_threshold: tol must lie in (0,1)");
    }
    ThresholdSearch out;
    auto margin_at = [&](double lam) {
        FieldFunction u = subsolution(eig, lam, alpha1, q);
        const double m = certify_subsolution(op, u, lam, q);
        out.margin_trace.emplace_back(lam, m);
        return m;
    };

    double lo = 1.0, hi = 1.0;
    double m1 = margin_at(1.0);
    if (m1 <= 0.0) {
        // already certified at 1; walk down for a failing bracket
        while (lo > 1e-8 && margin_at(lo * 0.5) <= 0.0) lo *= 0.5;
        hi = lo;
        lo *= 0.5;
    } else {
        while (hi < cap && margin_at(hi * 2.0) > 0.0) hi *= 2.0;
        if (hi >= cap) {
            throw SearchError("subsolution_threshold: no certified lambda below cap " +
                                  std::to_string(cap),
                              out.margin_trace);
        }
        lo = hi;
        hi *= 2.0;
    }
    while ((hi - lo) / hi > tol) {
        const double mid = 0.5 * (lo + hi);
        if (margin_at(mid) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.lambda_star = hi;
    out.margin_at_star = certify_subsolution(op, subsolution(eig, hi, alpha1, q), hi, q);
    out.lambda_below = lo;
    out.margin_below = certify_subsolution(op, subsolution(eig, lo, alpha1, q), lo, q);

    // ordering u_(lambda) <= z_lambda, using the exact discrete scaling
    // z_lambda = lambda^(1/(1-q)) z_1
    FieldFunction z1 = solve_sublinear(op, 1.0, q, 1e-11);
    auto ordered = [&](double lam) {
        const double zs = std::pow(lam, 1.0 / (1.0 - q));
        const double us = std::pow(lam, alpha1);
        for (int i = 0; i < z1.size(); ++i) {
            if (us * eig.phi1[i] * eig.phi1[i] > zs * z1[i]) return false;
        }
        return true;
    };
    out.ordering_at_star = ordered(out.lambda_star);
    if (out.ordering_at_star) {
        out.lambda_ordered = out.lambda_star;
    } else {
        double olo = out.lambda_star, ohi = 2.0 * out.lambda_star;
        while (ohi < cap && !ordered(ohi)) ohi *= 2.0;
        if (ohi >= cap) {
            throw SearchError("subsolution_threshold: ordering u_ <= z_lambda not reached below cap",
                              out.margin_trace);
        }
        while ((ohi - olo) / ohi > tol) {
            const double mid = 0.5 * (olo + ohi);
            if (ordered(mid)) {
                ohi = mid;
            } else {
                olo = mid;
            }
        }
        out.lambda_ordered = ohi;
    }
    return out;
}

BarrierSet make_barrier_set(const DiscreteFracLap& op, const Eigenpair& eig, double lambda,
                            double mu, double q, double r, double alpha1, double alpha2,
                            double tol) {
    if (!(alpha2 > 1.0 / (1.0 - q))) {
        throw ConfigError("make_barrier_set: alpha2 must exceed 1/(1-q) = " +
                          std::to_string(1.0 / (1.0 - q)));
    }
    if (mu < 0.0) throw std::domain_error("make_barrier_set: mu must be nonnegative");

    BarrierSet b;
    b.lambda = lambda;
    b.alpha1 = alpha1;
    b.alpha2 = alpha2;
    b.u_under = subsolution(eig, lambda, alpha1, q);
    FieldFunction z1 = solve_sublinear(op, 1.0, q, tol);
    const double zs = std::pow(lambda, 1.0 / (1.0 - q));
    b.z_super = z1;
    for (int i = 0; i < z1.size(); ++i) b.z_super[i] *= zs;

    FieldFunction psi = torsion(op, tol);
    b.psi_super = psi;
    const double ps = std::pow(lambda, alpha2);
    for (int i = 0; i < psi.size(); ++i) b.psi_super[i] *= ps;

    b.sub_margin = certify_subsolution(op, b.u_under, lambda, q);
    {
        FieldFunction au = apply(op, b.psi_super);
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < au.size(); ++i) {
            const double v = au[i] - lambda * (std::pow(b.psi_super[i], q) - 1.0) -
                             mu * std::pow(b.psi_super[i], r);
            m = std::min(m, v);
        }
        b.super_margin = m;
    }
    b.ordering_ok = true;
    for (int i = 0; i < z1.size(); ++i) {
        if (b.u_under[i] > b.z_super[i]) {
            b.ordering_ok = false;
            break;
        }
    }
    return b;
}

void write_barriers_csv(const std::string& path, const Grid& grid, const FieldFunction& phi1,
                        const FieldFunction& h, const FieldFunction& u_under,
                        const FieldFunction& z_super, const FieldFunction& psi) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings on every platform
    if (!out) throw std::runtime_error("write_barriers_csv: cannot open " + path);
    out << "x,phi1,h,u_under,z_super,psi\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << sep;
    };
    for (int i = 1; i <= grid.n; ++i) {
        put(grid.node(i), ',');
        put(phi1[i - 1], ',');
        put(h[i - 1], ',');
        put(u_under[i - 1], ',');
        put(z_super[i - 1], ',');
        put(psi[i - 1], '\n');
    }
}

}  // namespace fracsemi
