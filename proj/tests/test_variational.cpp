#include <doctest.h>

#include <cmath>
#include <random>

#include "fracsemi/barriers.hpp"
#include "fracsemi/variational.hpp"
#include "helpers.hpp"

using namespace fracsemi;

namespace {

struct Lab {
    Grid g;
    DiscreteFracLap op;
    Eigenpair eig;
    double lambda_star;
    Lab(double s, int n, double q = 0.5, double alpha1 = 1.5)
        : g(make_grid(-1, 1, n)), op(assemble(g, s)) {
        eig = principal_eigenpair(op, 1e-12);
        lambda_star = subsolution_threshold(op, eig, q, alpha1, 1e-3).lambda_star;
    }
    CutoffNonlinearity cutoff(double lam, double mu, double q = 0.5, double r = 2.0,
                              double s = 0.25) const {
        return make_cutoff(lam, mu, q, r, s, subsolution(eig, lam, 1.5, q));
    }
};

}  // namespace

TEST_CASE("cutoff branch values and knot continuity") {
    Lab lab(0.25, 64);
    CutoffNonlinearity nl = lab.cutoff(2.0, 0.5);

    for (int node : {1, 10, 32, 64}) {
        const double ub = nl.u_under[node - 1];
        // lower branch at a negative argument
        CHECK(cutoff_eval(nl, node, -3.0, CutoffKind::g) ==
              doctest::Approx(std::pow(ub, nl.q) - 1.0).epsilon(1e-14));
        CHECK(cutoff_eval(nl, node, -3.0, CutoffKind::f) ==
              doctest::Approx(std::pow(ub, nl.r)).epsilon(1e-14));
        CHECK(cutoff_eval(nl, node, 0.0, CutoffKind::G) == 0.0);

        // continuity at the knot for all four members
        for (CutoffKind k : {CutoffKind::f, CutoffKind::g, CutoffKind::F, CutoffKind::G}) {
            const double below = cutoff_eval(nl, node, ub, k);
            const double above = cutoff_eval(nl, node, ub * (1.0 + 1e-14), k);
            CHECK(std::abs(below - above) <= 1e-12 * std::max(1.0, std::abs(below)));
        }
        // both F branches equal u_^{r+1} at the knot
        CHECK(cutoff_eval(nl, node, ub, CutoffKind::F) ==
              doctest::Approx(std::pow(ub, nl.r + 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("F' = f and G' = g by central differences") {
    Lab lab(0.25, 64);
    CutoffNonlinearity nl = lab.cutoff(2.0, 0.5);
    for (int node : {3, 17, 40}) {
        const double ub = nl.u_under[node - 1];
        for (double t : {-2.0, -0.3, 0.0, 0.2 * ub, 0.9 * ub, 1.5 * ub, 3.0 * ub, 10.0,
                         250.0, ub}) {
            const double eps = 1e-6 * std::max(1.0, std::abs(t));
            const double dF = (cutoff_eval(nl, node, t + eps, CutoffKind::F) -
                               cutoff_eval(nl, node, t - eps, CutoffKind::F)) /
                              (2.0 * eps);
            const double dG = (cutoff_eval(nl, node, t + eps, CutoffKind::G) -
                               cutoff_eval(nl, node, t - eps, CutoffKind::G)) /
                              (2.0 * eps);
            CHECK(dF == doctest::Approx(cutoff_eval(nl, node, t, CutoffKind::f))
                            .epsilon(1e-5));
            CHECK(dG == doctest::Approx(cutoff_eval(nl, node, t, CutoffKind::g))
                            .epsilon(1e-5));
        }
    }
}

TEST_CASE("f and g are nondecreasing in t") {
    Lab lab(0.25, 64);
    CutoffNonlinearity nl = lab.cutoff(3.0, 0.5);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> unif(-50.0, 50.0);
    for (int k = 0; k < 500; ++k) {
        const int node = 1 + static_cast<int>(rng() % 64);
        double t1 = unif(rng), t2 = unif(rng);
        if (t1 > t2) std::swap(t1, t2);
        CHECK(cutoff_eval(nl, node, t1, CutoffKind::f) <=
              cutoff_eval(nl, node, t2, CutoffKind::f) + 1e-12);
        CHECK(cutoff_eval(nl, node, t1, CutoffKind::g) <=
              cutoff_eval(nl, node, t2, CutoffKind::g) + 1e-12);
    }
}

TEST_CASE("growth bounds hold on a brute-force lattice") {
    Lab lab(0.25, 64);
    CutoffNonlinearity nl = lab.cutoff(2.0 * lab.lambda_star, 1e-6);
    const double c = nl.growth_c, cp = nl.growth_cprime;
    REQUIRE(c > 0.0);
    REQUIRE(cp > 0.0);

    auto bound_ok = [&](double cprime) {
        for (int node = 1; node <= 64; ++node) {
            for (double t = -1000.0; t <= 1000.0; t += 7.8125) {
                const double bf = c + cprime * std::abs(t) +
                                  std::pow(std::abs(t), nl.r + 1.0) / (nl.r + 1.0);
                const double bg = c + cprime * std::abs(t) +
                                  std::pow(std::abs(t), nl.q + 1.0) / (nl.q + 1.0);
                if (std::abs(cutoff_eval(nl, node, t, CutoffKind::F)) > bf * (1.0 + 1e-12)) {
                    return false;
                }
                if (std::abs(cutoff_eval(nl, node, t, CutoffKind::G)) > bg * (1.0 + 1e-12)) {
                    return false;
                }
            }
            // t = 0 exactly: |F| = 0 <= c
            if (std::abs(cutoff_eval(nl, node, 0.0, CutoffKind::F)) > c) return false;
        }
        return true;
    };
    CHECK(bound_ok(cp));
}

TEST_CASE("growth constants are not vacuous: halving c' breaks the bound somewhere") {
    // needs a small frozen subsolution so that c does not swamp the linear term
    Lab lab(0.25, 64);
    CutoffNonlinearity nl = lab.cutoff(0.1, 0.0);
    const double c = nl.growth_c, cp = nl.growth_cprime;

    bool violated = false;
    for (int node = 1; node <= 64 && !violated; ++node) {
        for (double t = -5.0; t <= 5.0; t += 0.005) {
            const double bg = c + 0.5 * cp * std::abs(t) +
                              std::pow(std::abs(t), nl.q + 1.0) / (nl.q + 1.0);
            const double bf = c + 0.5 * cp * std::abs(t) +
                              std::pow(std::abs(t), nl.r + 1.0) / (nl.r + 1.0);
            if (std::abs(cutoff_eval(nl, node, t, CutoffKind::G)) > bg ||
                std::abs(cutoff_eval(nl, node, t, CutoffKind::F)) > bf) {
                violated = true;
                break;
            }
        }
    }
    CHECK(violated);
}

TEST_CASE("energy vanishes at zero and obeys the lower bound") {
    Lab lab(0.25, 96);
    const double lam = 2.0 * lab.lambda_star;
    CutoffNonlinearity nl = lab.cutoff(lam, 1e-6);
    CHECK(energy(nl, lab.op, make_field(lab.g)) == 0.0);

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> scale(0.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        FieldFunction u = testutil::random_field(lab.g, rng, std::pow(10.0, scale(rng)));
        const double lhs = energy(nl, lab.op, u);
        const double an2 = quadratic_form(lab.op, u, u);
        const double rhs = 0.5 * an2 - (lam + nl.mu) * nl.growth_c * lab.g.length() -
                           (nl.mu + lam) * nl.growth_cprime * lp_norm(u, 1.0) -
                           lam * std::pow(lp_norm(u, nl.q + 1.0), nl.q + 1.0) -
                           nl.mu * std::pow(lp_norm(u, nl.r + 1.0), nl.r + 1.0);
        CHECK(lhs >= rhs - 1e-9 * std::abs(rhs));
    }
}

TEST_CASE("energy decreases along a small negative-gradient step") {
    Lab lab(0.25, 96);
    CutoffNonlinearity nl = lab.cutoff(2.0 * lab.lambda_star, 1e-6);
    std::mt19937 rng(19);
    FieldFunction u = testutil::random_field(lab.g, rng, 5.0);
    FieldFunction gr = energy_gradient(nl, lab.op, u);
    const double e0 = energy(nl, lab.op, u);
    double g2 = 0.0;
    for (int i = 0; i < lab.g.n; ++i) g2 += gr[i] * gr[i];
    REQUIRE(g2 > 0.0);
    const double a = 1e-6 / std::sqrt(g2);
    FieldFunction v = u;
    for (int i = 0; i < lab.g.n; ++i) v[i] -= a * gr[i];
    const double e1 = energy(nl, lab.op, v);
    CHECK(e1 < e0);
    CHECK(e0 - e1 >= 0.5 * a * g2);  // Armijo-grade decrease at vanishing step
}

TEST_CASE("gradient matches central finite differences on random pairs") {
    Lab lab(0.25, 96);
    CutoffNonlinearity nl = lab.cutoff(2.0 * lab.lambda_star, 1e-5);
    std::mt19937 rng(77);
    for (int k = 0; k < 20; ++k) {
        FieldFunction u = testutil::random_field(lab.g, rng, 3.0);
        FieldFunction v = testutil::random_field(lab.g, rng, 1.0);
        const double scale = sup_norm(u);
        const double eps = 1e-6 * std::max(scale, 1.0);
        FieldFunction up = u, um = u;
        for (int i = 0; i < lab.g.n; ++i) {
            up[i] += eps * v[i];
            um[i] -= eps * v[i];
        }
        const double fd =
            (energy(nl, lab.op, up) - energy(nl, lab.op, um)) / (2.0 * eps);
        FieldFunction gr = energy_gradient(nl, lab.op, u);
        double ip = 0.0;
        for (int i = 0; i < lab.g.n; ++i) ip += gr[i] * v[i];
        CHECK(std::abs(fd - ip) / std::max(1e-30, std::abs(ip)) < 1e-5);
    }
}

TEST_CASE("gradient of the quadratic clone is h*Au") {
    Lab lab(0.25, 64);
    CutoffNonlinearity nl = lab.cutoff(0.0, 0.0);  // lambda = mu = 0 clone
    std::mt19937 rng(6);
    FieldFunction u = testutil::random_field(lab.g, rng);
    FieldFunction gr = energy_gradient(nl, lab.op, u);
    FieldFunction au = apply(lab.op, u);
    for (int i = 0; i < lab.g.n; ++i) {
        CHECK(gr[i] == doctest::Approx(lab.g.h * au[i]).epsilon(1e-13));
    }
}

TEST_CASE("gradient equals h times the uncut residual above u_") {
    Lab lab(0.25, 96);
    const double lam = 2.0 * lab.lambda_star;
    CutoffNonlinearity nl = lab.cutoff(lam, 1e-6);
    std::mt19937 rng(13);
    FieldFunction u = nl.u_under;
    std::uniform_real_distribution<double> unif(0.5, 4.0);
    for (int i = 0; i < lab.g.n; ++i) u[i] = nl.u_under[i] + unif(rng);  // strictly above

    FieldFunction gr = energy_gradient(nl, lab.op, u);
    FieldFunction au = apply(lab.op, u);
    for (int i = 0; i < lab.g.n; ++i) {
        const double res = au[i] - lam * (std::pow(u[i], nl.q) - 1.0) -
                           nl.mu * std::pow(u[i], nl.r);
        CHECK(gr[i] == doctest::Approx(lab.g.h * res).epsilon(1e-12));
    }
}

TEST_CASE("make_cutoff validates the critical window") {
    Lab lab(0.25, 64);
    FieldFunction ub = subsolution(lab.eig, 2.0, 1.5, 0.5);
    CHECK_THROWS_WITH_AS(make_cutoff(1.0, 0.0, 0.5, 5.0, 0.25, ub),
                         doctest::Contains("supercritical"), ConfigError);
    CHECK_THROWS_AS(make_cutoff(1.0, 0.0, 0.5, 2.0, 0.6, ub), ConfigError);  // s >= 1/2
    CutoffNonlinearity crit = make_cutoff(1.0, 0.0, 0.5, 3.0, 0.25, ub);
    CHECK(crit.critical());
    CHECK(crit.crit_exp == doctest::Approx(4.0));
}

TEST_CASE("choose_rho_mu constructs certified thresholds") {
    Lab lab(0.25, 128);
    const double lam = 2.0 * lab.lambda_star;
    CutoffNonlinearity nl = lab.cutoff(lam, 0.0);
    ThresholdReport tr = choose_rho_mu(nl, lab.op, 99);
    CHECK(tr.rho > 0.0);
    CHECK(tr.mu_lambda > 0.0);
    CHECK(tr.mu0_critical > 0.0);

    // by construction of the bisection
    CHECK(sphere_lower_bound(nl, lab.g.length(), tr.rho, tr.mu_lambda / 2.0, tr) > 0.0);
    CHECK(sphere_lower_bound(nl, lab.g.length(), tr.rho, 2.0 * tr.mu_lambda, tr) <= 0.0);

    // doubling rho scales the critical-mu formula by 2^{2-crit} exactly
    const double crit = nl.crit_exp;
    auto mu0_at = [&](double rho) {
        return crit / (4.0 * std::pow(tr.embed_crit, crit) * std::pow(2.0 * rho, crit - 2.0));
    };
    CHECK(mu0_at(2.0 * tr.rho) ==
          doctest::Approx(std::pow(2.0, 2.0 - crit) * mu0_at(tr.rho)).epsilon(1e-14));

    // s = 0.25 hand evaluation: mu0 = 1/(4 S^4 rho^2)
    CHECK(tr.mu0_critical ==
          doctest::Approx(1.0 / (4.0 * std::pow(tr.embed_crit, 4.0) * tr.rho * tr.rho))
              .epsilon(1e-12));
}

TEST_CASE("ball minimizer satisfies the certificates") {
    Lab lab(0.25, 256);
    const double lam = 2.0 * lab.lambda_star;
    CutoffNonlinearity nl0 = lab.cutoff(lam, 0.0);
    ThresholdReport tr = choose_rho_mu(nl0, lab.op, 7);
    const double mu = tr.mu_lambda / 2.0;
    CutoffNonlinearity nl = lab.cutoff(lam, mu);

    const double tol = 1e-8;
    SolveReport rep = minimize_in_ball(nl, lab.op, tr.rho, tol, 7);
    CHECK(rep.converged);
    REQUIRE(rep.energy.has_value());
    CHECK(*rep.energy <= 0.0);
    CHECK(rep.min_value > 0.0);
    for (int i = 0; i < lab.g.n; ++i) CHECK(rep.solution[i] >= nl.u_under[i] - 1e-8);
    CHECK(rep.residual_inf < 10.0 * tol / lab.g.h);
    CHECK(rep.classification == Classification::minimizer);

    CheckReport chk = verify_solution(nl, lab.op, rep.solution);
    CHECK(chk.ordering_ok);
    CHECK(chk.positive);
    CHECK(chk.uncut_residual_inf == doctest::Approx(rep.residual_inf));
}

TEST_CASE("mountain pass finds a separated positive-level solution") {
    Lab lab(0.25, 128);
    const double lam = 2.0 * lab.lambda_star;
    CutoffNonlinearity nl0 = lab.cutoff(lam, 0.0);
    ThresholdReport tr = choose_rho_mu(nl0, lab.op, 11);
    const double mu = tr.mu_lambda / 2.0;
    CutoffNonlinearity nl = lab.cutoff(lam, mu);

    SolveReport u0 = minimize_in_ball(nl, lab.op, tr.rho, 1e-8, 11);
    REQUIRE(u0.converged);

    const double tol = 1e-7;
    MountainPassResult mp = mountain_pass(nl, lab.op, lab.eig.phi1, u0.solution, tr.rho, tol);
    REQUIRE(mp.report.energy.has_value());
    CHECK(*mp.report.energy > 0.0);
    CHECK(*u0.energy <= 0.0);
    CHECK(mp.report.converged);
    CHECK(!mp.merged);
    CHECK(mp.separation > 1e-3 * std::max(sup_norm(u0.solution), 1.0));
    CHECK(mp.report.min_value > 0.0);
    for (int i = 0; i < lab.g.n; ++i) {
        CHECK(mp.report.solution[i] >= nl.u_under[i] - 1e-8);
    }
    CHECK(mp.report.residual_inf < 10.0 * tol);

    // the reported level trace never increases between sweeps
    for (size_t k = 1; k < mp.level_trace.size(); ++k) {
        CHECK(mp.level_trace[k] <= mp.level_trace[k - 1] * (1.0 + 1e-15) + 1e-300);
    }
}

TEST_CASE("mountain pass rejects the critical case") {
    Lab lab(0.25, 64);
    CutoffNonlinearity nl = lab.cutoff(2.0 * lab.lambda_star, 1e-8, 0.5, 3.0);
    REQUIRE(nl.critical());
    FieldFunction dummy = lab.eig.phi1;
    CHECK_THROWS_WITH_AS(
        mountain_pass(nl, lab.op, lab.eig.phi1, dummy, 100.0, 1e-6),
        doctest::Contains("critical"), ConfigError);
}

TEST_CASE("verify_solution on the zero field and under perturbation") {
    Lab lab(0.25, 128);
    const double lam = 2.0 * lab.lambda_star;
    CutoffNonlinearity nl = lab.cutoff(lam, 0.0);

    FieldFunction zero = make_field(lab.g);
    CheckReport z = verify_solution(nl, lab.op, zero);
    CHECK(z.uncut_residual_inf == doctest::Approx(lam).epsilon(1e-15));
    CHECK(!z.positive);
    CHECK(!z.ordering_ok);

    // a converged monotone solution passes, and a one-node bump raises the
    // residual by at least the induced row defect
    FieldFunction u_under = subsolution(lab.eig, lam, 1.5, 0.5);
    FieldFunction z1 = solve_sublinear(lab.op, 1.0, 0.5, 1e-11);
    FieldFunction zsup = z1;
    for (int i = 0; i < lab.g.n; ++i) zsup[i] *= std::pow(lam, 2.0);
    SolveReport mono = monotone_iterate(lab.op, lam, 0.0, 0.5, 2.0, &u_under, &zsup,
                                        Direction::ascend, 1e-10);
    REQUIRE(mono.converged);
    CheckReport good = verify_solution(nl, lab.op, mono.solution);
    CHECK(good.positive);
    CHECK(good.ordering_ok);
    CHECK(good.uncut_residual_inf < 1e-9);
    REQUIRE(good.decay_exponent.has_value());

    const int k = lab.g.n / 2;
    FieldFunction bumped = mono.solution;
    bumped[k] += 0.1;
    CheckReport bad = verify_solution(nl, lab.op, bumped);
    const double uk = mono.solution[k];
    const double defect = 0.1 * lab.op.diag[static_cast<size_t>(k)] -
                          lam * (std::pow(uk + 0.1, 0.5) - std::pow(uk, 0.5));
    CHECK(bad.uncut_residual_inf >= std::abs(defect) - good.uncut_residual_inf - 1e-12);
    CHECK(bad.uncut_residual_inf > 100.0 * good.uncut_residual_inf);
}
