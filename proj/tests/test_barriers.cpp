#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracsemi/barriers.hpp"

using namespace fracsemi;

namespace {

struct Lab {
    Grid g;
    DiscreteFracLap op;
    Eigenpair eig;
    Lab(double s, int n) : g(make_grid(-1, 1, n)), op(assemble(g, s)) {
        eig = principal_eigenpair(op, 1e-12);
    }
};

}  // namespace

TEST_CASE("torsion solves against the closed form at s=1/2") {
    Grid g = make_grid(-1, 1, 512);
    DiscreteFracLap op = assemble(g, 0.5);
    FieldFunction psi = torsion(op, 1e-11);
    double err = 0.0;
    for (int i = 1; i <= g.n; ++i) {
        const double x = g.node(i);
        if (std::abs(x) > 0.9) continue;
        const double exact = std::sqrt(1.0 - x * x);
        err = std::max(err, std::abs(psi[i - 1] - exact) / exact);
    }
    CHECK(err < 0.01);

    double sym = 0.0;
    for (int i = 1; i <= g.n; ++i) sym = std::max(sym, std::abs(psi[i - 1] - psi[g.n - i]));
    CHECK(sym < 1e-10);
}

TEST_CASE("torsion boundary decay exponent tracks s") {
    Grid g = make_grid(-1, 1, 1024);
    for (double s : {0.25, 0.5}) {
        DiscreteFracLap op = assemble(g, s);
        FieldFunction psi = torsion(op, 1e-11);
        const double e = boundary_decay_exponent(psi);
        CHECK(e > 0.8 * s);
        CHECK(e < 1.2 * s);
    }
}

TEST_CASE("sublinear solver scaling identity") {
    Grid g = make_grid(-1, 1, 256);
    DiscreteFracLap op = assemble(g, 0.25);
    const double q = 0.5, tol = 1e-10;
    FieldFunction z1 = solve_sublinear(op, 1.0, q, tol);
    FieldFunction z16 = solve_sublinear(op, 16.0, q, tol);
    const double scale = std::pow(16.0, 1.0 / (1.0 - q));
    double dev = 0.0;
    for (int i = 0; i < g.n; ++i) dev = std::max(dev, std::abs(z16[i] - scale * z1[i]));
    CHECK(dev / sup_norm(z16) < 10.0 * tol);
}

TEST_CASE("sublinear solver is start-independent (uniqueness at n=32)") {
    Grid g = make_grid(-1, 1, 32);
    DiscreteFracLap op = assemble(g, 0.3);
    const double q = 0.4, lam = 2.0, tol = 1e-11;
    FieldFunction z = solve_sublinear(op, lam, q, tol);

    // fixed point from below: iterate the order-preserving map from a tiny
    // positive seed; it climbs to the same solution
    FieldFunction u = make_field(g, 1e-6);
    for (int k = 0; k < 20000; ++k) {
        FieldFunction rhs = make_field(g);
        for (int i = 0; i < g.n; ++i) rhs[i] = lam * std::pow(std::max(u[i], 0.0), q);
        FieldFunction un = solve_linear(op, 0.0, rhs, 1e-14, 100000, &u);
        double step = 0.0;
        for (int i = 0; i < g.n; ++i) step = std::max(step, std::abs(un[i] - u[i]));
        u = un;
        if (step < 1e-13) break;
    }
    double dev = 0.0;
    for (int i = 0; i < g.n; ++i) dev = std::max(dev, std::abs(u[i] - z[i]));
    CHECK(dev < 10.0 * tol * sup_norm(z));
}

TEST_CASE("sublinear solution decays like d^s") {
    Grid g = make_grid(-1, 1, 512);
    DiscreteFracLap op = assemble(g, 0.25);
    FieldFunction z = solve_sublinear(op, 1.0, 0.5, 1e-10);
    const double e = boundary_decay_exponent(z);
    CHECK(e > 0.7 * 0.25);
    CHECK(e < 1.3 * 0.25);
}

TEST_CASE("h is positive and the two routes agree") {
    Lab lab(0.25, 512);
    HComputation hc = compute_h(lab.op, lab.eig);
    CHECK(min_value(hc.h) > 0.0);
    CHECK(hc.max_rel_diff_interior < 0.02);
}

TEST_CASE("h positivity across s") {
    for (double s : {0.1, 0.25, 0.4}) {
        Lab lab(s, 256);
        HComputation hc = compute_h(lab.op, lab.eig);
        CHECK(min_value(hc.h) > 0.0);
    }
}

TEST_CASE("h grows toward the boundary where the blow-up is visible") {
    // the boundary blow-up of h is logarithmic; at desk scale it dominates
    // the interior plateau once s is not too small
    Lab lab(0.4, 512);
    HComputation hc = compute_h(lab.op, lab.eig);
    const int k = lab.g.n / 20;
    double outer = 0.0;
    for (int i = 0; i < k; ++i) {
        outer = std::max(outer, std::max(hc.h[i], hc.h[lab.g.n - 1 - i]));
    }
    std::vector<double> sorted = hc.h.values;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    CHECK(outer > median);
}

TEST_CASE("subsolution formula and parameter validation") {
    Lab lab(0.25, 128);
    FieldFunction u = subsolution(lab.eig, 4.0, 1.5, 0.5);
    for (int i = 0; i < lab.g.n; ++i) {
        CHECK(u[i] == doctest::Approx(8.0 * lab.eig.phi1[i] * lab.eig.phi1[i]).epsilon(1e-14));
    }
    CHECK(max_value(u) <= std::pow(4.0, 1.5) * (1.0 + 1e-14));  // phi1 is sup-normalized

    CHECK_THROWS_AS(subsolution(lab.eig, 4.0, 1.0, 0.5), ConfigError);   // open interval
    CHECK_THROWS_AS(subsolution(lab.eig, 4.0, 2.0, 0.5), ConfigError);   // 1/(1-q) endpoint
    CHECK_THROWS_WITH_AS(subsolution(lab.eig, 4.0, 5.0, 0.5),
                         doctest::Contains("(1, 2"), ConfigError);
}

TEST_CASE("certification margin flips sign across the threshold") {
    Lab lab(0.25, 256);
    const double q = 0.5, alpha1 = 1.5;
    ThresholdSearch ts = subsolution_threshold(lab.op, lab.eig, q, alpha1, 1e-3);
    CHECK(ts.margin_at_star <= 0.0);
    CHECK(ts.margin_below > 0.0);

    // scan oracle: margins on a lambda ladder cross exactly once around lambda*
    for (double f : {0.25, 0.5}) {
        FieldFunction u = subsolution(lab.eig, f * ts.lambda_star, alpha1, q);
        CHECK(certify_subsolution(lab.op, u, f * ts.lambda_star, q) > 0.0);
    }
    for (double f : {2.0, 10.0}) {
        FieldFunction u = subsolution(lab.eig, f * ts.lambda_star, alpha1, q);
        CHECK(certify_subsolution(lab.op, u, f * ts.lambda_star, q) <= 0.0);
    }

    // margins stay finite along the ladder
    for (const auto& [lam, m] : ts.margin_trace) CHECK(std::isfinite(m));

    // ordering u_ <= z_lambda is part of the threshold report
    CHECK(ts.lambda_ordered >= ts.lambda_star);
    CHECK(ts.ordering_at_star == (ts.lambda_ordered == ts.lambda_star));
}

TEST_CASE("adding a constant can break certification") {
    Lab lab(0.25, 64);
    const double q = 0.5, alpha1 = 1.5;
    ThresholdSearch ts = subsolution_threshold(lab.op, lab.eig, q, alpha1, 1e-3);
    const double lam = 2.0 * ts.lambda_star;
    FieldFunction u = subsolution(lab.eig, lam, alpha1, q);
    CHECK(certify_subsolution(lab.op, u, lam, q) <= 0.0);

    bool broke = false;
    FieldFunction shifted = u;
    for (double c = 1.0; c < 1e9; c *= 4.0) {
        for (int i = 0; i < lab.g.n; ++i) shifted[i] = u[i] + c;
        if (certify_subsolution(lab.op, shifted, lam, q) > 0.0) {
            broke = true;
            break;
        }
    }
    CHECK(broke);
}

TEST_CASE("threshold inflates as alpha1 approaches 1/(1-q)") {
    Lab lab(0.25, 128);
    const double q = 0.5;
    double prev = 0.0;
    for (double alpha1 : {1.5, 1.8, 1.95}) {
        ThresholdSearch ts = subsolution_threshold(lab.op, lab.eig, q, alpha1, 1e-3);
        CHECK(ts.lambda_star > prev);
        prev = ts.lambda_star;
    }
}

TEST_CASE("barrier set certifies and orders at a comfortable lambda") {
    Lab lab(0.25, 128);
    const double q = 0.5;
    ThresholdSearch ts = subsolution_threshold(lab.op, lab.eig, q, 1.5, 1e-3);
    BarrierSet bs = make_barrier_set(lab.op, lab.eig, 2.0 * ts.lambda_star, 1e-7, q, 2.0, 1.5,
                                     2.5, 1e-11);
    CHECK(bs.sub_margin <= 0.0);
    CHECK(bs.super_margin >= 0.0);
    CHECK(bs.ordering_ok);
    CHECK(min_value(bs.u_under) > 0.0);
    CHECK(min_value(bs.z_super) > 0.0);
    CHECK_THROWS_AS(
        make_barrier_set(lab.op, lab.eig, 2.0 * ts.lambda_star, 0.0, q, 2.0, 1.5, 1.9, 1e-11),
        ConfigError);  // alpha2 <= 1/(1-q)
}
