#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "fracsemi/spectral.hpp"
#include "helpers.hpp"

using namespace fracsemi;

TEST_CASE("solve_linear recovers a known preimage") {
    Grid g = make_grid(-1, 1, 128);
    DiscreteFracLap op = assemble(g, 0.3);
    std::mt19937 rng(1);
    FieldFunction v = testutil::random_field(g, rng);
    for (double shift : {0.0, 2.5}) {
        FieldFunction rhs = apply(op, v);
        if (shift != 0.0) {
            for (int i = 0; i < g.n; ++i) rhs[i] += shift * v[i];
        }
        FieldFunction x = solve_linear(op, shift, rhs, 1e-12);
        double dev = 0.0;
        for (int i = 0; i < g.n; ++i) dev = std::max(dev, std::abs(x[i] - v[i]));
        CHECK(dev < 1e-9 * sup_norm(v));
    }
}

TEST_CASE("solve_linear of zero rhs is exactly zero") {
    Grid g = make_grid(-1, 1, 64);
    DiscreteFracLap op = assemble(g, 0.5);
    FieldFunction x = solve_linear(op, 0.0, make_field(g), 1e-12);
    CHECK(sup_norm(x) == 0.0);
}

TEST_CASE("solve_linear is inverse-positive (dense oracle at n=32)") {
    Grid g = make_grid(-1, 1, 32);
    DiscreteFracLap op = assemble(g, 0.25);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    FieldFunction rhs = make_field(g);
    for (int i = 0; i < g.n; ++i) rhs[i] = (i % 4 == 0) ? unif(rng) : 0.0;

    FieldFunction x = solve_linear(op, 0.0, rhs, 1e-13);
    CHECK(min_value(x) > 0.0);

    Eigen::VectorXd r(g.n);
    for (int i = 0; i < g.n; ++i) r(i) = rhs[i];
    Eigen::VectorXd oracle = testutil::dense_matrix(op).fullPivLu().solve(r);
    for (int i = 0; i < g.n; ++i) CHECK(x[i] == doctest::Approx(oracle(i)).epsilon(1e-9));
}

TEST_CASE("solve_linear reports non-convergence with the best iterate") {
    Grid g = make_grid(-1, 1, 256);
    DiscreteFracLap op = assemble(g, 0.5);
    FieldFunction rhs = make_field(g, 1.0);
    CHECK_THROWS_AS(solve_linear(op, 0.0, rhs, 1e-12, 3), ConvergenceError);
    try {
        solve_linear(op, 0.0, rhs, 1e-12, 3);
    } catch (const ConvergenceError& e) {
        CHECK(e.best.size() == static_cast<size_t>(g.n));
        CHECK(e.residual > 0.0);
    }
}

TEST_CASE("principal eigenpair meets its residual contract") {
    Grid g = make_grid(-1, 1, 512);
    DiscreteFracLap op = assemble(g, 0.25);
    Eigenpair eig = principal_eigenpair(op, 1e-10);
    CHECK(eig.residual_inf < 1e-10 * eig.lambda1);
    CHECK(min_value(eig.phi1) > 0.0);
    CHECK(max_value(eig.phi1) == doctest::Approx(1.0).epsilon(1e-15));

    double sym = 0.0;
    for (int i = 1; i <= g.n; ++i) {
        sym = std::max(sym, std::abs(eig.phi1[i - 1] - eig.phi1[g.n - i]));
    }
    CHECK(sym < 1e-10);
}

TEST_CASE("principal eigenpair matches the dense solver at n=96") {
    Grid g = make_grid(-1, 1, 96);
    DiscreteFracLap op = assemble(g, 0.4);
    Eigenpair eig = principal_eigenpair(op, 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(testutil::dense_matrix(op));
    CHECK(eig.lambda1 == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-8));

    // Rayleigh quotient of phi1 through the quadratic form reproduces lambda1
    double l2sq = 0.0;
    for (int i = 0; i < g.n; ++i) l2sq += eig.phi1[i] * eig.phi1[i];
    const double rq = quadratic_form(op, eig.phi1, eig.phi1) / (g.h * l2sq);
    CHECK(rq == doctest::Approx(eig.lambda1).epsilon(1e-8));
}

TEST_CASE("eigenpair start-vector invariance") {
    Grid g = make_grid(-1, 1, 128);
    DiscreteFracLap op = assemble(g, 0.3);
    std::mt19937 rng(21);
    FieldFunction s1 = testutil::random_field(g, rng);
    FieldFunction s2 = testutil::random_field(g, rng);
    for (int i = 0; i < g.n; ++i) {
        s1[i] = std::abs(s1[i]) + 0.1;
        s2[i] = std::abs(s2[i]) + 0.1;
    }
    Eigenpair a = principal_eigenpair(op, 1e-12, 400, &s1);
    Eigenpair b = principal_eigenpair(op, 1e-12, 400, &s2);
    double dev = 0.0;
    for (int i = 0; i < g.n; ++i) dev = std::max(dev, std::abs(a.phi1[i] - b.phi1[i]));
    CHECK(dev < 1e-8);
}

TEST_CASE("lambda1 rescales as L^{-2s} under dilation") {
    const double s = 0.3, L = 3.0;
    Eigenpair a = principal_eigenpair(assemble(make_grid(-1, 1, 128), s), 1e-12);
    Eigenpair b = principal_eigenpair(assemble(make_grid(-L, L, 128), s), 1e-12);
    CHECK(b.lambda1 == doctest::Approx(std::pow(L, -2.0 * s) * a.lambda1).epsilon(1e-10));
}

TEST_CASE("lambda1 bounds the Rayleigh quotient from below") {
    Grid g = make_grid(-1, 1, 128);
    DiscreteFracLap op = assemble(g, 0.25);
    Eigenpair eig = principal_eigenpair(op, 1e-12);
    std::mt19937 rng(33);
    for (int k = 0; k < 50; ++k) {
        FieldFunction u = testutil::random_field(g, rng);
        double l2sq = 0.0;
        for (int i = 0; i < g.n; ++i) l2sq += u[i] * u[i];
        CHECK(quadratic_form(op, u, u) >= eig.lambda1 * g.h * l2sq * (1.0 - 1e-9));
    }
}

TEST_CASE("embedding constant at p=2 is the inverse square root of lambda1") {
    Grid g = make_grid(-1, 1, 256);
    DiscreteFracLap op = assemble(g, 0.25);
    Eigenpair eig = principal_eigenpair(op, 1e-12);
    const double e2 = embedding_constant(op, 2.0);
    CHECK(std::abs(e2 * std::sqrt(eig.lambda1) - 1.0) < 1e-6);
}

TEST_CASE("embedding constant at p=1 obeys the Cauchy-Schwarz bound") {
    Grid g = make_grid(-1, 1, 192);
    DiscreteFracLap op = assemble(g, 0.3);
    Eigenpair eig = principal_eigenpair(op, 1e-12);
    const double e1 = embedding_constant(op, 1.0);
    CHECK(e1 <= std::sqrt(g.length()) / std::sqrt(eig.lambda1) * (1.0 + 1e-9));
}

TEST_CASE("critical embedding constant is stable between grids") {
    // s = 0.25 so the critical exponent is 4
    const double p = 4.0;
    const double a = embedding_constant(assemble(make_grid(-1, 1, 256), 0.25), p);
    const double b = embedding_constant(assemble(make_grid(-1, 1, 512), 0.25), p);
    CHECK(a > 0.0);
    CHECK(std::abs(a - b) / b < 0.10);
}
