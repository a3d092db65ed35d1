#pragma once

#include <Eigen/Dense>

#include <random>

#include "fracsemi/fraclap.hpp"
#include "fracsemi/grid.hpp"

namespace testutil {

inline fracsemi::FieldFunction random_field(const fracsemi::Grid& g, std::mt19937& rng,
                                            double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    fracsemi::FieldFunction u = fracsemi::make_field(g);
    for (int i = 0; i < g.n; ++i) u[i] = scale * gauss(rng);
    return u;
}

inline Eigen::MatrixXd dense_matrix(const fracsemi::DiscreteFracLap& op) {
    const int n = op.grid.n;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = (i == j) ? op.diag[static_cast<size_t>(i)]
                               : -op.weights[static_cast<size_t>(std::abs(i - j) - 1)];
        }
    }
    return a;
}

}  // namespace testutil
