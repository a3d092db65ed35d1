#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracsemi/errors.hpp"

namespace fracsemi {

// Uniform interior-node mesh of the interval (x_left, x_right). The n interior
// nodes sit at x_i = x_left + i*h, i = 1..n, with h = (x_right - x_left)/(n+1).
// Functions carried on the grid are implicitly zero at the two boundary nodes
// and on the whole exterior of the interval.
struct Grid {
    double x_left = 0.0;
    double x_right = 0.0;
    int n = 0;
    double h = 0.0;

    double node(int i) const { return x_left + i * h; }  // i is 1-based
    double boundary_distance(int i) const {
        return std::min(node(i) - x_left, x_right - node(i));
    }
    double length() const { return x_right - x_left; }
    double half_width() const { return 0.5 * (x_right - x_left); }

    bool operator==(const Grid&) const = default;
};

Grid make_grid(double x_left, double x_right, int n);

// Real values at the interior nodes of a grid; identically zero outside.
struct FieldFunction {
    Grid grid;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

FieldFunction make_field(const Grid& grid, double fill = 0.0);

void require_same_grid(const Grid& a, const Grid& b, const char* where);
void require_finite(const FieldFunction& u, const char* where);

double sup_norm(const FieldFunction& u);
double min_value(const FieldFunction& u);
double max_value(const FieldFunction& u);

// Discrete L^p norm (h * sum |u_i|^p)^(1/p); boundary values are zero so the
// plain rectangle sum over interior nodes is the whole quadrature.
double lp_norm(const FieldFunction& u, double p);

// Least-squares slope of log u_i against log d(x_i) over the nodes with
// d(x_i) <= fraction * half_width on each side, excluding the single node
// adjacent to each endpoint. Requires u > 0 on the sampled nodes.
double boundary_decay_exponent(const FieldFunction& u, double fraction = 0.05);

}  // namespace fracsemi
