#include "fracsemi/grid.hpp"

#include <cmath>
#include <string>

namespace fracsemi {

Grid make_grid(double x_left, double x_right, int n) {
    if (!(x_left < x_right) || !std::isfinite(x_left) || !std::isfinite(x_right)) {
        throw ConfigError("make_grid: need x_left < x_right, got [" +
                          std::to_string(x_left) + ", " + std::to_string(x_right) + "]");
    }
    if (n < 4) {
        throw ConfigError("make_grid: need n >= 4 interior nodes, got n=" + std::to_string(n));
    }
    Grid g;
    g.x_left = x_left;
    g.x_right = x_right;
    g.n = n;
    g.h = (x_right - x_left) / (n + 1);
    return g;
}

FieldFunction make_field(const Grid& grid, double fill) {
    return FieldFunction{grid, std::vector<double>(static_cast<size_t>(grid.n), fill)};
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) {
        throw GridMismatchError(std::string(where) + ": grid mismatch");
    }
}

void require_finite(const FieldFunction& u, const char* where) {
    for (double v : u.values) {
        if (!std::isfinite(v)) {
            throw ConfigError(std::string(where) + ": field contains a non-finite value");
        }
    }
}

double sup_norm(const FieldFunction& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
}

double min_value(const FieldFunction& u) {
    double m = u.values.empty() ? 0.0 : u.values.front();
    for (double v : u.values) m = std::min(m, v);
    return m;
}

double max_value(const FieldFunction& u) {
    double m = u.values.empty() ? 0.0 : u.values.front();
    for (double v : u.values) m = std::max(m, v);
    return m;
}

double lp_norm(const FieldFunction& u, double p) {
    if (!(p >= 1.0)) {
        throw std::domain_error("lp_norm: need p >= 1, got p=" + std::to_string(p));
    }
    double acc = 0.0;
    for (double v : u.values) acc += std::pow(std::abs(v), p);
    return std::pow(u.grid.h * acc, 1.0 / p);
}

double boundary_decay_exponent(const FieldFunction& u, double fraction) {
    if (!(fraction > 0.0 && fraction <= 0.2)) {
        throw std::domain_error("boundary_decay_exponent: fraction must lie in (0, 0.2]");
    }
    const Grid& g = u.grid;
    const double cut = fraction * g.half_width();

    std::vector<int> sample;
    for (int i = 1; i <= g.n; ++i) {
        if (i == 1 || i == g.n) continue;  // first node each side carries the most scheme error
        if (g.boundary_distance(i) <= cut) sample.push_back(i);
    }
    if (sample.size() < 2) {
        throw std::domain_error("boundary_decay_exponent: fit window holds fewer than 2 nodes; "
                                "grid too coarse for fraction=" + std::to_string(fraction));
    }
    for (int i : sample) {
        if (!(u[i - 1] > 0.0)) {
            throw ConsistencyError("boundary_decay_exponent: nonpositive value in fit window, "
                                   "first offending node i=" + std::to_string(i) +
                                   " (x=" + std::to_string(g.node(i)) + ")");
        }
    }

    // least squares for log u = a + b log d
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto m = static_cast<double>(sample.size());
    for (int i : sample) {
        const double x = std::log(g.boundary_distance(i));
        const double y = std::log(u[i - 1]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace fracsemi
