#include "fracsemi/fraclap.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace fracsemi {

namespace kernel {

double i0(double a, double b, double s) {
    const double L = std::log(b / a);
    return -std::pow(a, -2.0 * s) * std::expm1(-2.0 * s * L) / (2.0 * s);
}

double i1(double a, double b, double s) {
    const double L = std::log(b / a);
    const double t = 1.0 - 2.0 * s;
    if (std::abs(t) < 1e-12) return std::pow(a, t) * L;
    return std::pow(a, t) * std::expm1(t * L) / t;
}

double i2(double a, double b, double s) {
    const double L = std::log(b / a);
    const double t = 2.0 - 2.0 * s;
    return std::pow(a, t) * std::expm1(t * L) / t;
}

}  // namespace kernel

double normalization_constant(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw std::domain_error("normalization_constant: s must lie in (0,1), got s=" +
                                std::to_string(s));
    }
    return std::pow(2.0, 2.0 * s) * s * std::tgamma(s + 0.5) /
           (std::sqrt(M_PI) * std::tgamma(1.0 - s));
}

double getoor_constant(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw std::domain_error("getoor_constant: s must lie in (0,1)");
    }
    return std::pow(2.0, 2.0 * s) * std::tgamma(1.0 + s) * std::tgamma(s + 0.5) /
           std::sqrt(M_PI);
}

namespace {

// Weight of the hat row: the element [a, a+h] seen from a node at distance a
// contributes j1 to the nearer node and j2 to the farther one.
double j1(double a, double b, double h, double s) {
    return (b * kernel::i0(a, b, s) - kernel::i1(a, b, s)) / h;
}
double j2(double a, double b, double h, double s) {
    return (kernel::i1(a, b, s) - a * kernel::i0(a, b, s)) / h;
}

}  // namespace

DiscreteFracLap assemble(const Grid& grid, double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw std::domain_error("assemble: s must lie in (0,1), got s=" + std::to_string(s));
    }
    const int n = grid.n;
    const double h = grid.h;
    const double c = normalization_constant(s);

    DiscreteFracLap op;
    op.grid = grid;
    op.s = s;
    op.c_ns = c;
    op.weights.resize(static_cast<size_t>(n - 1));
    op.diag.assign(static_cast<size_t>(n), 0.0);

    // singular window [x_i-h, x_i+h]: exact integral of the quadratic through
    // the three window nodes, i.e. a second difference times h^(-2s)/(2-2s)
    const double sigma = std::pow(h, -2.0 * s) / (2.0 - 2.0 * s);

    op.weights[0] = c * (sigma + j1(h, 2.0 * h, h, s));
    for (int m = 2; m <= n - 1; ++m) {
        op.weights[static_cast<size_t>(m - 1)] =
            c * (j2((m - 1) * h, m * h, h, s) + j1(m * h, (m + 1) * h, h, s));
    }

    // interior telescope + exterior tail cancel the boundary-distance terms,
    // leaving a constant diagonal
    const double d = c * std::pow(h, -2.0 * s) / (s * (1.0 - s));
    for (int i = 0; i < n; ++i) op.diag[static_cast<size_t>(i)] = d;

    std::vector<double> col(static_cast<size_t>(n), 0.0);
    for (int m = 1; m <= n - 1; ++m) col[static_cast<size_t>(m)] = op.weights[static_cast<size_t>(m - 1)];
    op.fast = std::make_shared<const ToeplitzConvolver>(col);

    return op;
}

double exterior_tail(const Grid& grid, double s, int i) {
    const double dl = grid.node(i) - grid.x_left;
    const double dr = grid.x_right - grid.node(i);
    return (std::pow(dl, -2.0 * s) + std::pow(dr, -2.0 * s)) / (2.0 * s);
}

FieldFunction apply(const DiscreteFracLap& op, const FieldFunction& u) {
    require_same_grid(op.grid, u.grid, "apply");
    const int n = op.grid.n;
    FieldFunction out = make_field(op.grid);
    if (op.fast) {
        op.fast->multiply(u.values.data(), out.values.data());
        for (int i = 0; i < n; ++i) {
            out[i] = op.diag[static_cast<size_t>(i)] * u[i] - out[i];
        }
        return out;
    }
    return apply_direct(op, u);
}

FieldFunction apply_direct(const DiscreteFracLap& op, const FieldFunction& u) {
    require_same_grid(op.grid, u.grid, "apply_direct");
    const int n = op.grid.n;
    FieldFunction out = make_field(op.grid);
    for (int i = 0; i < n; ++i) {
        double acc = op.diag[static_cast<size_t>(i)] * u[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            acc -= op.weights[static_cast<size_t>(std::abs(i - j) - 1)] * u[j];
        }
        out[i] = acc;
    }
    return out;
}

double quadratic_form(const DiscreteFracLap& op, const FieldFunction& u, const FieldFunction& v) {
    require_same_grid(op.grid, u.grid, "quadratic_form");
    require_same_grid(op.grid, v.grid, "quadratic_form");
    const FieldFunction au = apply(op, u);
    double acc = 0.0;
    for (int i = 0; i < op.grid.n; ++i) acc += v[i] * au[i];
    return op.grid.h * acc;
}

double a_norm(const DiscreteFracLap& op, const FieldFunction& u) {
    return std::sqrt(std::max(quadratic_form(op, u, u), 0.0));
}

namespace {
void put_f64(std::ofstream& out, double v) {
    static_assert(sizeof(double) == 8);
    // assumes a little-endian host, which is all this project targets
    out.write(reinterpret_cast<const char*>(&v), 8);
}
double get_f64(std::ifstream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
}  // namespace

void save_fraclap(const DiscreteFracLap& op, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_fraclap: cannot open " + path);
    out.write("FRACLAP1", 8);
    put_f64(out, op.s);
    put_f64(out, op.grid.x_left);
    put_f64(out, op.grid.x_right);
    put_f64(out, op.grid.h);
    put_f64(out, static_cast<double>(op.grid.n));
    for (double w : op.weights) put_f64(out, w);
    for (double d : op.diag) put_f64(out, d);
    if (!out) throw std::runtime_error("save_fraclap: write failed for " + path);
}

DiscreteFracLap load_fraclap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_fraclap: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "FRACLAP1", 8) != 0) {
        throw std::runtime_error("load_fraclap: bad header in " + path);
    }
    DiscreteFracLap op;
    op.s = get_f64(in);
    const double xl = get_f64(in);
    const double xr = get_f64(in);
    const double h = get_f64(in);
    const double nd = get_f64(in);
    const int n = static_cast<int>(nd);
    if (!in || n < 4 || nd != static_cast<double>(n)) {
        throw std::runtime_error("load_fraclap: corrupt grid block in " + path);
    }
    op.grid = make_grid(xl, xr, n);
    if (std::abs(op.grid.h - h) > 1e-15 * std::abs(h)) {
        throw std::runtime_error("load_fraclap: stored h inconsistent with bounds in " + path);
    }
    op.c_ns = normalization_constant(op.s);
    op.weights.resize(static_cast<size_t>(n - 1));
    for (double& w : op.weights) w = get_f64(in);
    op.diag.resize(static_cast<size_t>(n));
    for (double& d : op.diag) d = get_f64(in);
    if (!in) throw std::runtime_error("load_fraclap: truncated file " + path);

    std::vector<double> col(static_cast<size_t>(n), 0.0);
    for (int m = 1; m <= n - 1; ++m) col[static_cast<size_t>(m)] = op.weights[static_cast<size_t>(m - 1)];
    op.fast = std::make_shared<const ToeplitzConvolver>(col);
    return op;
}

}  // namespace fracsemi
