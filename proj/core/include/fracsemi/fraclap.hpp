#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fracsemi/fastconv.hpp"
#include "fracsemi/grid.hpp"

namespace fracsemi {

// Primitive kernel integrals used by the assembly and by the direct quadrature
// of h(x). All assume 0 < a < b and s in (0,1); the expm1 forms stay accurate
// when the exponent crosses zero (s near 1/2) or s is tiny.
namespace kernel {
// int_a^b z^(-1-2s) dz
double i0(double a, double b, double s);
// int_a^b z^(-2s) dz
double i1(double a, double b, double s);
// int_a^b z^(1-2s) dz
double i2(double a, double b, double s);
}  // namespace kernel

// Normalization constant of the 1-D integral fractional Laplacian,
// C(1,s) = 2^(2s) s Gamma(s+1/2) / (sqrt(pi) Gamma(1-s)).
double normalization_constant(double s);

// Constant value of the operator applied to (1-x^2)^s_+ on (-1,1),
// 2^(2s) Gamma(1+s) Gamma(s+1/2) / sqrt(pi). Used as a closed-form oracle.
double getoor_constant(double s);

// Symmetric positive-definite discretization of the operator with exterior
// zero condition. A_ij = -weights[|i-j|-1] off the diagonal, A_ii = diag[i-1].
// Rows integrate the kernel exactly against the piecewise-linear interpolant
// away from the diagonal; the two elements around the singularity collapse to
// a second-difference term, and the exterior tail enters the diagonal in
// closed form. Everything carries the c_ns factor already.
struct DiscreteFracLap {
    Grid grid;
    double s = 0.0;
    double c_ns = 0.0;
    std::vector<double> weights;  // w_1 .. w_{n-1}
    std::vector<double> diag;     // n entries (constant for this scheme)
    std::shared_ptr<const ToeplitzConvolver> fast;

    double weight(int m) const { return weights[static_cast<size_t>(m - 1)]; }
};

DiscreteFracLap assemble(const Grid& grid, double s);

// Exterior-tail integral of row i: int_{y outside the interval} |x_i-y|^(-1-2s) dy
// (without the c_ns factor).
double exterior_tail(const Grid& grid, double s, int i);

// A*u. Uses the convolution path when available; apply_direct is the O(n^2)
// reference the fast path is tested against.
FieldFunction apply(const DiscreteFracLap& op, const FieldFunction& u);
FieldFunction apply_direct(const DiscreteFracLap& op, const FieldFunction& u);

// h * v' A u; the induced norm sqrt(h u'Au) is the energy norm of the model.
double quadratic_form(const DiscreteFracLap& op, const FieldFunction& u, const FieldFunction& v);
double a_norm(const DiscreteFracLap& op, const FieldFunction& u);

// Binary cache: "FRACLAP1" header then little-endian 64-bit floats in the
// order s, x_left, x_right, h, n, weights, diag.
void save_fraclap(const DiscreteFracLap& op, const std::string& path);
DiscreteFracLap load_fraclap(const std::string& path);

}  // namespace fracsemi
