#pragma once

#include <vector>

namespace tdgl {

// 1D Gauss-Legendre rule on [0,1]; weights sum to 1.
struct GaussRule1d {
    std::vector<double> points;
    std::vector<double> weights;
};

GaussRule1d gauss_legendre(int n);

// Quadrature rule on the reference triangle {0 <= x, 0 <= y, x + y <= 1}.
// Points are stored as barycentric-friendly (x, y); weights sum to 1/2 (the
// reference area). All points strictly interior, all weights positive --
// both matter here because some integrands are singular at mesh vertices.
struct TriangleRule {
    int degree = 0;
    std::vector<double> x, y, w;
    int size() const { return static_cast<int>(w.size()); }
};

// Conical-product (collapsed tensor Gauss-Legendre) rule exact for all
// polynomials up to `degree`.
TriangleRule triangle_rule(int degree);

// The two rules the solver uses: degree 6 for bilinear forms, degree 8 for
// source terms, energies and error norms.
const TriangleRule& tri_rule_forms();
const TriangleRule& tri_rule_source();

} // namespace tdgl
