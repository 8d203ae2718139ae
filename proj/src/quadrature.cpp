#include "tdgl2d/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace tdgl {

// Nodes of the degree-n Legendre polynomial by Newton iteration, mapped to
// [0,1]. Standard construction; accurate to ~1e-15 for the sizes used here.
GaussRule1d gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussRule1d rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess on [-1,1].
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(t) and P'_n(t).
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        // Recompute P'_n at the converged node for the weight.
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        double w = 2.0 / ((1.0 - t * t) * dp * dp);
        rule.points[n - 1 - i] = 0.5 * (t + 1.0);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

// Collapsed tensor rule: map the unit square (u,v) to the triangle by
// x = u, y = v(1-u), with Jacobian (1-u). A polynomial of total degree d
// becomes degree <= d+1 in u (after the Jacobian) and <= d in v, so n points
// per direction with 2n-1 >= d+1 suffice.
TriangleRule triangle_rule(int degree) {
    int n = (degree + 2 + 1) / 2; // ceil((degree+2)/2)
    GaussRule1d g = gauss_legendre(n);
    TriangleRule rule;
    rule.degree = degree;
    rule.x.reserve(n * n);
    rule.y.reserve(n * n);
    rule.w.reserve(n * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double u = g.points[i], v = g.points[j];
            rule.x.push_back(u);
            rule.y.push_back(v * (1.0 - u));
            rule.w.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
        }
    }
    return rule;
}

const TriangleRule& tri_rule_forms() {
    static const TriangleRule rule = triangle_rule(6);
    return rule;
}

const TriangleRule& tri_rule_source() {
    static const TriangleRule rule = triangle_rule(8);
    return rule;
}

} // namespace tdgl
