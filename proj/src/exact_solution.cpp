#include "tdgl2d/exact_solution.hpp"

#include "tdgl2d/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace tdgl {

namespace {
constexpr double kOriginGuard = 1e-14;
}

Upsilon build_upsilon(double r0, double r1, double plateau) {
    // Hermite conditions in s = (r - r0) / (r1 - r0) for P(s) = sum c_k s^k:
    //   P(0) = plateau, P'(0) = P''(0) = P'''(0) = 0,
    //   P(1) = P'(1) = P''(1) = P'''(1) = 0.
    Eigen::Matrix<double, 8, 8> m = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> rhs = Eigen::Matrix<double, 8, 1>::Zero();
    for (int d = 0; d < 4; ++d) {
        double fall = 1.0;
        for (int k = 0; k < d; ++k) fall *= static_cast<double>(d - k);
        m(d, d) = fall; // d-th derivative at s = 0 hits only c_d
        for (int k = d; k < 8; ++k) {
            double f = 1.0;
            for (int j = 0; j < d; ++j) f *= static_cast<double>(k - j);
            m(4 + d, k) = f; // d-th derivative at s = 1
        }
    }
    rhs(0) = plateau;

    Upsilon u;
    u.r0 = r0;
    u.r1 = r1;
    u.plateau = plateau;
    Eigen::Matrix<double, 8, 1> c = m.fullPivLu().solve(rhs);
    for (int k = 0; k < 8; ++k) u.coef[static_cast<size_t>(k)] = c(k);
    return u;
}

double Upsilon::value(double r) const {
    const double s = (r - r0) / (r1 - r0);
    double acc = 0.0;
    for (int k = 7; k >= 0; --k) acc = acc * s + coef[static_cast<size_t>(k)];
    return acc;
}

double Upsilon::d1(double r) const {
    const double len = r1 - r0;
    const double s = (r - r0) / len;
    double acc = 0.0;
    for (int k = 7; k >= 1; --k) acc = acc * s + k * coef[static_cast<size_t>(k)];
    return acc / len;
}

double Upsilon::d2(double r) const {
    const double len = r1 - r0;
    const double s = (r - r0) / len;
    double acc = 0.0;
    for (int k = 7; k >= 2; --k) acc = acc * s + k * (k - 1) * coef[static_cast<size_t>(k)];
    return acc / (len * len);
}

double Upsilon::d3(double r) const {
    const double len = r1 - r0;
    const double s = (r - r0) / len;
    double acc = 0.0;
    for (int k = 7; k >= 3; --k)
        acc = acc * s + k * (k - 1) * (k - 2) * coef[static_cast<size_t>(k)];
    return acc / (len * len * len);
}

void RadialEnvelope::eval(double r, double* f, double* f1, double* f2, double* f3) const {
    double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
    if (r <= bridge.r0) {
        v = bridge.plateau;
    } else if (r < bridge.r1) {
        v = bridge.value(r);
        d1 = bridge.d1(r);
        d2 = bridge.d2(r);
        d3 = bridge.d3(r);
    }
    if (f) *f = v;
    if (f1) *f1 = d1;
    if (f2) *f2 = d2;
    if (f3) *f3 = d3;
}

ExactSolution::ExactSolution(double eta, double kappa) : eta_(eta), kappa_(kappa) {
    env_.bridge = build_upsilon();
}

Jet2 ExactSolution::psi(Vec2 x, double t) const {
    const double r = x.norm();
    if (r < kOriginGuard) return Jet2();
    const Jet2 rj = r_jet(x.x(), x.y());
    const Jet2 thj = theta_jet(x.x(), x.y());
    double f, f1, f2;
    env_.eval(r, &f, &f1, &f2, nullptr);
    const Jet2 phi_j = Jet2::chain(rj, f, f1, f2);
    const Jet2 spatial = phi_j * pow_jet(rj, 2.0 / 3.0) * cos_jet(thj, 2.0 / 3.0);
    return spatial * Jet2::time_factor(t * t, 2.0 * t);
}

void ExactSolution::radial_a(double r, double* s, double* s1, double* s2) const {
    double f, f1, f2, f3;
    env_.eval(r, &f, &f1, &f2, &f3);
    const double rm13 = std::pow(r, -1.0 / 3.0);
    const double rm43 = rm13 / r;
    const double rm73 = rm43 / r;
    const double rp23 = rm13 * r;
    if (s) *s = (4.0 / 3.0) * f * rm13 + f1 * rp23;
    if (s1) *s1 = 2.0 * f1 * rm13 - (4.0 / 9.0) * f * rm43 + f2 * rp23;
    if (s2)
        *s2 = (8.0 / 3.0) * f2 * rm13 - (10.0 / 9.0) * f1 * rm43 + (16.0 / 27.0) * f * rm73 +
              f3 * rp23;
}

void ExactSolution::vector_potential(Vec2 x, double t, Jet2* ax, Jet2* ay) const {
    const double r = x.norm();
    if (r < kOriginGuard || r >= env_.bridge.r1) {
        if (ax) *ax = Jet2();
        if (ay) *ay = Jet2();
        return;
    }
    const Jet2 rj = r_jet(x.x(), x.y());
    const Jet2 thj = theta_jet(x.x(), x.y());
    double s, s1, s2;
    radial_a(r, &s, &s1, &s2);
    const Jet2 sj = Jet2::chain(rj, s, s1, s2);
    const Jet2 tf = Jet2::time_factor(t * t, 2.0 * t);
    if (ax) *ax = sj * cos_jet(thj, 1.0 / 3.0) * tf;
    if (ay) *ay = sj * sin_jet(thj, 1.0 / 3.0) * tf;
}

double ExactSolution::applied_field(Vec2 x, double t) const {
    const double r = x.norm();
    if (r < kOriginGuard || r <= env_.bridge.r0 || r >= env_.bridge.r1) return 0.0;
    double s, s1;
    radial_a(r, &s, &s1, nullptr);
    const double q = s1 + s / (3.0 * r);
    double th = std::atan2(x.y(), x.x());
    if (th < 0.0) th += 2.0 * M_PI;
    return -t * t * q * std::sin(2.0 * th / 3.0);
}

Vec2 ExactSolution::grad_applied_field(Vec2 x, double t) const {
    const double r = x.norm();
    if (r < kOriginGuard || r <= env_.bridge.r0 || r >= env_.bridge.r1) return Vec2(0.0, 0.0);
    double s, s1, s2;
    radial_a(r, &s, &s1, &s2);
    const double q = s1 + s / (3.0 * r);
    const double qp = s2 + s1 / (3.0 * r) - s / (3.0 * r * r);
    double th = std::atan2(x.y(), x.x());
    if (th < 0.0) th += 2.0 * M_PI;
    const double sn = std::sin(2.0 * th / 3.0), cs = std::cos(2.0 * th / 3.0);
    const Vec2 grad_r(x.x() / r, x.y() / r);
    const Vec2 grad_th(-x.y() / (r * r), x.x() / (r * r));
    return -t * t * (qp * sn * grad_r + q * cs * (2.0 / 3.0) * grad_th);
}

Vec2 ExactSolution::curl_curl_from_jets(Vec2 x, double t) const {
    Jet2 ax, ay;
    vector_potential(x, t, &ax, &ay);
    const double c_gx = ay.hxx - ax.hxy;
    const double c_gy = ay.hxy - ax.hyy;
    return Vec2(c_gy, -c_gx);
}

double ExactSolution::phi(Vec2 x, double t) const {
    Jet2 ax, ay;
    vector_potential(x, t, &ax, &ay);
    return -(ax.gx + ay.gy);
}

Complex ExactSolution::source_psi(Vec2 x, double t) const {
    const double r = x.norm();
    if (r < kOriginGuard) return Complex(0.0, 0.0);
    const Jet2 p = psi(x, t);
    Jet2 ax, ay;
    vector_potential(x, t, &ax, &ay);
    const double div_a = ax.gx + ay.gy;
    const double a_dot_grad = ax.v * p.gx + ay.v * p.gy;
    const double a2 = ax.v * ax.v + ay.v * ay.v;
    const double g_re =
        eta_ * p.vt - p.laplacian() / (kappa_ * kappa_) + a2 * p.v + (p.v * p.v - 1.0) * p.v;
    const double g_im =
        (1.0 / kappa_ - eta_ * kappa_) * div_a * p.v + (2.0 / kappa_) * a_dot_grad;
    return Complex(g_re, g_im);
}

Vec2 ExactSolution::source_vector(Vec2 x, double t) const {
    const double r = x.norm();
    if (r < kOriginGuard) return Vec2(0.0, 0.0);
    const Jet2 p = psi(x, t);
    Jet2 ax, ay;
    vector_potential(x, t, &ax, &ay);
    const Vec2 dt_a(ax.vt, ay.vt);
    const Vec2 grad_div(ax.hxx + ay.hxy, ax.hxy + ay.hyy);
    const Vec2 cca = curl_curl_from_jets(x, t);
    const Vec2 gh = grad_applied_field(x, t);
    const Vec2 rot_h(gh.y(), -gh.x());
    const Vec2 current = p.v * p.v * Vec2(ax.v, ay.v); // psi is real valued
    return dt_a - grad_div + cca - rot_h + current;
}

std::function<double(Vec2)> ExactSolution::applied_field_at(double t) const {
    return [this, t](Vec2 x) { return applied_field(x, t); };
}

std::function<Complex(Vec2)> ExactSolution::source_psi_at(double t) const {
    return [this, t](Vec2 x) { return source_psi(x, t); };
}

std::function<Vec2(Vec2)> ExactSolution::source_vector_at(double t) const {
    return [this, t](Vec2 x) { return source_vector(x, t); };
}

ErrorNorms compute_errors_vs(const FeSystem& sys, const ReferenceFields& ref, const Vec& psi,
                             const AField& a, const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_source();

    struct Acc {
        double psi = 0.0, abs_psi = 0.0, a = 0.0, b = 0.0;
    };
    auto parts = chunked_map<Acc>(mesh.n_triangles(), pol, [&](Acc& acc, int begin, int end) {
        for (int tix = begin; tix < end; ++tix) {
            const auto& tri = mesh.triangles[tix];
            const double area = sys.area[tix];
            const double curl_h = a.curl_at(tix);
            for (int q = 0; q < rule.size(); ++q) {
                const double lambda[3] = {1.0 - rule.x[q] - rule.y[q],
                                          rule.x[q], rule.y[q]};
                const double w = 2.0 * area * rule.w[q];
                const Vec2 x = sys.ref_to_phys(tix, lambda[1], lambda[2]);

                double ph = 0.0, qh = 0.0;
                for (int i = 0; i < 3; ++i) {
                    ph += lambda[i] * psi[2 * tri[i]];
                    qh += lambda[i] * psi[2 * tri[i] + 1];
                }
                const Complex pe = ref.psi(x);
                const double dre = ph - pe.real(), dim = qh - pe.imag();
                acc.psi += w * (dre * dre + dim * dim);
                const double dabs = std::hypot(ph, qh) - std::abs(pe);
                acc.abs_psi += w * dabs * dabs;

                acc.a += w * (a.at(tix, lambda) - ref.a(x)).squaredNorm();
                const double dcurl = curl_h - ref.curl_a(x);
                acc.b += w * dcurl * dcurl;
            }
        }
    });

    Acc total;
    for (const auto& p : parts) {
        total.psi += p.psi;
        total.abs_psi += p.abs_psi;
        total.a += p.a;
        total.b += p.b;
    }
    ErrorNorms out;
    out.psi = std::sqrt(total.psi);
    out.abs_psi = std::sqrt(total.abs_psi);
    out.a = std::sqrt(total.a);
    out.b = std::sqrt(total.b);
    return out;
}

ErrorNorms compute_errors(const FeSystem& sys, const ExactSolution& exact, const Vec& psi,
                          const AField& a, double t, const ExecPolicy& pol) {
    ReferenceFields ref;
    ref.psi = [&exact, t](Vec2 x) { return Complex(exact.psi(x, t).v, 0.0); };
    ref.a = [&exact, t](Vec2 x) {
        Jet2 ax, ay;
        exact.vector_potential(x, t, &ax, &ay);
        return Vec2(ax.v, ay.v);
    };
    ref.curl_a = [&exact, t](Vec2 x) { return exact.applied_field(x, t); };
    return compute_errors_vs(sys, ref, psi, a, pol);
}

} // namespace tdgl
