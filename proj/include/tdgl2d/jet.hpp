#pragma once

#include <cmath>

namespace tdgl {

// Second-order spatial jet with a first-order time slot: carries a value, its
// spatial gradient and Hessian, and the first time derivative of the value.
// Products and chain rules propagate all slots, so composite expressions give
// the exact derivatives of the composite function (no truncation error).
struct Jet2 {
    double v = 0.0;
    double gx = 0.0, gy = 0.0;
    double hxx = 0.0, hxy = 0.0, hyy = 0.0;
    double vt = 0.0;

    Jet2() = default;
    explicit Jet2(double value) : v(value) {}

    Jet2 operator-() const { return {-v, -gx, -gy, -hxx, -hxy, -hyy, -vt}; }

  private:
    Jet2(double v_, double gx_, double gy_, double hxx_, double hxy_, double hyy_, double vt_)
        : v(v_), gx(gx_), gy(gy_), hxx(hxx_), hxy(hxy_), hyy(hyy_), vt(vt_) {}

    friend Jet2 operator+(const Jet2& a, const Jet2& b) {
        return {a.v + b.v,     a.gx + b.gx,   a.gy + b.gy, a.hxx + b.hxx,
                a.hxy + b.hxy, a.hyy + b.hyy, a.vt + b.vt};
    }
    friend Jet2 operator-(const Jet2& a, const Jet2& b) {
        return {a.v - b.v,     a.gx - b.gx,   a.gy - b.gy, a.hxx - b.hxx,
                a.hxy - b.hxy, a.hyy - b.hyy, a.vt - b.vt};
    }
    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        return {a.v * b.v,
                a.gx * b.v + a.v * b.gx,
                a.gy * b.v + a.v * b.gy,
                a.hxx * b.v + 2.0 * a.gx * b.gx + a.v * b.hxx,
                a.hxy * b.v + a.gx * b.gy + a.gy * b.gx + a.v * b.hxy,
                a.hyy * b.v + 2.0 * a.gy * b.gy + a.v * b.hyy,
                a.vt * b.v + a.v * b.vt};
    }
    friend Jet2 operator*(double s, const Jet2& a) {
        return {s * a.v, s * a.gx, s * a.gy, s * a.hxx, s * a.hxy, s * a.hyy, s * a.vt};
    }
    friend Jet2 operator*(const Jet2& a, double s) { return s * a; }

  public:
    // Composition u(f) for a scalar function with value/first/second
    // derivative u0, u1, u2 at f.v.
    static Jet2 chain(const Jet2& f, double u0, double u1, double u2) {
        return {u0,
                u1 * f.gx,
                u1 * f.gy,
                u2 * f.gx * f.gx + u1 * f.hxx,
                u2 * f.gx * f.gy + u1 * f.hxy,
                u2 * f.gy * f.gy + u1 * f.hyy,
                u1 * f.vt};
    }

    // Pure time factor T(t): multiplying by it attaches time dependence to a
    // spatial jet via the product rule.
    static Jet2 time_factor(double value, double dvalue_dt) {
        return {value, 0.0, 0.0, 0.0, 0.0, 0.0, dvalue_dt};
    }

    double laplacian() const { return hxx + hyy; }
};

// Jets of the polar coordinates r(x, y) and theta(x, y). theta_jet uses the
// branch with values in [0, 2 pi): atan2 shifted by 2 pi when negative, so it
// is smooth across the negative x-axis and has its cut along the positive
// x-axis (which suits domains that exclude the fourth quadrant).
inline Jet2 r_jet(double x, double y) {
    const double r = std::hypot(x, y);
    Jet2 j;
    j.v = r;
    const double r3 = r * r * r;
    j.gx = x / r;
    j.gy = y / r;
    j.hxx = y * y / r3;
    j.hxy = -x * y / r3;
    j.hyy = x * x / r3;
    return j;
}

inline Jet2 theta_jet(double x, double y) {
    double th = std::atan2(y, x);
    if (th < 0.0) th += 2.0 * M_PI;
    const double r2 = x * x + y * y;
    const double r4 = r2 * r2;
    Jet2 j;
    j.v = th;
    j.gx = -y / r2;
    j.gy = x / r2;
    j.hxx = 2.0 * x * y / r4;
    j.hxy = (y * y - x * x) / r4;
    j.hyy = -2.0 * x * y / r4;
    return j;
}

// r^p as a jet (r > 0).
inline Jet2 pow_jet(const Jet2& r, double p) {
    const double f = std::pow(r.v, p);
    return Jet2::chain(r, f, p * f / r.v, p * (p - 1.0) * f / (r.v * r.v));
}

inline Jet2 cos_jet(const Jet2& a, double freq) {
    const double c = std::cos(freq * a.v), s = std::sin(freq * a.v);
    return Jet2::chain(a, c, -freq * s, -freq * freq * c);
}

inline Jet2 sin_jet(const Jet2& a, double freq) {
    const double c = std::cos(freq * a.v), s = std::sin(freq * a.v);
    return Jet2::chain(a, s, freq * c, -freq * freq * s);
}

} // namespace tdgl
