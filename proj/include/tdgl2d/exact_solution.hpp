#pragma once

#include "tdgl2d/assembly.hpp"
#include "tdgl2d/fe_system.hpp"
#include "tdgl2d/jet.hpp"

#include <array>
#include <functional>

namespace tdgl {

// Septic bridge joining a constant plateau at r0 to zero at r1 with three
// matched derivatives at both ends (a C^3 partition-of-unity profile). The
// Hermite system is solved, and the coefficients stored, in the shifted
// variable s = (r - r0) / (r1 - r0), where it is well conditioned; evaluation
// is a Horner pass in s.
struct Upsilon {
    double r0 = 0.1, r1 = 0.4, plateau = 0.1;
    std::array<double, 8> coef{}; // monomial coefficients in s

    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;
    double d3(double r) const;
};

Upsilon build_upsilon(double r0 = 0.1, double r1 = 0.4, double plateau = 0.1);

// Radial envelope used by the benchmark solution: plateau for r <= r0, the
// bridge on [r0, r1], identically zero beyond r1.
struct RadialEnvelope {
    Upsilon bridge;
    void eval(double r, double* f, double* f1, double* f2, double* f3) const;
};

struct ErrorNorms {
    double psi = 0.0;     // || psi_h - psi ||_{L^2}
    double abs_psi = 0.0; // || |psi_h| - |psi| ||_{L^2}
    double a = 0.0;       // || A_h - A ||_{L^2}
    double b = 0.0;       // || curl A_h - curl A ||_{L^2}
};

// Benchmark solution on sector domains with the reentrant corner at the
// origin (interior angle 3 pi / 2):
//
//   psi(r, theta, t) = t^2 Phi(r) r^{2/3} cos(2 theta / 3)        (real valued)
//   A(r, theta, t)   = t^2 S(r) (cos(theta / 3), sin(theta / 3)),
//   S = (4/3) Phi r^{-1/3} + Phi' r^{2/3},
//
// with Phi the radial envelope. Inside the plateau psi is harmonic and A is
// divergence- and curl-free; everything vanishes outside r1, so the natural
// boundary conditions A.n = 0 and dpsi/dn = 0 hold exactly. The applied field
// is H = curl A, supported in the bridge annulus. Sources g and g_vec are
// whatever the time-dependent Ginzburg-Landau system leaves over, evaluated
// with exact derivatives via jets.
class ExactSolution {
  public:
    ExactSolution(double eta = 1.0, double kappa = 1.0);

    double eta() const { return eta_; }
    double kappa() const { return kappa_; }

    Jet2 psi(Vec2 x, double t) const; // imaginary part is identically zero
    void vector_potential(Vec2 x, double t, Jet2* ax, Jet2* ay) const;

    // H = curl A in closed polar form (independent of the Cartesian jets).
    double applied_field(Vec2 x, double t) const;
    Vec2 grad_applied_field(Vec2 x, double t) const;

    // curl curl A assembled from the Cartesian second-derivative jets of A;
    // must match the rotated gradient of applied_field.
    Vec2 curl_curl_from_jets(Vec2 x, double t) const;

    double phi(Vec2 x, double t) const; // electric potential -div A

    Complex source_psi(Vec2 x, double t) const;
    Vec2 source_vector(Vec2 x, double t) const;

    std::function<double(Vec2)> applied_field_at(double t) const;
    std::function<Complex(Vec2)> source_psi_at(double t) const;
    std::function<Vec2(Vec2)> source_vector_at(double t) const;

    const RadialEnvelope& envelope() const { return env_; }

    // S(r) and its first two derivatives (radial magnitude of A / t^2).
    void radial_a(double r, double* s, double* s1, double* s2) const;

  private:
    double eta_, kappa_;
    RadialEnvelope env_;
};

// Reference fields for error measurement; any L^2-integrable evaluators work.
struct ReferenceFields {
    std::function<Complex(Vec2)> psi;
    std::function<Vec2(Vec2)> a;
    std::function<double(Vec2)> curl_a;
};

// L^2 errors of a discrete state against arbitrary reference fields.
ErrorNorms compute_errors_vs(const FeSystem& sys, const ReferenceFields& ref, const Vec& psi,
                             const AField& a, const ExecPolicy& pol = {});

// L^2 errors of a discrete state against the benchmark solution at time t.
ErrorNorms compute_errors(const FeSystem& sys, const ExactSolution& exact, const Vec& psi,
                          const AField& a, double t, const ExecPolicy& pol = {});

} // namespace tdgl
