#pragma once

#include "tdgl2d/fe_system.hpp"

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#ifdef TDGL_HAVE_OPENMP
#include <omp.h>
#endif

namespace tdgl {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Element loops run over fixed-size chunks whose partial results are combined
// in chunk order, so the parallel path is bit-identical to the serial
// reference. `parallel = false` is the single-threaded reference mode and the
// test default.
struct ExecPolicy {
    bool parallel = false;
    int chunk = 512;
};

// Apply `fn(partial, begin, end)` over chunks of [0, n) and return the
// partials in chunk order.
template <class Partial, class ChunkFn>
std::vector<Partial> chunked_map(int n, const ExecPolicy& pol, ChunkFn&& fn) {
    const int chunk = std::max(1, pol.chunk);
    const int n_chunks = (n + chunk - 1) / chunk;
    std::vector<Partial> parts(static_cast<size_t>(std::max(n_chunks, 0)));
#ifdef TDGL_HAVE_OPENMP
    if (pol.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int c = 0; c < n_chunks; ++c)
            fn(parts[c], c * chunk, std::min(n, (c + 1) * chunk));
        return parts;
    }
#endif
    for (int c = 0; c < n_chunks; ++c)
        fn(parts[c], c * chunk, std::min(n, (c + 1) * chunk));
    return parts;
}

// Ordered reduction of per-chunk scalar accumulators.
template <class ChunkFn>
double chunked_sum(int n, const ExecPolicy& pol, ChunkFn&& fn) {
    auto parts = chunked_map<double>(n, pol, [&](double& acc, int b, int e) {
        acc = 0.0;
        fn(acc, b, e);
    });
    double s = 0.0;
    for (double p : parts) s += p;
    return s;
}

SpMat matrix_from_chunks(int rows, int cols, const std::vector<std::vector<Triplet>>& parts);
void vector_from_chunks(Vec& out, const std::vector<std::vector<std::pair<int, double>>>& parts);

double max_asymmetry(const SpMat& m);

// Embed a real scalar-space matrix into the interleaved complex layout:
// entry m_ij becomes the 2x2 block [[m,0],[0,m]] at (2i,2j).
SpMat complex_blocks(const SpMat& m);

// ---------------------------------------------------------------------------
// Static forms.

struct StaticForms {
    SpMat M_S, K_S;    // scalar P1 mass / stiffness
    SpMat M_V, K_V;    // potential-space mass / stiffness (same P1 vertex basis)
    SpMat M_N, K_curl; // edge mass / curl-curl
    SpMat B_div;       // n_V x n_N, entries (w_e, grad chi)
    SpMat G;           // n_N x n_V, edge-interpolated gradient (+-1 endpoint pattern)
    SpMat C;           // n_tri x n_N, elementwise scalar curl values
};

StaticForms assemble_static(const FeSystem& sys, const ExecPolicy& pol = {});

// ---------------------------------------------------------------------------
// Field views used by the nonlinear terms. They abstract over where the
// magnetic potential lives (edge elements vs. the baseline nodal space).

class AField {
  public:
    virtual ~AField() = default;
    virtual Vec2 at(int tri, const double lambda[3]) const = 0;
    // Elementwise-constant divergence where available (nodal baseline);
    // edge-element fields have no pointwise divergence and return 0.
    virtual double div_at(int /*tri*/) const { return 0.0; }
    virtual double curl_at(int tri) const = 0;
};

class ZeroAField final : public AField {
  public:
    Vec2 at(int, const double[3]) const override { return Vec2(0.0, 0.0); }
    double curl_at(int) const override { return 0.0; }
};

// Whitney expansion of an edge-dof vector.
class EdgeAField final : public AField {
  public:
    EdgeAField(const FeSystem& sys, const Vec& coeffs) : sys_(sys), coeffs_(coeffs) {}
    Vec2 at(int tri, const double lambda[3]) const override {
        Vec2 w[3];
        sys_.whitney(tri, lambda, w);
        Vec2 out(0.0, 0.0);
        for (int k = 0; k < 3; ++k) out += coeffs_[sys_.mesh.tri_edges[tri][k]] * w[k];
        return out;
    }
    double curl_at(int tri) const override {
        double out = 0.0;
        for (int k = 0; k < 3; ++k)
            out += coeffs_[sys_.mesh.tri_edges[tri][k]] * sys_.whitney_curl(tri, k);
        return out;
    }

  private:
    const FeSystem& sys_;
    const Vec& coeffs_;
};

// P1 vector field with interleaved (x,y) vertex dofs (baseline space).
class NodalAField final : public AField {
  public:
    NodalAField(const FeSystem& sys, const Vec& coeffs) : sys_(sys), coeffs_(coeffs) {}
    Vec2 at(int tri, const double lambda[3]) const override {
        const auto& t = sys_.mesh.triangles[tri];
        Vec2 out(0.0, 0.0);
        for (int i = 0; i < 3; ++i)
            out += lambda[i] * Vec2(coeffs_[2 * t[i]], coeffs_[2 * t[i] + 1]);
        return out;
    }
    double div_at(int tri) const override {
        const auto& t = sys_.mesh.triangles[tri];
        double d = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Vec2& g = sys_.grad_lambda[tri][i];
            d += coeffs_[2 * t[i]] * g.x() + coeffs_[2 * t[i] + 1] * g.y();
        }
        return d;
    }
    double curl_at(int tri) const override {
        const auto& t = sys_.mesh.triangles[tri];
        double c = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Vec2& g = sys_.grad_lambda[tri][i];
            c += coeffs_[2 * t[i] + 1] * g.x() - coeffs_[2 * t[i]] * g.y();
        }
        return c;
    }

  private:
    const FeSystem& sys_;
    const Vec& coeffs_;
};

// Scalar field view for the potential phi^n in the psi-equation.
class ScalarField {
  public:
    virtual ~ScalarField() = default;
    virtual double at(int tri, const double lambda[3]) const = 0;
};

class ZeroScalarField final : public ScalarField {
  public:
    double at(int, const double[3]) const override { return 0.0; }
};

class VertexField final : public ScalarField {
  public:
    VertexField(const FeSystem& sys, const Vec& coeffs) : sys_(sys), coeffs_(coeffs) {}
    double at(int tri, const double lambda[3]) const override {
        const auto& t = sys_.mesh.triangles[tri];
        double out = 0.0;
        for (int i = 0; i < 3; ++i) out += lambda[i] * coeffs_[t[i]];
        return out;
    }

  private:
    const FeSystem& sys_;
    const Vec& coeffs_;
};

// phi = -div(A) for the baseline scheme (elementwise constant).
class NegDivField final : public ScalarField {
  public:
    explicit NegDivField(const AField& a) : a_(a) {}
    double at(int tri, const double[3]) const override { return -a_.div_at(tri); }

  private:
    const AField& a_;
};

// ---------------------------------------------------------------------------
// Scheme-dependent forms.

// Covariant operator ((i/kappa grad + A) u, (i/kappa grad + A) v) on the
// complex P1 space, assembled as a real symmetric matrix on interleaved dofs
// with 2x2 blocks [[Re, -Im], [Im, Re]].
SpMat assemble_covariant(const FeSystem& sys, const AField& a, double kappa,
                         const ExecPolicy& pol = {});

// Cubic term ((|psi|^2 - 1) psi, phi_j): residual vector and (optionally) the
// Jacobian d/dpsi as triplets in the interleaved layout.
void assemble_cubic(const FeSystem& sys, const Vec& psi, Vec* residual, SpMat* jacobian,
                    const ExecPolicy& pol = {});

// psi-equation constant term:
//   (g(., t_next), phi_j) - (i eta kappa Theta(psi_n) phi_n, phi_j).
// `g` may be empty (no source).
Vec assemble_psi_source(const FeSystem& sys, const Vec& psi_n, const ScalarField& phi_n,
                        const std::function<Complex(Vec2)>& g, double eta, double kappa,
                        const ExecPolicy& pol = {});

// A-equation load for the edge space:
//   (H, curl w_e) + (gvec, w_e) - (J_s(psi_n, A_n), w_e),
// with the supercurrent J_s = |psi|^2 A + kappa^{-1} (Im(psi) grad Re(psi)
// - Re(psi) grad Im(psi)). H and gvec may be empty.
Vec assemble_edge_load(const FeSystem& sys, const std::function<double(Vec2)>& H,
                       const std::function<Vec2(Vec2)>& gvec, const Vec& psi_n,
                       const AField& a_n, double kappa, const ExecPolicy& pol = {});

// Same load tested against the P1 vector space (baseline), interleaved (x,y).
Vec assemble_nodal_load(const FeSystem& sys, const std::function<double(Vec2)>& H,
                        const std::function<Vec2(Vec2)>& gvec, const Vec& psi_n,
                        const AField& a_n, double kappa, const ExecPolicy& pol = {});

// Baseline operator mass_coef*(A,a) + (div A, div a) + (curl A, curl a) on
// the P1 vector space.
SpMat assemble_nodal_vector_matrix(const FeSystem& sys, double mass_coef,
                                   const ExecPolicy& pol = {});

} // namespace tdgl
