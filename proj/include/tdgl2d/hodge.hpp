#pragma once

#include "tdgl2d/assembly.hpp"
#include "tdgl2d/fe_system.hpp"

#include <Eigen/SparseCholesky>
#include <vector>

namespace tdgl {

// Discrete Hodge tools for the edge space: weak divergence, a basis of the
// discretely harmonic fields (curl-free and mass-orthogonal to the
// edge-interpolated gradients), and the three-way splitting of an edge field.
//
// Holds references to the system and forms; both must outlive this object.
class HodgeDecomposition {
  public:
    HodgeDecomposition(const FeSystem& sys, const StaticForms& forms);

    int betti() const { return static_cast<int>(harmonic_.size()); }
    const std::vector<Vec>& harmonic_basis() const { return harmonic_; }

    // Weak divergence into the scalar space: (div_h a, chi) = -(a, grad chi).
    Vec discrete_divergence(const Vec& a) const;

    // Vertex potential of the gradient part (first vertex pinned to zero).
    Vec gradient_potential(const Vec& a) const;

    // Edge field of an interpolated vertex gradient.
    Vec apply_vertex_gradient(const Vec& theta) const;

    struct Split {
        Vec theta;    // vertex potential, size n_S
        Vec harmonic; // coefficients in the harmonic basis, size betti
        Vec remainder;
    };
    Split decompose(const Vec& a) const;

    // Relative L2 distance from grad(chi) (chi a scalar-space field) to the
    // edge space; zero iff the gradient is representable there.
    double gradient_embedding_gap(const Vec& chi) const;

    // Norms entering the discrete embedding inequality
    //   ||a||_{L^4} <= C (||a||_{L^2} + ||curl a||_{L^2} + ||div_h a||_{L^2});
    // the ratio should stay bounded under refinement.
    struct EmbeddingRow {
        double l4 = 0.0, l2 = 0.0, curl = 0.0, div_h = 0.0;
        double ratio() const { return l4 / (l2 + curl + div_h); }
    };
    EmbeddingRow embedding_diagnostic(const Vec& a, const ExecPolicy& pol = {}) const;

    // Line integral of an edge field along a closed vertex cycle; consecutive
    // vertices must be joined by mesh edges.
    double circulation(const Vec& a, const std::vector<int>& vertex_cycle) const;

    // Vertex cycle of one boundary loop (orientation unspecified).
    std::vector<int> boundary_cycle(int loop) const;

  private:
    const FeSystem& sys_;
    const StaticForms& forms_;
    SpMat g_v_; // n_N x n_S vertex-gradient interpolation
    Eigen::SimplicialLDLT<SpMat> m_v_solver_;
    Eigen::SimplicialLDLT<SpMat> reduced_solver_; // G_v^T M_N G_v with vertex 0 pinned
    std::vector<Vec> harmonic_;

    Vec solve_reduced(const Vec& rhs_full) const;
    Vec raw_generator(int loop) const;
};

} // namespace tdgl
