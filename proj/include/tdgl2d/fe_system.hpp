#pragma once

#include "tdgl2d/mesh.hpp"

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <vector>

namespace tdgl {

using Vec = Eigen::VectorXd;
using Complex = std::complex<double>;

// The three discrete spaces on one mesh:
//   S_h: complex P1 Lagrange for the order parameter (n_S complex dofs,
//        stored interleaved re/im so all linear algebra stays real);
//   V_h: real P1 Lagrange for the electric potential (vertex dofs). The
//        pairing with N_h is what makes the mixed method work: the gradient
//        of a vertex function is exactly the edge field of its endpoint
//        differences, so grad V_h is a subspace of N_h.
//   N_h: lowest-order first-kind edge elements (Whitney 1-forms) for the
//        magnetic potential, one dof per edge: the tangential moment
//        int_e a . t ds with the edge oriented low -> high vertex id.
struct FeSystem {
    Mesh mesh;
    int n_S = 0, n_V = 0, n_N = 0;

    std::vector<double> area;                        // per triangle
    std::vector<std::array<Vec2, 3>> grad_lambda;    // per triangle
    // Per triangle, per local edge k=(k,k+1): local vertex pair ordered so
    // the global ids increase; Whitney functions need no other sign data.
    std::vector<std::array<std::array<int, 2>, 3>> edge_verts_local;

    // Whitney basis w_e = lambda_a grad(lambda_b) - lambda_b grad(lambda_a)
    // for the three local edges, in global orientation.
    void whitney(int t, const double lambda[3], Vec2 w[3]) const {
        const auto& g = grad_lambda[t];
        for (int k = 0; k < 3; ++k) {
            int a = edge_verts_local[t][k][0], b = edge_verts_local[t][k][1];
            w[k] = lambda[a] * g[b] - lambda[b] * g[a];
        }
    }

    // Scalar curl of the local Whitney functions; constant per triangle.
    double whitney_curl(int t, int k) const {
        int a = edge_verts_local[t][k][0], b = edge_verts_local[t][k][1];
        const Vec2& ga = grad_lambda[t][a];
        const Vec2& gb = grad_lambda[t][b];
        return 2.0 * (ga.x() * gb.y() - ga.y() * gb.x());
    }

    Vec2 ref_to_phys(int t, double xr, double yr) const {
        const auto& tri = mesh.triangles[t];
        return (1.0 - xr - yr) * mesh.vertices[tri[0]] + xr * mesh.vertices[tri[1]] +
               yr * mesh.vertices[tri[2]];
    }
};

FeSystem build_system(Mesh mesh);

// Nodal interpolation into S_h (complex, interleaved) and V_h.
Vec interpolate_nodal_complex(const FeSystem& sys, const std::function<Complex(Vec2)>& f);
Vec interpolate_vertex(const FeSystem& sys, const std::function<double(Vec2)>& f);

// Edge interpolation into N_h: dof_e = int_e F . t ds by 3-point Gauss.
Vec interpolate_edge(const FeSystem& sys, const std::function<Vec2(Vec2)>& F);

// Point evaluation of discrete fields. Throws std::runtime_error("point not
// found ...") for queries outside the mesh.
class Evaluator {
  public:
    explicit Evaluator(const FeSystem& sys);

    // Locate a physical point: triangle id + barycentric coordinates.
    struct Location {
        int tri;
        double lambda[3];
    };
    Location locate(Vec2 x) const;

    Complex psi(const Vec& psi_coeffs, Vec2 x) const;
    double p1(const Vec& phi_coeffs, Vec2 x) const;
    Vec2 p1_grad(const Vec& phi_coeffs, Vec2 x) const;
    Vec2 edge_field(const Vec& a_coeffs, Vec2 x) const;
    double edge_curl(const Vec& a_coeffs, Vec2 x) const;

  private:
    const FeSystem& sys_;
    Vec2 lo_, hi_;
    int nb_ = 1;
    std::vector<std::vector<int>> bins_;
};

} // namespace tdgl
