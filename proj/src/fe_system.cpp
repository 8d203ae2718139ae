#include "tdgl2d/fe_system.hpp"

#include "tdgl2d/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace tdgl {

FeSystem build_system(Mesh mesh) {
    FeSystem sys;
    sys.mesh = std::move(mesh);
    const Mesh& m = sys.mesh;
    sys.n_S = m.n_vertices();
    sys.n_V = m.n_vertices();
    sys.n_N = m.n_edges();

    const int n_tri = m.n_triangles();
    sys.area.resize(n_tri);
    sys.grad_lambda.resize(n_tri);
    sys.edge_verts_local.resize(n_tri);
    for (int t = 0; t < n_tri; ++t) {
        const auto& tri = m.triangles[t];
        Vec2 p0 = m.vertices[tri[0]], p1 = m.vertices[tri[1]], p2 = m.vertices[tri[2]];
        double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
        sys.area[t] = 0.5 * det;
        // grad(lambda_i) = rot(opposite edge) / (2 |T|), oriented inward.
        sys.grad_lambda[t][0] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / det;
        sys.grad_lambda[t][1] = Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / det;
        sys.grad_lambda[t][2] = Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / det;
        for (int k = 0; k < 3; ++k) {
            int la = k, lb = (k + 1) % 3;
            if (tri[la] > tri[lb]) std::swap(la, lb);
            sys.edge_verts_local[t][k] = {la, lb};
        }
    }
    return sys;
}

Vec interpolate_nodal_complex(const FeSystem& sys, const std::function<Complex(Vec2)>& f) {
    Vec out(2 * sys.n_S);
    for (int v = 0; v < sys.n_S; ++v) {
        Complex z = f(sys.mesh.vertices[v]);
        out[2 * v] = z.real();
        out[2 * v + 1] = z.imag();
    }
    return out;
}

Vec interpolate_vertex(const FeSystem& sys, const std::function<double(Vec2)>& f) {
    Vec out(sys.n_V);
    for (int v = 0; v < sys.n_V; ++v) out[v] = f(sys.mesh.vertices[v]);
    return out;
}

Vec interpolate_edge(const FeSystem& sys, const std::function<Vec2(Vec2)>& F) {
    static const GaussRule1d g3 = gauss_legendre(3);
    const Mesh& m = sys.mesh;
    Vec out(sys.n_N);
    for (int e = 0; e < m.n_edges(); ++e) {
        Vec2 a = m.vertices[m.edges[e][0]], b = m.vertices[m.edges[e][1]];
        Vec2 d = b - a; // tangent * |e|
        double acc = 0.0;
        for (int q = 0; q < 3; ++q) acc += g3.weights[q] * F(a + g3.points[q] * d).dot(d);
        out[e] = acc;
    }
    return out;
}

Evaluator::Evaluator(const FeSystem& sys) : sys_(sys) {
    const Mesh& m = sys.mesh;
    lo_ = Vec2(1e300, 1e300);
    hi_ = Vec2(-1e300, -1e300);
    for (const auto& v : m.vertices) {
        lo_ = lo_.cwiseMin(v);
        hi_ = hi_.cwiseMax(v);
    }
    nb_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m.n_triangles()) / 2.0)));
    bins_.assign(static_cast<size_t>(nb_) * nb_, {});
    auto clampi = [&](int i) { return std::min(std::max(i, 0), nb_ - 1); };
    for (int t = 0; t < m.n_triangles(); ++t) {
        Vec2 tlo(1e300, 1e300), thi(-1e300, -1e300);
        for (int v : m.triangles[t]) {
            tlo = tlo.cwiseMin(m.vertices[v]);
            thi = thi.cwiseMax(m.vertices[v]);
        }
        int i0 = clampi(static_cast<int>((tlo.x() - lo_.x()) / (hi_.x() - lo_.x()) * nb_));
        int i1 = clampi(static_cast<int>((thi.x() - lo_.x()) / (hi_.x() - lo_.x()) * nb_));
        int j0 = clampi(static_cast<int>((tlo.y() - lo_.y()) / (hi_.y() - lo_.y()) * nb_));
        int j1 = clampi(static_cast<int>((thi.y() - lo_.y()) / (hi_.y() - lo_.y()) * nb_));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                bins_[static_cast<size_t>(j) * nb_ + i].push_back(t);
    }
}

Evaluator::Location Evaluator::locate(Vec2 x) const {
    const Mesh& m = sys_.mesh;
    auto clampi = [&](int i) { return std::min(std::max(i, 0), nb_ - 1); };
    int i = clampi(static_cast<int>((x.x() - lo_.x()) / (hi_.x() - lo_.x()) * nb_));
    int j = clampi(static_cast<int>((x.y() - lo_.y()) / (hi_.y() - lo_.y()) * nb_));
    const double tol = -1e-11;
    for (int t : bins_[static_cast<size_t>(j) * nb_ + i]) {
        const auto& tri = m.triangles[t];
        Vec2 p0 = m.vertices[tri[0]];
        Vec2 r = x - p0;
        // lambda_i is affine with lambda_i(p0) = 0 for i = 1,2.
        double l1 = sys_.grad_lambda[t][1].dot(r);
        double l2 = sys_.grad_lambda[t][2].dot(r);
        double l0 = 1.0 - l1 - l2;
        if (l0 >= tol && l1 >= tol && l2 >= tol) {
            Location loc;
            loc.tri = t;
            loc.lambda[0] = l0;
            loc.lambda[1] = l1;
            loc.lambda[2] = l2;
            return loc;
        }
    }
    throw std::runtime_error("point not found in mesh: (" + std::to_string(x.x()) + ", " +
                             std::to_string(x.y()) + ")");
}

Complex Evaluator::psi(const Vec& psi_coeffs, Vec2 x) const {
    Location loc = locate(x);
    const auto& tri = sys_.mesh.triangles[loc.tri];
    Complex z = 0.0;
    for (int i = 0; i < 3; ++i)
        z += loc.lambda[i] * Complex(psi_coeffs[2 * tri[i]], psi_coeffs[2 * tri[i] + 1]);
    return z;
}

double Evaluator::p1(const Vec& phi_coeffs, Vec2 x) const {
    Location loc = locate(x);
    const auto& tri = sys_.mesh.triangles[loc.tri];
    double out = 0.0;
    for (int i = 0; i < 3; ++i) out += loc.lambda[i] * phi_coeffs[tri[i]];
    return out;
}

Vec2 Evaluator::p1_grad(const Vec& phi_coeffs, Vec2 x) const {
    Location loc = locate(x);
    const auto& tri = sys_.mesh.triangles[loc.tri];
    Vec2 out(0.0, 0.0);
    for (int i = 0; i < 3; ++i) out += phi_coeffs[tri[i]] * sys_.grad_lambda[loc.tri][i];
    return out;
}

Vec2 Evaluator::edge_field(const Vec& a_coeffs, Vec2 x) const {
    Location loc = locate(x);
    Vec2 w[3];
    sys_.whitney(loc.tri, loc.lambda, w);
    Vec2 out(0.0, 0.0);
    for (int k = 0; k < 3; ++k) out += a_coeffs[sys_.mesh.tri_edges[loc.tri][k]] * w[k];
    return out;
}

double Evaluator::edge_curl(const Vec& a_coeffs, Vec2 x) const {
    Location loc = locate(x);
    double out = 0.0;
    for (int k = 0; k < 3; ++k)
        out += a_coeffs[sys_.mesh.tri_edges[loc.tri][k]] * sys_.whitney_curl(loc.tri, k);
    return out;
}

} // namespace tdgl
