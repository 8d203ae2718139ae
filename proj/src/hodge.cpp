#include "tdgl2d/hodge.hpp"

#include "tdgl2d/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

namespace tdgl {

HodgeDecomposition::HodgeDecomposition(const FeSystem& sys, const StaticForms& forms)
    : sys_(sys), forms_(forms) {
    m_v_solver_.compute(forms.M_V);
    if (m_v_solver_.info() != Eigen::Success)
        throw std::runtime_error("scalar mass matrix factorization failed");

    // Vertex-gradient interpolation: the columns of G acting on vertex dofs.
    {
        std::vector<Triplet> trips;
        trips.reserve(2 * static_cast<size_t>(sys.n_N));
        for (int e = 0; e < sys.n_N; ++e) {
            trips.emplace_back(e, sys.mesh.edges[e][0], -1.0);
            trips.emplace_back(e, sys.mesh.edges[e][1], 1.0);
        }
        g_v_.resize(sys.n_N, sys.n_S);
        g_v_.setFromTriplets(trips.begin(), trips.end());
        g_v_.makeCompressed();
    }

    // Weighted vertex Laplacian G_v^T M_N G_v; its kernel is the constants,
    // so pin vertex 0 and factor the remaining block.
    SpMat lap = SpMat(g_v_.transpose()) * forms.M_N * g_v_;
    {
        std::vector<Triplet> trips;
        trips.reserve(static_cast<size_t>(lap.nonZeros()));
        for (int k = 0; k < lap.outerSize(); ++k)
            for (SpMat::InnerIterator it(lap, k); it; ++it)
                if (it.row() > 0 && it.col() > 0)
                    trips.emplace_back(static_cast<int>(it.row()) - 1,
                                       static_cast<int>(it.col()) - 1, it.value());
        SpMat reduced(sys.n_S - 1, sys.n_S - 1);
        reduced.setFromTriplets(trips.begin(), trips.end());
        reduced.makeCompressed();
        reduced_solver_.compute(reduced);
        if (reduced_solver_.info() != Eigen::Success)
            throw std::runtime_error("vertex Laplacian factorization failed");
    }

    // One generator per hole, projected and orthonormalized in the M_N inner
    // product (modified Gram-Schmidt).
    for (int loop = 1; loop < sys.mesh.n_loops; ++loop) {
        Vec v = raw_generator(loop);
        Vec theta = solve_reduced(SpMat(g_v_.transpose()) * (forms_.M_N * v));
        Vec w = v - g_v_ * theta;
        for (const Vec& prev : harmonic_) {
            const double proj = prev.dot(forms_.M_N * w);
            w -= proj * prev;
        }
        const double norm = std::sqrt(w.dot(forms_.M_N * w));
        if (norm < 1e-12)
            throw std::runtime_error("degenerate harmonic generator for loop " +
                                     std::to_string(loop));
        harmonic_.push_back(w / norm);
    }
}

Vec HodgeDecomposition::solve_reduced(const Vec& rhs_full) const {
    Vec rhs = rhs_full.tail(sys_.n_S - 1);
    Vec sol = reduced_solver_.solve(rhs);
    Vec full = Vec::Zero(sys_.n_S);
    full.tail(sys_.n_S - 1) = sol;
    return full;
}

// Build a curl-free edge field with unit period around the given hole, by
// routing a dual path of triangles from the hole boundary to the outer
// boundary. Crossed edges get +-1 so that every triangle sees one entry and
// one exit of equal and opposite circulation; curl vanishes identically
// (integer arithmetic) while the period around the hole is +-1.
Vec HodgeDecomposition::raw_generator(int loop) const {
    const Mesh& mesh = sys_.mesh;
    int e_start = -1;
    for (int e = 0; e < mesh.n_edges(); ++e)
        if (mesh.edge_loop[e] == loop) {
            e_start = e;
            break;
        }
    if (e_start < 0) throw std::runtime_error("no boundary edge found for loop");
    const int t0 = mesh.edge_tris[e_start][0];

    // Breadth-first search in the dual graph until a triangle with an
    // outer-boundary edge is reached.
    std::vector<int> parent_tri(static_cast<size_t>(mesh.n_triangles()), -2);
    std::vector<int> parent_edge(static_cast<size_t>(mesh.n_triangles()), -1);
    std::deque<int> queue;
    parent_tri[static_cast<size_t>(t0)] = -1;
    queue.push_back(t0);
    int t_end = -1, e_end = -1;
    while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        for (int k = 0; k < 3 && e_end < 0; ++k) {
            const int e = mesh.tri_edges[t][k];
            if (mesh.edge_loop[e] == 0) {
                t_end = t;
                e_end = e;
            }
        }
        if (e_end >= 0) break;
        for (int k = 0; k < 3; ++k) {
            const int e = mesh.tri_edges[t][k];
            if (mesh.edge_loop[e] >= 0) continue; // boundary: no neighbor
            const int other = mesh.edge_tris[e][0] == t ? mesh.edge_tris[e][1]
                                                        : mesh.edge_tris[e][0];
            if (parent_tri[static_cast<size_t>(other)] != -2) continue;
            parent_tri[static_cast<size_t>(other)] = t;
            parent_edge[static_cast<size_t>(other)] = e;
            queue.push_back(other);
        }
    }
    if (e_end < 0) throw std::runtime_error("dual path search failed to reach outer boundary");

    auto sign_in = [&](int t, int e) {
        for (int k = 0; k < 3; ++k)
            if (mesh.tri_edges[t][k] == e) return static_cast<double>(mesh.tri_edge_sign[t][k]);
        throw std::logic_error("edge not on triangle");
    };

    Vec v = Vec::Zero(sys_.n_N);
    v[e_start] = sign_in(t0, e_start);
    v[e_end] = -sign_in(t_end, e_end);
    // Walk the path back from t_end to t0; each crossed edge takes the sign
    // of the triangle the forward path enters through it.
    int t = t_end;
    while (parent_tri[static_cast<size_t>(t)] != -1) {
        const int e = parent_edge[static_cast<size_t>(t)];
        v[e] = sign_in(t, e);
        t = parent_tri[static_cast<size_t>(t)];
    }
    return v;
}

Vec HodgeDecomposition::discrete_divergence(const Vec& a) const {
    return m_v_solver_.solve(-(forms_.B_div * a));
}

Vec HodgeDecomposition::gradient_potential(const Vec& a) const {
    return solve_reduced(SpMat(g_v_.transpose()) * (forms_.M_N * a));
}

Vec HodgeDecomposition::apply_vertex_gradient(const Vec& theta) const { return g_v_ * theta; }

HodgeDecomposition::Split HodgeDecomposition::decompose(const Vec& a) const {
    Split s;
    s.harmonic.resize(betti());
    Vec rest = a;
    for (int j = 0; j < betti(); ++j) {
        s.harmonic[j] = harmonic_[static_cast<size_t>(j)].dot(forms_.M_N * a);
        rest -= s.harmonic[j] * harmonic_[static_cast<size_t>(j)];
    }
    s.theta = gradient_potential(rest);
    s.remainder = rest - g_v_ * s.theta;
    return s;
}

double HodgeDecomposition::gradient_embedding_gap(const Vec& chi) const {
    const Vec b = SpMat(forms_.B_div.transpose()) * chi;
    Eigen::SimplicialLDLT<SpMat> mn(forms_.M_N);
    const Vec pi = mn.solve(b);
    const double denom = chi.dot(forms_.K_V * chi);
    if (denom <= 0.0) return 0.0;
    const double num = std::max(0.0, denom - pi.dot(forms_.M_N * pi));
    return std::sqrt(num / denom);
}

HodgeDecomposition::EmbeddingRow HodgeDecomposition::embedding_diagnostic(
    const Vec& a, const ExecPolicy& pol) const {
    EmbeddingRow row;
    row.l2 = std::sqrt(std::max(0.0, a.dot(forms_.M_N * a)));
    row.curl = std::sqrt(std::max(0.0, a.dot(forms_.K_curl * a)));
    const Vec zeta = discrete_divergence(a);
    row.div_h = std::sqrt(std::max(0.0, zeta.dot(forms_.M_V * zeta)));

    // |a|^4 is a quartic polynomial per triangle, integrated exactly.
    const TriangleRule& rule = tri_rule_source();
    const EdgeAField field(sys_, a);
    auto parts = chunked_map<double>(sys_.mesh.n_triangles(), pol, [&](double& acc, int begin, int end) {
        for (int t = begin; t < end; ++t) {
            const double area = sys_.area[t];
            for (int q = 0; q < rule.size(); ++q) {
                const double lambda[3] = {1.0 - rule.x[q] - rule.y[q],
                                          rule.x[q], rule.y[q]};
                const double s = field.at(t, lambda).squaredNorm();
                acc += 2.0 * area * rule.w[q] * s * s;
            }
        }
    });
    double total = 0.0;
    for (double p : parts) total += p;
    row.l4 = std::pow(total, 0.25);
    return row;
}

double HodgeDecomposition::circulation(const Vec& a, const std::vector<int>& vertex_cycle) const {
    const Mesh& mesh = sys_.mesh;
    double total = 0.0;
    const size_t n = vertex_cycle.size();
    for (size_t i = 0; i < n; ++i) {
        int u = vertex_cycle[i];
        int v = vertex_cycle[(i + 1) % n];
        const double sign = u < v ? 1.0 : -1.0;
        const std::array<int, 2> key{std::min(u, v), std::max(u, v)};
        auto it = std::lower_bound(mesh.edges.begin(), mesh.edges.end(), key);
        if (it == mesh.edges.end() || *it != key)
            throw std::invalid_argument("cycle vertices not joined by a mesh edge");
        total += sign * a[static_cast<int>(it - mesh.edges.begin())];
    }
    return total;
}

std::vector<int> HodgeDecomposition::boundary_cycle(int loop) const {
    const Mesh& mesh = sys_.mesh;
    std::map<int, std::vector<int>> next; // vertex -> incident loop edges
    int first_edge = -1;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (mesh.edge_loop[e] != loop) continue;
        if (first_edge < 0) first_edge = e;
        next[mesh.edges[e][0]].push_back(e);
        next[mesh.edges[e][1]].push_back(e);
    }
    if (first_edge < 0) throw std::invalid_argument("no such boundary loop");

    std::vector<int> cycle;
    int v = mesh.edges[first_edge][0];
    int prev_edge = -1;
    do {
        cycle.push_back(v);
        const auto& inc = next.at(v);
        const int e = (inc[0] == prev_edge) ? inc[1] : inc[0];
        v = mesh.edges[e][0] == v ? mesh.edges[e][1] : mesh.edges[e][0];
        prev_edge = e;
    } while (v != cycle.front());
    return cycle;
}

} // namespace tdgl
