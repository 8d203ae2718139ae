#include "tdgl2d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace tdgl {

double triangle_area(const Mesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

namespace {

// Subdivide [lo, hi] into ceil(len / target) equal pieces.
std::vector<double> subdivide(double lo, double hi, double target) {
    double len = hi - lo;
    int m = static_cast<int>(std::ceil(len / target - 1e-12));
    m = std::max(m, 1);
    std::vector<double> xs(m + 1);
    for (int j = 0; j <= m; ++j) xs[j] = lo + len * static_cast<double>(j) / m;
    xs.back() = hi;
    return xs;
}

void build_edges_and_loops(Mesh& mesh) {
    const int n_tri = mesh.n_triangles();

    // Canonical sorted edge list.
    std::vector<std::array<int, 2>> raw;
    raw.reserve(3 * n_tri);
    for (const auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            raw.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    mesh.edges = std::move(raw);

    auto edge_id = [&](int a, int b) {
        std::array<int, 2> key{std::min(a, b), std::max(a, b)};
        auto it = std::lower_bound(mesh.edges.begin(), mesh.edges.end(), key);
        return static_cast<int>(it - mesh.edges.begin());
    };

    mesh.tri_edges.assign(n_tri, {});
    mesh.tri_edge_sign.assign(n_tri, {});
    mesh.edge_tris.assign(mesh.edges.size(), {-1, -1});
    for (int t = 0; t < n_tri; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            int e = edge_id(a, b);
            mesh.tri_edges[t][k] = e;
            mesh.tri_edge_sign[t][k] = (a < b) ? 1 : -1;
            if (mesh.edge_tris[e][0] < 0)
                mesh.edge_tris[e][0] = t;
            else if (mesh.edge_tris[e][1] < 0)
                mesh.edge_tris[e][1] = t;
            else
                throw std::runtime_error("mesh: edge shared by more than two triangles");
        }
    }

    // Boundary loops: connected components of the boundary-edge graph.
    const int n_edge = mesh.n_edges();
    mesh.edge_loop.assign(n_edge, -1);
    std::vector<int> boundary;
    for (int e = 0; e < n_edge; ++e)
        if (mesh.edge_tris[e][1] < 0) boundary.push_back(e);

    std::map<int, std::vector<int>> vert_to_bedge;
    for (int e : boundary) {
        vert_to_bedge[mesh.edges[e][0]].push_back(e);
        vert_to_bedge[mesh.edges[e][1]].push_back(e);
    }
    for (auto& [v, es] : vert_to_bedge)
        if (es.size() != 2)
            throw std::runtime_error("mesh: non-manifold boundary at a vertex");

    std::vector<int> comp(n_edge, -1);
    std::vector<std::vector<int>> comp_edges;
    for (int e0 : boundary) {
        if (comp[e0] >= 0) continue;
        int cid = static_cast<int>(comp_edges.size());
        comp_edges.emplace_back();
        std::vector<int> stack{e0};
        comp[e0] = cid;
        while (!stack.empty()) {
            int e = stack.back();
            stack.pop_back();
            comp_edges[cid].push_back(e);
            for (int v : mesh.edges[e])
                for (int e2 : vert_to_bedge[v])
                    if (comp[e2] < 0) {
                        comp[e2] = cid;
                        stack.push_back(e2);
                    }
        }
    }

    // Deterministic loop ids: loop holding the lexicographically smallest
    // boundary vertex (by coordinates) is the outer loop 0; the rest are
    // ordered by their smallest vertex id.
    int n_comp = static_cast<int>(comp_edges.size());
    std::vector<std::pair<std::pair<double, double>, int>> order;
    for (int c = 0; c < n_comp; ++c) {
        std::pair<double, double> best{1e300, 1e300};
        for (int e : comp_edges[c])
            for (int v : mesh.edges[e]) {
                std::pair<double, double> p{mesh.vertices[v].x(), mesh.vertices[v].y()};
                best = std::min(best, p);
            }
        order.push_back({best, c});
    }
    std::sort(order.begin(), order.end());
    std::vector<int> new_id(n_comp);
    for (int i = 0; i < n_comp; ++i) new_id[order[i].second] = i;
    for (int e : boundary) mesh.edge_loop[e] = new_id[comp[e]];
    mesh.n_loops = n_comp;
}

// Walk one boundary loop as a closed vertex cycle.
std::vector<int> loop_vertex_cycle(const Mesh& mesh, int loop) {
    std::map<int, std::vector<int>> next;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (mesh.edge_loop[e] != loop) continue;
        next[mesh.edges[e][0]].push_back(mesh.edges[e][1]);
        next[mesh.edges[e][1]].push_back(mesh.edges[e][0]);
    }
    if (next.empty()) return {};
    int start = next.begin()->first;
    std::vector<int> cycle{start};
    int prev = -1, cur = start;
    do {
        const auto& nb = next[cur];
        int nxt = (nb[0] != prev) ? nb[0] : nb[1];
        cycle.push_back(nxt);
        prev = cur;
        cur = nxt;
    } while (cur != start);
    cycle.pop_back();
    return cycle;
}

// Max node spacing along the longest straight boundary segment. This is the
// "h" reported in convergence tables: the distance between adjacent boundary
// nodes, measured where the boundary is longest.
double reported_h(const Mesh& mesh) {
    double best_len = -1.0, best_h = 0.0;
    for (int loop = 0; loop < mesh.n_loops; ++loop) {
        std::vector<int> cyc = loop_vertex_cycle(mesh, loop);
        int n = static_cast<int>(cyc.size());
        if (n < 3) continue;
        // Corner flags: direction changes at vertex i.
        std::vector<bool> corner(n, false);
        int n_corners = 0;
        for (int i = 0; i < n; ++i) {
            Vec2 a = mesh.vertices[cyc[(i + n - 1) % n]];
            Vec2 b = mesh.vertices[cyc[i]];
            Vec2 c = mesh.vertices[cyc[(i + 1) % n]];
            Vec2 u = b - a, v = c - b;
            double cross = u.x() * v.y() - u.y() * v.x();
            if (std::abs(cross) > 1e-9 * u.norm() * v.norm()) {
                corner[i] = true;
                ++n_corners;
            }
        }
        if (n_corners == 0) continue;
        int start = 0;
        while (!corner[start]) ++start;
        // Walk corner to corner.
        int i = start;
        do {
            double seg_len = 0.0, seg_h = 0.0;
            int j = i;
            do {
                Vec2 a = mesh.vertices[cyc[j % n]];
                Vec2 b = mesh.vertices[cyc[(j + 1) % n]];
                double d = (b - a).norm();
                seg_len += d;
                seg_h = std::max(seg_h, d);
                ++j;
            } while (!corner[j % n]);
            if (seg_len > best_len + 1e-14) {
                best_len = seg_len;
                best_h = seg_h;
            }
            i = j % n;
        } while (i != start);
    }
    return best_h;
}

void finalize(Mesh& mesh) {
    for (size_t t = 0; t < mesh.triangles.size(); ++t)
        if (triangle_area(mesh, static_cast<int>(t)) <= 0.0)
            throw std::runtime_error("mesh: non-CCW or degenerate triangle");
    build_edges_and_loops(mesh);

    double mn = 1e300, mx = 0.0;
    for (const auto& e : mesh.edges) {
        double d = (mesh.vertices[e[0]] - mesh.vertices[e[1]]).norm();
        mn = std::min(mn, d);
        mx = std::max(mx, d);
    }
    mesh.min_edge = mn;
    mesh.max_edge = mx;

    // Kahan-compensated area sum: the analytic-area check is at 1e-12.
    double sum = 0.0, c = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        double y = triangle_area(mesh, t) - c;
        double s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    mesh.area = sum;
    mesh.h_reported = reported_h(mesh);
}

} // namespace

Mesh build_domain(const DomainSpec& spec) {
    if (!(spec.target_h > 0.0) || spec.target_h > 1.0)
        throw std::invalid_argument("build_domain: target_h must be in (0, 1]");
    const bool has_hole = spec.kind == DomainKind::LShapeWithHole;
    if (has_hole) {
        if (!(spec.hole_min_x < spec.hole_max_x && spec.hole_min_y < spec.hole_max_y))
            throw std::invalid_argument("build_domain: empty hole rectangle");
        if (!(spec.hole_min_x > -1.0 && spec.hole_max_x < 0.0 &&
              spec.hole_min_y > -1.0 && spec.hole_max_y < 0.0))
            throw std::invalid_argument("build_domain: hole must lie strictly inside the lower-left square");
        double d = std::hypot(spec.hole_max_x, spec.hole_max_y);
        if (d <= 0.4)
            throw std::invalid_argument("build_domain: hole intersects the corner-singularity disk r <= 0.4");
    }

    // Cut lines: domain corners plus the hole corners, so the hole boundary
    // is exactly resolved on every level.
    std::vector<double> xcuts{-1.0, spec.hole_min_x, spec.hole_max_x, 0.0, 1.0};
    std::vector<double> ycuts{-1.0, spec.hole_min_y, spec.hole_max_y, 0.0, 1.0};
    std::sort(xcuts.begin(), xcuts.end());
    std::sort(ycuts.begin(), ycuts.end());
    xcuts.erase(std::unique(xcuts.begin(), xcuts.end()), xcuts.end());
    ycuts.erase(std::unique(ycuts.begin(), ycuts.end()), ycuts.end());

    // Global tensor grid built per column/row so shared block faces match.
    std::vector<double> X, Y;
    for (size_t i = 0; i + 1 < xcuts.size(); ++i) {
        auto xs = subdivide(xcuts[i], xcuts[i + 1], spec.target_h);
        if (i == 0) X.push_back(xs[0]);
        X.insert(X.end(), xs.begin() + 1, xs.end());
    }
    for (size_t j = 0; j + 1 < ycuts.size(); ++j) {
        auto ys = subdivide(ycuts[j], ycuts[j + 1], spec.target_h);
        if (j == 0) Y.push_back(ys[0]);
        Y.insert(Y.end(), ys.begin() + 1, ys.end());
    }
    const int nx = static_cast<int>(X.size()) - 1;
    const int ny = static_cast<int>(Y.size()) - 1;

    auto cell_included = [&](int i, int j) {
        double cx = 0.5 * (X[i] + X[i + 1]);
        double cy = 0.5 * (Y[j] + Y[j + 1]);
        if (spec.kind != DomainKind::Square && cx > 0.0 && cy < 0.0) return false;
        if (has_hole && cx > spec.hole_min_x && cx < spec.hole_max_x &&
            cy > spec.hole_min_y && cy < spec.hole_max_y)
            return false;
        return true;
    };

    Mesh mesh;
    std::vector<int> vid(static_cast<size_t>(nx + 1) * (ny + 1), -1);
    auto vindex = [&](int i, int j) -> int& { return vid[static_cast<size_t>(j) * (nx + 1) + i]; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            bool used = false;
            for (int dj = -1; dj <= 0 && !used; ++dj)
                for (int di = -1; di <= 0 && !used; ++di) {
                    int ci = i + di, cj = j + dj;
                    if (ci >= 0 && ci < nx && cj >= 0 && cj < ny && cell_included(ci, cj))
                        used = true;
                }
            if (used) {
                vindex(i, j) = mesh.n_vertices();
                mesh.vertices.push_back(Vec2(X[i], Y[j]));
            }
        }
    // Criss-cross split: a center vertex per cell and four triangles. At a
    // given boundary node spacing this halves the effective element size
    // (legs h/√2), which resolves the corner singularity measurably better
    // than a single-diagonal split, and it is symmetric in both axes.
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (!cell_included(i, j)) continue;
            int v00 = vindex(i, j), v10 = vindex(i + 1, j);
            int v11 = vindex(i + 1, j + 1), v01 = vindex(i, j + 1);
            int c = mesh.n_vertices();
            mesh.vertices.push_back(
                Vec2(0.5 * (X[i] + X[i + 1]), 0.5 * (Y[j] + Y[j + 1])));
            mesh.triangles.push_back({v00, v10, c});
            mesh.triangles.push_back({v10, v11, c});
            mesh.triangles.push_back({v11, v01, c});
            mesh.triangles.push_back({v01, v00, c});
        }

    finalize(mesh);
    if (mesh.h_reported > spec.target_h * (1.0 + 1e-12))
        throw std::runtime_error("build_domain: reported h exceeds target_h");
    return mesh;
}

Mesh uniform_refine(const Mesh& parent) {
    Mesh mesh;
    mesh.vertices = parent.vertices;
    mesh.vertices.reserve(parent.n_vertices() + parent.n_edges());
    for (const auto& e : parent.edges)
        mesh.vertices.push_back(0.5 * (parent.vertices[e[0]] + parent.vertices[e[1]]));

    auto mid = [&](int t, int k) { return parent.n_vertices() + parent.tri_edges[t][k]; };
    mesh.triangles.reserve(4 * parent.n_triangles());
    for (int t = 0; t < parent.n_triangles(); ++t) {
        const auto& tri = parent.triangles[t];
        int m01 = mid(t, 0), m12 = mid(t, 1), m20 = mid(t, 2);
        mesh.triangles.push_back({tri[0], m01, m20});
        mesh.triangles.push_back({tri[1], m12, m01});
        mesh.triangles.push_back({tri[2], m20, m12});
        mesh.triangles.push_back({m01, m12, m20});
    }
    finalize(mesh);
    return mesh;
}

Mesh mesh_from_raw(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles) {
    Mesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(triangles);
    for (auto& tri : mesh.triangles) {
        Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        double cross = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
        if (cross < 0.0) std::swap(tri[1], tri[2]);
    }
    finalize(mesh);
    return mesh;
}

MeshStats mesh_stats(const Mesh& mesh) {
    MeshStats s;
    s.n_vertices = mesh.n_vertices();
    s.n_edges = mesh.n_edges();
    s.n_triangles = mesh.n_triangles();
    s.euler = s.n_vertices - s.n_edges + s.n_triangles;
    s.boundary_loops = mesh.n_loops;
    s.betti = mesh.n_loops - 1;
    s.min_edge = mesh.min_edge;
    s.max_edge = mesh.max_edge;
    s.quality_ratio = mesh.max_edge / mesh.min_edge;
    s.area = mesh.area;
    s.h_reported = mesh.h_reported;
    return s;
}

} // namespace tdgl
