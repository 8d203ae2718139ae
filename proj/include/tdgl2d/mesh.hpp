#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

namespace tdgl {

using Vec2 = Eigen::Vector2d;

enum class DomainKind { LShapeWithHole, LShape, Square };

// Multi-connected test domain: (-1,1)^2 minus the closed quadrant
// [0,1) x (-1,0] (reentrant corner at the origin, interior angle 3*pi/2),
// optionally minus an axis-aligned rectangular hole.
struct DomainSpec {
    DomainKind kind = DomainKind::LShapeWithHole;
    double hole_min_x = -0.75, hole_min_y = -0.75;
    double hole_max_x = -0.45, hole_max_y = -0.45;
    double target_h = 0.25;

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // CCW vertex ids
    // Canonical edge list: (a,b) with a < b, sorted lexicographically, so a
    // rebuild of the same spec yields bit-identical connectivity.
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> tri_edges;     // local edges (0,1),(1,2),(2,0)
    std::vector<std::array<int, 3>> tri_edge_sign; // +1 if CCW traversal runs a->b
    std::vector<std::array<int, 2>> edge_tris;     // adjacent triangles, -1 = none
    std::vector<int> edge_loop;                    // -1 interior, else boundary loop id
    int n_loops = 0;

    double h_reported = 0.0; // max node spacing on the longest straight boundary run
    double min_edge = 0.0;
    double max_edge = 0.0;
    double area = 0.0;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    bool edge_on_boundary(int e) const { return edge_loop[e] >= 0; }
};

struct MeshStats {
    int n_vertices = 0, n_edges = 0, n_triangles = 0;
    int euler = 0;          // V - E + F
    int boundary_loops = 0;
    int betti = 0;          // first Betti number = loops - 1
    double min_edge = 0, max_edge = 0, quality_ratio = 0;
    double area = 0;
    double h_reported = 0;
};

// Structured block triangulation aligned with the domain corners and the
// hole. Throws std::invalid_argument on malformed specs (hole outside the L,
// hole touching the corner-singularity disk r <= 0.4, non-positive h).
Mesh build_domain(const DomainSpec& spec);

// Red refinement: each triangle splits into 4 congruent children, every edge
// length halves exactly, so nested families keep their quality ratio.
Mesh uniform_refine(const Mesh& mesh);

// Build a mesh from raw arrays (test fixtures). Triangle orientation is
// normalized to CCW.
Mesh mesh_from_raw(std::vector<Vec2> vertices,
                   std::vector<std::array<int, 3>> triangles);

MeshStats mesh_stats(const Mesh& mesh);

double triangle_area(const Mesh& mesh, int t);

} // namespace tdgl
