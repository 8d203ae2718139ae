#include "tdgl2d/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace tdgl {

namespace {
std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}
} // namespace

void write_vtk_snapshot(const std::string& path, const FeSystem& sys, const Vec& psi,
                        const AField& a) {
    const Mesh& mesh = sys.mesh;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

    out << "# vtk DataFile Version 3.0\n";
    out << "tdgl2d snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";

    out << "POINTS " << mesh.n_vertices() << " double\n";
    for (const auto& v : mesh.vertices) out << num(v.x()) << " " << num(v.y()) << " 0\n";

    out << "CELLS " << mesh.n_triangles() << " " << 4 * mesh.n_triangles() << "\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "CELL_TYPES " << mesh.n_triangles() << "\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) out << "5\n";

    // The potential is elementwise polynomial but discontinuous between
    // elements; average the corner traces over the incident triangles.
    std::vector<Vec2> avg(static_cast<size_t>(mesh.n_vertices()), Vec2::Zero());
    std::vector<int> count(static_cast<size_t>(mesh.n_vertices()), 0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        for (int i = 0; i < 3; ++i) {
            double lambda[3] = {0.0, 0.0, 0.0};
            lambda[i] = 1.0;
            const int v = mesh.triangles[t][i];
            avg[static_cast<size_t>(v)] += a.at(t, lambda);
            ++count[static_cast<size_t>(v)];
        }
    }

    out << "POINT_DATA " << mesh.n_vertices() << "\n";
    out << "SCALARS density double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.n_vertices(); ++v)
        out << num(psi[2 * v] * psi[2 * v] + psi[2 * v + 1] * psi[2 * v + 1]) << "\n";
    out << "VECTORS potential double\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const Vec2 val = avg[static_cast<size_t>(v)] / std::max(1, count[static_cast<size_t>(v)]);
        out << num(val.x()) << " " << num(val.y()) << " 0\n";
    }

    out << "CELL_DATA " << mesh.n_triangles() << "\n";
    out << "SCALARS magnetic_field double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) out << num(a.curl_at(t)) << "\n";

    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace tdgl
