#pragma once

#include "tdgl2d/assembly.hpp"
#include "tdgl2d/fe_system.hpp"

#include <string>

namespace tdgl {

// Legacy ASCII VTK snapshot of one state: |psi|^2 and the vertex-averaged
// magnetic potential as point data, the elementwise magnetic field B = curl A
// as cell data. Works for both the edge-element and the nodal A fields.
void write_vtk_snapshot(const std::string& path, const FeSystem& sys, const Vec& psi,
                        const AField& a);

} // namespace tdgl
