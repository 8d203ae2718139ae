#pragma once

#include "tdgl2d/mesh.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace tdgl {

enum class Scheme { Mixed, Galerkin };
enum class ScenarioKind { Mms, Physical, Homogeneous };

// Full description of one convergence study, read from an INI-style file with
// sections [domain], [study], [newton], [output]. Mesh sizes may be written
// as fractions ("1/32") or decimals; comments start with '#' or ';'.
struct RunConfig {
    DomainSpec domain;

    Scheme scheme = Scheme::Mixed;
    ScenarioKind scenario = ScenarioKind::Mms;
    std::vector<double> levels = {1.0 / 16, 1.0 / 32, 1.0 / 64};
    double tau_factor = 2.0; // time step tau = tau_factor * h per level
    double t_final = 1.0;
    double eta = 1.0;
    double kappa = 1.0;
    double applied_field = 1.0; // constant H for the physical scenario

    double newton_tolerance = 1e-10;
    int newton_max_iterations = 25;

    std::string output_directory = "out";
    bool write_energy = true;
    bool write_errors = true;
    bool write_vtk = false;
    int vtk_stride = 0; // 0: final snapshot only
    bool deterministic = false;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parse or validation failure; the message carries a line number for syntax
// problems and the offending field name for semantic ones.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "a/b" or a plain decimal; throws ConfigError on anything else.
double parse_mesh_size(const std::string& token);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical text form; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& cfg);

// Re-checks the semantic constraints (used after CLI overrides).
void validate_config(const RunConfig& cfg);

} // namespace tdgl
