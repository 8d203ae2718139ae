#pragma once

#include "tdgl2d/config.hpp"
#include "tdgl2d/exact_solution.hpp"
#include "tdgl2d/galerkin.hpp"
#include "tdgl2d/stepper.hpp"

#include <string>
#include <vector>

namespace tdgl {

// Outcome of one mesh level of a convergence study.
struct LevelSummary {
    double h = 0.0, tau = 0.0;
    int n_steps = 0;
    MeshStats mesh;

    ErrorNorms errors{};      // vs the benchmark solution at the final time
    bool has_errors = false;  // set for the mms scenario

    int max_newton_iters = 0;
    bool newton_all_converged = true;
    double max_gauge_gap = 0.0;       // mixed scheme
    double max_block_residual = 0.0;  // mixed scheme
    double max_system_residual = 0.0; // nodal baseline scheme
    double max_psi_inf = 0.0;         // mixed scheme
    bool energy_decay_ok = true;      // mixed scheme
    double worst_energy_slack = 0.0;
    std::vector<EnergyRow> energy; // mixed scheme, step 0 included
};

struct StudySummary {
    RunConfig config;
    std::vector<LevelSummary> levels;
    ErrorNorms rates{}; // log2(coarse/fine) over the two finest levels
    bool has_rates = false;
    std::vector<std::string> files_written;
};

// Run every level of the configured study, writing the requested CSV / VTK
// outputs under config.output_directory (created if absent).
StudySummary run_study(const RunConfig& cfg);

// CSV bodies (also used by the tests to check byte stability).
std::string errors_csv_text(const StudySummary& summary);
std::string energy_csv_text(const std::vector<EnergyRow>& rows);

} // namespace tdgl
