#pragma once

#include "tdgl2d/assembly.hpp"
#include "tdgl2d/fe_system.hpp"
#include "tdgl2d/stepper.hpp"

#include <Eigen/SparseCholesky>

namespace tdgl {

// Baseline scheme on the nodal spaces: the magnetic potential lives in the
// P1 vector space (interleaved x/y per vertex) with the grad-div + curl-curl
// form, and the electric potential is eliminated as phi = -div A_h
// (elementwise constant). The normal trace A.n = 0 is imposed essentially:
// the grad-div term is integrated by parts, so without it the scheme would
// pick up the spurious natural condition div A = 0 on the boundary and
// converge to the wrong field. Same time stepping, quadrature, Newton solve,
// and error measures as the mixed scheme — only the A-solve differs.
struct GalerkinState {
    Vec psi; // 2 n_S
    Vec a;   // 2 n_S nodal vector field
    double time = 0.0;
};

GalerkinState galerkin_zero_state(const FeSystem& sys);
GalerkinState galerkin_uniform_state(const FeSystem& sys, Complex psi0);

// Marks the interleaved nodal dofs whose component is normal to a boundary
// segment (both components at corners). Requires an axis-aligned boundary.
std::vector<char> normal_trace_mask(const FeSystem& sys);

class GalerkinStepper {
  public:
    GalerkinStepper(const FeSystem& sys, const StaticForms& forms, const SolverConfig& cfg);

    struct StepReport {
        int newton_iters = 0;
        double newton_residual = 0.0;
        bool newton_converged = false;
        double system_residual = 0.0;
    };

    StepReport step(GalerkinState& state, const Scenario& scenario);

    const SolverConfig& config() const { return cfg_; }

  private:
    const FeSystem& sys_;
    const StaticForms& forms_;
    SolverConfig cfg_;
    std::vector<char> bc_mask_; // dofs pinned to zero by A.n = 0
    SpMat mass_c_;  // interleaved P1 mass (shared by psi and A spaces)
    SpMat system_;  // mass/tau + grad-div + curl-curl, constrained
    Eigen::SimplicialLDLT<SpMat> system_ldlt_;
};

struct GalerkinRunReport {
    GalerkinState state;
    int max_newton_iters = 0;
    bool newton_all_converged = true;
    double max_system_residual = 0.0;
};

GalerkinRunReport run_galerkin(const FeSystem& sys, const StaticForms& forms,
                               const SolverConfig& cfg, const Scenario& scenario,
                               const GalerkinState& initial, int n_steps,
                               const std::function<void(int, const GalerkinState&)>& on_step = {});

} // namespace tdgl
