#pragma once

#include "tdgl2d/assembly.hpp"
#include "tdgl2d/fe_system.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <functional>
#include <vector>

namespace tdgl {

struct SolverConfig {
    double tau = 0.01;
    double eta = 1.0;
    double kappa = 1.0;
    double newton_tol = 1e-10;
    int newton_max_iter = 25;
    ExecPolicy exec{};
};

// Time-dependent problem data. Any entry may be empty (treated as zero
// applied field / no source).
struct Scenario {
    std::function<double(Vec2, double)> H;
    std::function<Complex(Vec2, double)> g;
    std::function<Vec2(Vec2, double)> gvec;
};

struct State {
    Vec psi; // 2 n_S, interleaved re/im
    Vec phi; // n_V
    Vec a;   // n_N
    double time = 0.0;
};

State zero_state(const FeSystem& sys);
State uniform_state(const FeSystem& sys, Complex psi0);

struct EnergyParts {
    double kinetic = 0.0;      // 1/2 |(i/kappa grad + A) psi|^2
    double condensation = 0.0; // 1/4 (|psi|^2 - 1)^2
    double field = 0.0;        // 1/2 |curl A - H|^2
    double gauge = 0.0;        // 1/2 |phi|^2
    double total() const { return kinetic + condensation + field + gauge; }
};

EnergyParts discrete_energy(const FeSystem& sys, const Vec& psi, const AField& a,
                            const ScalarField& phi, const std::function<double(Vec2)>& H,
                            double kappa, const ExecPolicy& pol = {});

struct NewtonReport {
    int iters = 0;
    double residual = 0.0; // final scaled residual norm
    bool converged = false;
};

// Damped Newton for the order-parameter step: solve
//   base * psi + ((|psi|^2 - 1) psi, basis) = rhs
// starting from the passed-in psi (overwritten with the solution). `base`
// must be symmetric positive definite, which the backward-Euler operator
// (eta/tau) M + covariant is whenever tau < eta.
NewtonReport solve_psi_newton(const FeSystem& sys, const SpMat& base, const Vec& rhs, Vec& psi,
                              double tol, int max_iter, const ExecPolicy& pol = {});

// One backward-Euler step of the decoupled scheme: first the linear mixed
// solve for (phi, A) — enforcing (phi, chi) = (A, grad chi) exactly at the
// discrete level — then the damped-Newton order-parameter solve with the
// fresh A and the previous phi.
class MixedStepper {
  public:
    MixedStepper(const FeSystem& sys, const StaticForms& forms, const SolverConfig& cfg);

    struct StepReport {
        int newton_iters = 0;
        double newton_residual = 0.0;
        bool newton_converged = false;
        double gauge_gap = 0.0;      // max_i |phi_i - (M_V^{-1} B_div A)_i|
        double block_residual = 0.0; // relative residual of the mixed solve
    };

    StepReport step(State& state, const Scenario& scenario);

    EnergyParts energy(const State& state, const Scenario& scenario) const;

    const SolverConfig& config() const { return cfg_; }

  private:
    const FeSystem& sys_;
    const StaticForms& forms_;
    SolverConfig cfg_;
    SpMat mass_c_; // complex-interleaved P1 mass
    SpMat block_;  // [[M_V, -B_div], [B_div^T, M_N/tau + K_curl]]
    Eigen::SparseLU<SpMat> block_lu_;
    Eigen::SimplicialLDLT<SpMat> m_v_ldlt_;
};

struct EnergyRow {
    int step = 0;
    double time = 0.0;
    EnergyParts parts;
};

struct RunReport {
    State state;
    std::vector<EnergyRow> energy; // filled when track_energy, includes step 0
    int max_newton_iters = 0;
    bool newton_all_converged = true;
    double max_gauge_gap = 0.0;
    double max_block_residual = 0.0;
    double max_psi_inf = 0.0; // max over steps of the nodal |psi|
    // Per-step energy decay check (meaningful for source-free runs):
    //   G^{n+1} - G^n <= tau eta kappa^2 G^n + 1e-8 (1 + G^n).
    bool energy_decay_ok = true;
    double worst_energy_slack = 0.0; // max over steps of lhs - tau eta kappa^2 G^n
};

RunReport run_mixed(const FeSystem& sys, const StaticForms& forms, const SolverConfig& cfg,
                    const Scenario& scenario, const State& initial, int n_steps,
                    bool track_energy,
                    const std::function<void(int, const State&)>& on_step = {});

} // namespace tdgl
