#include "tdgl2d/galerkin.hpp"

#include <cmath>
#include <stdexcept>

namespace tdgl {

GalerkinState galerkin_zero_state(const FeSystem& sys) {
    GalerkinState s;
    s.psi = Vec::Zero(2 * sys.n_S);
    s.a = Vec::Zero(2 * sys.n_S);
    return s;
}

GalerkinState galerkin_uniform_state(const FeSystem& sys, Complex psi0) {
    GalerkinState s = galerkin_zero_state(sys);
    for (int i = 0; i < sys.n_S; ++i) {
        s.psi[2 * i] = psi0.real();
        s.psi[2 * i + 1] = psi0.imag();
    }
    return s;
}

std::vector<char> normal_trace_mask(const FeSystem& sys) {
    const Mesh& m = sys.mesh;
    std::vector<char> mask(2 * m.n_vertices(), 0);
    for (int e = 0; e < m.n_edges(); ++e) {
        if (!m.edge_on_boundary(e)) continue;
        const int p = m.edges[e][0], q = m.edges[e][1];
        const Vec2 d = m.vertices[q] - m.vertices[p];
        if (std::abs(d.x()) <= 1e-12 * std::abs(d.y()))
            mask[2 * p] = mask[2 * q] = 1; // vertical segment, normal e_x
        else if (std::abs(d.y()) <= 1e-12 * std::abs(d.x()))
            mask[2 * p + 1] = mask[2 * q + 1] = 1; // horizontal segment, normal e_y
        else
            throw std::invalid_argument("normal trace constraint needs an axis-aligned boundary");
    }
    return mask;
}

namespace {

// Dirichlet elimination for homogeneous constraints: drop coupled rows and
// columns, put 1 on the constrained diagonal.
SpMat apply_zero_constraints(const SpMat& K, const std::vector<char>& mask) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(K.nonZeros());
    for (int k = 0; k < K.outerSize(); ++k)
        for (SpMat::InnerIterator it(K, k); it; ++it)
            if (!mask[it.row()] && !mask[it.col()])
                trips.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < (int)mask.size(); ++i)
        if (mask[i]) trips.emplace_back(i, i, 1.0);
    SpMat out(K.rows(), K.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

} // namespace

GalerkinStepper::GalerkinStepper(const FeSystem& sys, const StaticForms& forms,
                                 const SolverConfig& cfg)
    : sys_(sys), forms_(forms), cfg_(cfg) {
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(cfg.tau < cfg.eta))
        throw std::invalid_argument("time step must stay below eta (solvability)");
    bc_mask_ = normal_trace_mask(sys);
    mass_c_ = complex_blocks(forms.M_S);
    system_ = apply_zero_constraints(
        assemble_nodal_vector_matrix(sys, 1.0 / cfg.tau, cfg.exec), bc_mask_);
    system_ldlt_.compute(system_);
    if (system_ldlt_.info() != Eigen::Success)
        throw std::runtime_error("nodal vector operator factorization failed");
}

GalerkinStepper::StepReport GalerkinStepper::step(GalerkinState& state,
                                                  const Scenario& scenario) {
    StepReport rep;
    const double tau = cfg_.tau, eta = cfg_.eta, kappa = cfg_.kappa;
    const double t_new = state.time + tau;

    NodalAField a_old(sys_, state.a);
    std::function<double(Vec2)> h_fun;
    if (scenario.H) h_fun = [&](Vec2 x) { return scenario.H(x, t_new); };
    std::function<Vec2(Vec2)> gvec_fun;
    if (scenario.gvec) gvec_fun = [&](Vec2 x) { return scenario.gvec(x, t_new); };

    Vec rhs = assemble_nodal_load(sys_, h_fun, gvec_fun, state.psi, a_old, kappa, cfg_.exec);
    rhs += (1.0 / tau) * (mass_c_ * state.a);
    for (int i = 0; i < (int)bc_mask_.size(); ++i)
        if (bc_mask_[i]) rhs[i] = 0.0;
    Vec a_new = system_ldlt_.solve(rhs);
    a_new += system_ldlt_.solve(rhs - system_ * a_new); // one refinement pass
    rep.system_residual = (rhs - system_ * a_new).norm() / std::max(1.0, rhs.norm());

    // Order-parameter step: the damped-transport term lags the potential,
    // phi^n = -div A^n (elementwise constant).
    NegDivField phi_old(a_old);
    std::function<Complex(Vec2)> g_fun;
    if (scenario.g) g_fun = [&](Vec2 x) { return scenario.g(x, t_new); };
    Vec rhs_psi = (eta / tau) * (mass_c_ * state.psi) +
                  assemble_psi_source(sys_, state.psi, phi_old, g_fun, eta, kappa, cfg_.exec);

    NodalAField a_fresh(sys_, a_new);
    SpMat base = (eta / tau) * mass_c_ + assemble_covariant(sys_, a_fresh, kappa, cfg_.exec);
    Vec psi = state.psi;
    NewtonReport nr = solve_psi_newton(sys_, base, rhs_psi, psi, cfg_.newton_tol,
                                       cfg_.newton_max_iter, cfg_.exec);
    rep.newton_iters = nr.iters;
    rep.newton_residual = nr.residual;
    rep.newton_converged = nr.converged;

    state.psi = std::move(psi);
    state.a = std::move(a_new);
    state.time = t_new;
    return rep;
}

GalerkinRunReport run_galerkin(const FeSystem& sys, const StaticForms& forms,
                               const SolverConfig& cfg, const Scenario& scenario,
                               const GalerkinState& initial, int n_steps,
                               const std::function<void(int, const GalerkinState&)>& on_step) {
    GalerkinStepper stepper(sys, forms, cfg);
    GalerkinRunReport rep;
    rep.state = initial;
    for (int n = 1; n <= n_steps; ++n) {
        auto sr = stepper.step(rep.state, scenario);
        rep.max_newton_iters = std::max(rep.max_newton_iters, sr.newton_iters);
        rep.newton_all_converged = rep.newton_all_converged && sr.newton_converged;
        rep.max_system_residual = std::max(rep.max_system_residual, sr.system_residual);
        if (on_step) on_step(n, rep.state);
    }
    return rep;
}

} // namespace tdgl
