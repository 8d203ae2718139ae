#include "tdgl2d/stepper.hpp"

#include "tdgl2d/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace tdgl {

State zero_state(const FeSystem& sys) {
    State s;
    s.psi = Vec::Zero(2 * sys.n_S);
    s.phi = Vec::Zero(sys.n_V);
    s.a = Vec::Zero(sys.n_N);
    return s;
}

State uniform_state(const FeSystem& sys, Complex psi0) {
    State s = zero_state(sys);
    for (int i = 0; i < sys.n_S; ++i) {
        s.psi[2 * i] = psi0.real();
        s.psi[2 * i + 1] = psi0.imag();
    }
    return s;
}

EnergyParts discrete_energy(const FeSystem& sys, const Vec& psi, const AField& a,
                            const ScalarField& phi, const std::function<double(Vec2)>& H,
                            double kappa, const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_source();
    const double inv_k = 1.0 / kappa;

    struct Acc {
        double kin = 0.0, cond = 0.0, field = 0.0, gauge = 0.0;
    };
    auto parts = chunked_map<Acc>(mesh.n_triangles(), pol, [&](Acc& acc, int begin, int end) {
        for (int t = begin; t < end; ++t) {
            const auto& tri = mesh.triangles[t];
            const double area = sys.area[t];
            const Vec2* gl = sys.grad_lambda[t].data();
            const double curl = a.curl_at(t);
            Vec2 gp(0.0, 0.0), gq(0.0, 0.0);
            for (int i = 0; i < 3; ++i) {
                gp += psi[2 * tri[i]] * gl[i];
                gq += psi[2 * tri[i] + 1] * gl[i];
            }
            for (int q = 0; q < rule.size(); ++q) {
                const double lambda[3] = {1.0 - rule.x[q] - rule.y[q],
                                          rule.x[q], rule.y[q]};
                const double w = 2.0 * area * rule.w[q];
                double p = 0.0, qv = 0.0;
                for (int i = 0; i < 3; ++i) {
                    p += lambda[i] * psi[2 * tri[i]];
                    qv += lambda[i] * psi[2 * tri[i] + 1];
                }
                const Vec2 av = a.at(t, lambda);
                const Vec2 re = -inv_k * gq + p * av;
                const Vec2 im = inv_k * gp + qv * av;
                acc.kin += 0.5 * w * (re.squaredNorm() + im.squaredNorm());
                const double dens = p * p + qv * qv - 1.0;
                acc.cond += 0.25 * w * dens * dens;
                const double h_val = H ? H(sys.ref_to_phys(t, lambda[1], lambda[2])) : 0.0;
                acc.field += 0.5 * w * (curl - h_val) * (curl - h_val);
                const double ph = phi.at(t, lambda);
                acc.gauge += 0.5 * w * ph * ph;
            }
        }
    });
    EnergyParts out;
    for (const auto& p : parts) {
        out.kinetic += p.kin;
        out.condensation += p.cond;
        out.field += p.field;
        out.gauge += p.gauge;
    }
    return out;
}

NewtonReport solve_psi_newton(const FeSystem& sys, const SpMat& base, const Vec& rhs, Vec& psi,
                              double tol, int max_iter, const ExecPolicy& pol) {
    const double scale = std::max(1.0, rhs.norm());
    NewtonReport rep;

    Vec cubic_res;
    auto residual_at = [&](const Vec& u, Vec& out) {
        assemble_cubic(sys, u, &cubic_res, nullptr, pol);
        out = base * u + cubic_res - rhs;
    };

    Vec f;
    residual_at(psi, f);
    double fnorm = f.norm();

    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analyzed = false;
    SpMat cubic_jac;

    for (int iter = 1; iter <= max_iter; ++iter) {
        if (fnorm / scale <= tol) break;
        assemble_cubic(sys, psi, nullptr, &cubic_jac, pol);
        SpMat jac = base + cubic_jac;
        if (!analyzed) {
            ldlt.analyzePattern(jac);
            analyzed = true;
        }
        ldlt.factorize(jac);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("order-parameter Jacobian factorization failed");
        const Vec delta = ldlt.solve(-f);

        // Backtracking on the residual norm; accept the last candidate even
        // if the sufficient-decrease test never fires (keeps progress when
        // the step is nearly neutral).
        double alpha = 1.0;
        Vec trial, f_trial;
        double t_norm = fnorm;
        for (int h = 0; h < 7; ++h) {
            trial = psi + alpha * delta;
            residual_at(trial, f_trial);
            t_norm = f_trial.norm();
            if (t_norm <= (1.0 - 0.25 * alpha) * fnorm) break;
            alpha *= 0.5;
        }
        psi = trial;
        f = f_trial;
        fnorm = t_norm;
        rep.iters = iter;
    }
    rep.residual = fnorm / scale;
    rep.converged = rep.residual <= tol;
    return rep;
}

MixedStepper::MixedStepper(const FeSystem& sys, const StaticForms& forms, const SolverConfig& cfg)
    : sys_(sys), forms_(forms), cfg_(cfg) {
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(cfg.tau < cfg.eta))
        throw std::invalid_argument("time step must stay below eta (solvability)");

    mass_c_ = complex_blocks(forms.M_S);

    // Stationary block operator of the (phi, A) solve; factored once.
    const int n_v = sys.n_V, n_n = sys.n_N;
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(forms.M_V.nonZeros() + 2 * forms.B_div.nonZeros() +
                                      forms.M_N.nonZeros() + forms.K_curl.nonZeros()));
    for (int k = 0; k < forms.M_V.outerSize(); ++k)
        for (SpMat::InnerIterator it(forms.M_V, k); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < forms.B_div.outerSize(); ++k)
        for (SpMat::InnerIterator it(forms.B_div, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            trips.emplace_back(r, n_v + c, -it.value());
            trips.emplace_back(n_v + c, r, it.value());
        }
    const double inv_tau = 1.0 / cfg.tau;
    for (int k = 0; k < forms.M_N.outerSize(); ++k)
        for (SpMat::InnerIterator it(forms.M_N, k); it; ++it)
            trips.emplace_back(n_v + static_cast<int>(it.row()), n_v + static_cast<int>(it.col()),
                               inv_tau * it.value());
    for (int k = 0; k < forms.K_curl.outerSize(); ++k)
        for (SpMat::InnerIterator it(forms.K_curl, k); it; ++it)
            trips.emplace_back(n_v + static_cast<int>(it.row()), n_v + static_cast<int>(it.col()),
                               it.value());
    block_.resize(n_v + n_n, n_v + n_n);
    block_.setFromTriplets(trips.begin(), trips.end());
    block_.makeCompressed();

    block_lu_.compute(block_);
    if (block_lu_.info() != Eigen::Success)
        throw std::runtime_error("mixed block factorization failed");
    m_v_ldlt_.compute(forms.M_V);
    if (m_v_ldlt_.info() != Eigen::Success)
        throw std::runtime_error("scalar mass factorization failed");
}

MixedStepper::StepReport MixedStepper::step(State& state, const Scenario& scenario) {
    StepReport rep;
    const double tau = cfg_.tau, eta = cfg_.eta, kappa = cfg_.kappa;
    const double t_new = state.time + tau;
    const int n_v = sys_.n_V, n_n = sys_.n_N;

    // --- Mixed solve for (phi, A) at the new time level.
    EdgeAField a_old(sys_, state.a);
    std::function<double(Vec2)> h_fun;
    if (scenario.H) h_fun = [&](Vec2 x) { return scenario.H(x, t_new); };
    std::function<Vec2(Vec2)> gvec_fun;
    if (scenario.gvec) gvec_fun = [&](Vec2 x) { return scenario.gvec(x, t_new); };

    Vec load = assemble_edge_load(sys_, h_fun, gvec_fun, state.psi, a_old, kappa, cfg_.exec);
    load += (1.0 / tau) * (forms_.M_N * state.a);
    Vec rhs = Vec::Zero(n_v + n_n);
    rhs.tail(n_n) = load;

    Vec sol = block_lu_.solve(rhs);
    sol += block_lu_.solve(rhs - block_ * sol); // one refinement pass
    rep.block_residual = (rhs - block_ * sol).norm() / std::max(1.0, rhs.norm());

    Vec phi_new = sol.head(n_v);
    Vec a_new = sol.tail(n_n);
    rep.gauge_gap =
        (phi_new - m_v_ldlt_.solve(forms_.B_div * a_new)).lpNorm<Eigen::Infinity>();

    // --- Order-parameter solve; the damped-transport term lags phi.
    VertexField phi_old(sys_, state.phi);
    std::function<Complex(Vec2)> g_fun;
    if (scenario.g) g_fun = [&](Vec2 x) { return scenario.g(x, t_new); };
    Vec rhs_psi = (eta / tau) * (mass_c_ * state.psi) +
                  assemble_psi_source(sys_, state.psi, phi_old, g_fun, eta, kappa, cfg_.exec);

    EdgeAField a_fresh(sys_, a_new);
    SpMat base = (eta / tau) * mass_c_ + assemble_covariant(sys_, a_fresh, kappa, cfg_.exec);
    Vec psi = state.psi;
    NewtonReport nr =
        solve_psi_newton(sys_, base, rhs_psi, psi, cfg_.newton_tol, cfg_.newton_max_iter,
                         cfg_.exec);
    rep.newton_iters = nr.iters;
    rep.newton_residual = nr.residual;
    rep.newton_converged = nr.converged;

    state.psi = std::move(psi);
    state.phi = std::move(phi_new);
    state.a = std::move(a_new);
    state.time = t_new;
    return rep;
}

EnergyParts MixedStepper::energy(const State& state, const Scenario& scenario) const {
    EdgeAField a(sys_, state.a);
    VertexField phi(sys_, state.phi);
    std::function<double(Vec2)> h_fun;
    if (scenario.H) h_fun = [&](Vec2 x) { return scenario.H(x, state.time); };
    return discrete_energy(sys_, state.psi, a, phi, h_fun, cfg_.kappa, cfg_.exec);
}

RunReport run_mixed(const FeSystem& sys, const StaticForms& forms, const SolverConfig& cfg,
                    const Scenario& scenario, const State& initial, int n_steps,
                    bool track_energy, const std::function<void(int, const State&)>& on_step) {
    MixedStepper stepper(sys, forms, cfg);
    RunReport rep;
    rep.state = initial;

    double prev_total = 0.0;
    if (track_energy) {
        EnergyRow row;
        row.step = 0;
        row.time = rep.state.time;
        row.parts = stepper.energy(rep.state, scenario);
        prev_total = row.parts.total();
        rep.energy.push_back(row);
    }

    auto psi_inf = [&](const Vec& psi) {
        double worst = 0.0;
        for (int i = 0; i < sys.n_S; ++i)
            worst = std::max(worst, std::hypot(psi[2 * i], psi[2 * i + 1]));
        return worst;
    };
    rep.max_psi_inf = psi_inf(rep.state.psi);

    for (int n = 1; n <= n_steps; ++n) {
        auto sr = stepper.step(rep.state, scenario);
        rep.max_newton_iters = std::max(rep.max_newton_iters, sr.newton_iters);
        rep.newton_all_converged = rep.newton_all_converged && sr.newton_converged;
        rep.max_gauge_gap = std::max(rep.max_gauge_gap, sr.gauge_gap);
        rep.max_block_residual = std::max(rep.max_block_residual, sr.block_residual);
        rep.max_psi_inf = std::max(rep.max_psi_inf, psi_inf(rep.state.psi));

        if (track_energy) {
            EnergyRow row;
            row.step = n;
            row.time = rep.state.time;
            row.parts = stepper.energy(rep.state, scenario);
            rep.energy.push_back(row);

            const double total = row.parts.total();
            const double budget = cfg.tau * cfg.eta * cfg.kappa * cfg.kappa * prev_total;
            const double slack = total - prev_total - budget;
            rep.worst_energy_slack = std::max(rep.worst_energy_slack, slack);
            if (slack > 1e-8 * (1.0 + prev_total)) rep.energy_decay_ok = false;
            prev_total = total;
        }
        if (on_step) on_step(n, rep.state);
    }
    return rep;
}

} // namespace tdgl
