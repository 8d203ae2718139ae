#include "tdgl2d/study.hpp"

#include "tdgl2d/vtk.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace tdgl {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Scenario make_scenario(const RunConfig& cfg, const ExactSolution& ex) {
    Scenario s;
    switch (cfg.scenario) {
    case ScenarioKind::Mms:
        s.H = [ex](Vec2 x, double t) { return ex.applied_field(x, t); };
        s.g = [ex](Vec2 x, double t) { return ex.source_psi(x, t); };
        s.gvec = [ex](Vec2 x, double t) { return ex.source_vector(x, t); };
        break;
    case ScenarioKind::Physical:
        s.H = [H0 = cfg.applied_field](Vec2, double) { return H0; };
        break;
    case ScenarioKind::Homogeneous:
        break;
    }
    return s;
}

State initial_state_mixed(const FeSystem& sys, const RunConfig& cfg, const ExactSolution& ex) {
    switch (cfg.scenario) {
    case ScenarioKind::Mms: {
        State st = zero_state(sys);
        st.psi = interpolate_nodal_complex(
            sys, [&](Vec2 x) { return Complex(ex.psi(x, 0.0).v, 0.0); });
        st.a = interpolate_edge(sys, [&](Vec2 x) {
            Jet2 ax, ay;
            ex.vector_potential(x, 0.0, &ax, &ay);
            return Vec2(ax.v, ay.v);
        });
        st.phi = interpolate_vertex(sys, [&](Vec2 x) {
            Jet2 ax, ay;
            ex.vector_potential(x, 0.0, &ax, &ay);
            return -(ax.gx + ay.gy);
        });
        return st;
    }
    case ScenarioKind::Physical:
        return uniform_state(sys, Complex(1.0, 0.0));
    case ScenarioKind::Homogeneous:
    default:
        return zero_state(sys);
    }
}

GalerkinState initial_state_nodal(const FeSystem& sys, const RunConfig& cfg,
                                  const ExactSolution& ex) {
    switch (cfg.scenario) {
    case ScenarioKind::Mms: {
        GalerkinState st = galerkin_zero_state(sys);
        st.psi = interpolate_nodal_complex(
            sys, [&](Vec2 x) { return Complex(ex.psi(x, 0.0).v, 0.0); });
        for (int v = 0; v < sys.n_S; ++v) {
            Jet2 ax, ay;
            ex.vector_potential(sys.mesh.vertices[static_cast<size_t>(v)], 0.0, &ax, &ay);
            st.a[2 * v] = ax.v;
            st.a[2 * v + 1] = ay.v;
        }
        return st;
    }
    case ScenarioKind::Physical:
        return galerkin_uniform_state(sys, Complex(1.0, 0.0));
    case ScenarioKind::Homogeneous:
    default:
        return galerkin_zero_state(sys);
    }
}

} // namespace

StudySummary run_study(const RunConfig& cfg) {
    validate_config(cfg);
    StudySummary summary;
    summary.config = cfg;

    namespace fs = std::filesystem;
    const fs::path out_dir(cfg.output_directory);
    const bool writes_anything = cfg.write_energy || cfg.write_errors || cfg.write_vtk;
    if (writes_anything) fs::create_directories(out_dir);

    ExecPolicy pol;
    pol.parallel = !cfg.deterministic;

    const ExactSolution ex(cfg.eta, cfg.kappa);

    Mesh mesh;
    for (size_t lvl = 0; lvl < cfg.levels.size(); ++lvl) {
        const double h = cfg.levels[lvl];
        const bool nested =
            lvl > 0 && std::abs(cfg.levels[lvl - 1] / 2.0 - h) <= 1e-12 * cfg.levels[lvl - 1];
        if (nested) {
            mesh = uniform_refine(mesh);
        } else {
            DomainSpec spec = cfg.domain;
            spec.target_h = h;
            mesh = build_domain(spec);
        }
        const FeSystem sys = build_system(mesh);
        const StaticForms forms = assemble_static(sys, pol);

        LevelSummary level;
        level.h = h;
        level.mesh = mesh_stats(mesh);
        level.tau = cfg.tau_factor * h;
        level.n_steps = std::max(1, static_cast<int>(std::llround(cfg.t_final / level.tau)));

        SolverConfig scfg;
        scfg.tau = level.tau;
        scfg.eta = cfg.eta;
        scfg.kappa = cfg.kappa;
        scfg.newton_tol = cfg.newton_tolerance;
        scfg.newton_max_iter = cfg.newton_max_iterations;
        scfg.exec = pol;

        const Scenario scenario = make_scenario(cfg, ex);

        const std::string tag = "level" + std::to_string(lvl);
        auto vtk_path = [&](int step) {
            return (out_dir / ("solution_" + tag + (step < 0 ? std::string()
                                                             : "_step" + std::to_string(step)) +
                               ".vtk"))
                .string();
        };

        if (cfg.scheme == Scheme::Mixed) {
            const State init = initial_state_mixed(sys, cfg, ex);
            std::function<void(int, const State&)> on_step;
            if (cfg.write_vtk && cfg.vtk_stride > 0)
                on_step = [&](int step, const State& st) {
                    if (step % cfg.vtk_stride == 0) {
                        write_vtk_snapshot(vtk_path(step), sys, st.psi, EdgeAField(sys, st.a));
                        summary.files_written.push_back(vtk_path(step));
                    }
                };
            RunReport rep =
                run_mixed(sys, forms, scfg, scenario, init, level.n_steps, true, on_step);

            level.max_newton_iters = rep.max_newton_iters;
            level.newton_all_converged = rep.newton_all_converged;
            level.max_gauge_gap = rep.max_gauge_gap;
            level.max_block_residual = rep.max_block_residual;
            level.max_psi_inf = rep.max_psi_inf;
            level.energy_decay_ok = rep.energy_decay_ok;
            level.worst_energy_slack = rep.worst_energy_slack;
            level.energy = std::move(rep.energy);

            if (cfg.scenario == ScenarioKind::Mms) {
                level.errors = compute_errors(sys, ex, rep.state.psi, EdgeAField(sys, rep.state.a),
                                              rep.state.time, pol);
                level.has_errors = true;
            }
            if (cfg.write_vtk) {
                write_vtk_snapshot(vtk_path(-1), sys, rep.state.psi, EdgeAField(sys, rep.state.a));
                summary.files_written.push_back(vtk_path(-1));
            }
        } else {
            const GalerkinState init = initial_state_nodal(sys, cfg, ex);
            std::function<void(int, const GalerkinState&)> on_step;
            if (cfg.write_vtk && cfg.vtk_stride > 0)
                on_step = [&](int step, const GalerkinState& st) {
                    if (step % cfg.vtk_stride == 0) {
                        write_vtk_snapshot(vtk_path(step), sys, st.psi, NodalAField(sys, st.a));
                        summary.files_written.push_back(vtk_path(step));
                    }
                };
            GalerkinRunReport rep =
                run_galerkin(sys, forms, scfg, scenario, init, level.n_steps, on_step);

            level.max_newton_iters = rep.max_newton_iters;
            level.newton_all_converged = rep.newton_all_converged;
            level.max_system_residual = rep.max_system_residual;

            if (cfg.scenario == ScenarioKind::Mms) {
                level.errors = compute_errors(sys, ex, rep.state.psi, NodalAField(sys, rep.state.a),
                                              rep.state.time, pol);
                level.has_errors = true;
            }
            if (cfg.write_vtk) {
                write_vtk_snapshot(vtk_path(-1), sys, rep.state.psi, NodalAField(sys, rep.state.a));
                summary.files_written.push_back(vtk_path(-1));
            }
        }

        if (cfg.write_energy && !level.energy.empty()) {
            const std::string path = (out_dir / ("energy_" + tag + ".csv")).string();
            write_text(path, energy_csv_text(level.energy));
            summary.files_written.push_back(path);
        }

        summary.levels.push_back(std::move(level));
    }

    const size_t n = summary.levels.size();
    if (n >= 2 && summary.levels[n - 2].has_errors && summary.levels[n - 1].has_errors) {
        const ErrorNorms& coarse = summary.levels[n - 2].errors;
        const ErrorNorms& fine = summary.levels[n - 1].errors;
        summary.rates.psi = std::log2(coarse.psi / fine.psi);
        summary.rates.abs_psi = std::log2(coarse.abs_psi / fine.abs_psi);
        summary.rates.a = std::log2(coarse.a / fine.a);
        summary.rates.b = std::log2(coarse.b / fine.b);
        summary.has_rates = true;
    }

    if (cfg.write_errors && cfg.scenario == ScenarioKind::Mms) {
        const std::string path = (out_dir / "errors.csv").string();
        write_text(path, errors_csv_text(summary));
        summary.files_written.push_back(path);
    }
    return summary;
}

std::string errors_csv_text(const StudySummary& summary) {
    std::string body = "scheme,level,h,tau,err_psi,err_abs_psi,err_a,err_b\n";
    const std::string scheme = summary.config.scheme == Scheme::Mixed ? "mixed" : "galerkin";
    for (size_t i = 0; i < summary.levels.size(); ++i) {
        const LevelSummary& lv = summary.levels[i];
        if (!lv.has_errors) continue;
        body += scheme + "," + std::to_string(i) + "," + fmt(lv.h) + "," + fmt(lv.tau) + "," +
                fmt(lv.errors.psi) + "," + fmt(lv.errors.abs_psi) + "," + fmt(lv.errors.a) + "," +
                fmt(lv.errors.b) + "\n";
    }
    if (summary.has_rates)
        body += scheme + ",rate,,," + fmt(summary.rates.psi) + "," + fmt(summary.rates.abs_psi) +
                "," + fmt(summary.rates.a) + "," + fmt(summary.rates.b) + "\n";
    return body;
}

std::string energy_csv_text(const std::vector<EnergyRow>& rows) {
    std::string body = "step,time,G,kinetic,condensation,field,gauge\n";
    for (const EnergyRow& r : rows)
        body += std::to_string(r.step) + "," + fmt(r.time) + "," + fmt(r.parts.total()) + "," +
                fmt(r.parts.kinetic) + "," + fmt(r.parts.condensation) + "," + fmt(r.parts.field) +
                "," + fmt(r.parts.gauge) + "\n";
    return body;
}

} // namespace tdgl
