#include "tdgl2d/config.hpp"
#include "tdgl2d/study.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>

namespace {

void print_summary(const tdgl::StudySummary& summary) {
    const tdgl::RunConfig& cfg = summary.config;
    std::printf("scheme: %s\n", cfg.scheme == tdgl::Scheme::Mixed ? "mixed" : "galerkin");
    for (size_t i = 0; i < summary.levels.size(); ++i) {
        const tdgl::LevelSummary& lv = summary.levels[i];
        std::printf("level %zu: h = %-10.6g tau = %-10.6g steps = %-5d newton <= %d\n", i, lv.h,
                    lv.tau, lv.n_steps, lv.max_newton_iters);
        if (lv.has_errors)
            std::printf("  errors: psi %.4e  |psi| %.4e  A %.4e  B %.4e\n", lv.errors.psi,
                        lv.errors.abs_psi, lv.errors.a, lv.errors.b);
        if (!lv.energy.empty()) {
            std::printf("  energy: G(0) = %.6e  G(T) = %.6e", lv.energy.front().parts.total(),
                        lv.energy.back().parts.total());
            // The decay inequality only applies without source terms.
            if (cfg.scenario != tdgl::ScenarioKind::Mms)
                std::printf("  decay %s", lv.energy_decay_ok ? "ok" : "VIOLATED");
            std::printf("\n");
        }
    }
    if (summary.has_rates)
        std::printf("rates (two finest): psi %.2f  |psi| %.2f  A %.2f  B %.2f\n",
                    summary.rates.psi, summary.rates.abs_psi, summary.rates.a, summary.rates.b);
    for (const std::string& f : summary.files_written) std::printf("wrote %s\n", f.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D time-dependent superconductivity: mixed edge-element and nodal solvers"};
    std::string config_path, out_dir, scheme;
    int levels = 0;
    bool deterministic = false;
    app.add_option("--config", config_path, "INI-style study configuration")->required();
    app.add_option("--out", out_dir, "override the output directory");
    app.add_option("--levels", levels, "run only the first N mesh levels");
    app.add_option("--scheme", scheme, "override the scheme: mixed | galerkin");
    app.add_flag("--deterministic", deterministic, "single-threaded bitwise-reproducible run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad flags are configuration errors
    }

    try {
        tdgl::RunConfig cfg = tdgl::load_config(config_path);
        if (!out_dir.empty()) cfg.output_directory = out_dir;
        if (deterministic) cfg.deterministic = true;
        if (app.count("--scheme") > 0) {
            if (scheme == "mixed")
                cfg.scheme = tdgl::Scheme::Mixed;
            else if (scheme == "galerkin")
                cfg.scheme = tdgl::Scheme::Galerkin;
            else
                throw tdgl::ConfigError("--scheme: unknown value '" + scheme + "'");
        }
        if (app.count("--levels") > 0) {
            if (levels < 1) throw tdgl::ConfigError("--levels: must be at least 1");
            cfg.levels.resize(std::min(cfg.levels.size(), static_cast<size_t>(levels)));
        }
        tdgl::validate_config(cfg);

        const tdgl::StudySummary summary = tdgl::run_study(cfg);
        print_summary(summary);
        for (const tdgl::LevelSummary& lv : summary.levels)
            if (!lv.newton_all_converged) {
                std::fprintf(stderr, "solver failure: Newton did not converge on every step\n");
                return 3;
            }
        return 0;
    } catch (const tdgl::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    }
}
