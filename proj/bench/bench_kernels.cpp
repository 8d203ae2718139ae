// Assembly-kernel benchmark: serial reference vs the chunked parallel path.
// The two must produce identical results (the unit tests assert that); this
// target reports what the parallel path buys on the current machine.

#include "tdgl2d/assembly.hpp"
#include "tdgl2d/exact_solution.hpp"
#include "tdgl2d/fe_system.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace tdgl;

namespace {

double median_ms(const std::function<void()>& body, int reps = 3) {
    std::vector<double> samples;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

void row(const std::string& name, double serial_ms, double parallel_ms) {
    std::printf("%-26s %10.2f %12.2f %9.2fx\n", name.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

} // namespace

int main() {
    DomainSpec spec;
    spec.target_h = 1.0 / 32;
    FeSystem sys = build_system(build_domain(spec));

    ExecPolicy serial;
    ExecPolicy parallel;
    parallel.parallel = true;

    std::mt19937 gen(1);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec psi(2 * sys.n_S);
    for (int i = 0; i < psi.size(); ++i) psi[i] = dist(gen);
    Vec a(sys.n_N);
    for (int i = 0; i < a.size(); ++i) a[i] = dist(gen);
    EdgeAField a_field(sys, a);
    ExactSolution exact;

    std::printf("mesh: h = 1/32, %d vertices, %d edges, %d triangles\n", sys.n_V, sys.n_N,
                sys.mesh.n_triangles());
#ifdef TDGL_HAVE_OPENMP
    std::printf("parallel path: OpenMP enabled\n\n");
#else
    std::printf("parallel path: OpenMP not compiled in (serial fallback)\n\n");
#endif
    std::printf("%-26s %10s %12s %9s\n", "kernel (median of 3)", "serial/ms", "parallel/ms",
                "speedup");

    row("static forms",
        median_ms([&] { (void)assemble_static(sys, serial); }),
        median_ms([&] { (void)assemble_static(sys, parallel); }));

    row("covariant operator",
        median_ms([&] { (void)assemble_covariant(sys, a_field, 1.0, serial); }),
        median_ms([&] { (void)assemble_covariant(sys, a_field, 1.0, parallel); }));

    row("cubic residual+jacobian",
        median_ms([&] {
            Vec r;
            SpMat j;
            assemble_cubic(sys, psi, &r, &j, serial);
        }),
        median_ms([&] {
            Vec r;
            SpMat j;
            assemble_cubic(sys, psi, &r, &j, parallel);
        }));

    auto H = exact.applied_field_at(1.0);
    row("edge load",
        median_ms([&] { (void)assemble_edge_load(sys, H, {}, psi, a_field, 1.0, serial); }),
        median_ms([&] { (void)assemble_edge_load(sys, H, {}, psi, a_field, 1.0, parallel); }));

    row("error norms",
        median_ms([&] { (void)compute_errors(sys, exact, psi, a_field, 1.0, serial); }),
        median_ms([&] { (void)compute_errors(sys, exact, psi, a_field, 1.0, parallel); }));

    return 0;
}
