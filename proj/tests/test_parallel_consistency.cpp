#include "tdgl2d/assembly.hpp"

#include "tdgl2d/exact_solution.hpp"
#include "tdgl2d/fe_system.hpp"
#include "tdgl2d/stepper.hpp"

#include <doctest.h>
#include <random>

using namespace tdgl;

// The parallel kernels must agree with the serial reference bit for bit:
// chunks are contiguous and combined in a fixed order, so scheduling cannot
// reorder any floating-point reduction.

namespace {

FeSystem holed_system(double h) {
    DomainSpec spec;
    spec.target_h = h;
    return build_system(build_domain(spec));
}

double sparse_diff(const SpMat& a, const SpMat& b) {
    SpMat d = a - b;
    double v = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (SpMat::InnerIterator it(d, k); it; ++it) v = std::max(v, std::abs(it.value()));
    return v;
}

Vec random_vec(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(gen);
    return v;
}

} // namespace

TEST_CASE("static forms: parallel equals serial exactly") {
    FeSystem sys = holed_system(1.0 / 16);
    ExecPolicy serial;
    ExecPolicy parallel;
    parallel.parallel = true;

    StaticForms fs = assemble_static(sys, serial);
    StaticForms fp = assemble_static(sys, parallel);
    CHECK(sparse_diff(fs.M_S, fp.M_S) == 0.0);
    CHECK(sparse_diff(fs.K_S, fp.K_S) == 0.0);
    CHECK(sparse_diff(fs.M_N, fp.M_N) == 0.0);
    CHECK(sparse_diff(fs.K_curl, fp.K_curl) == 0.0);
    CHECK(sparse_diff(fs.B_div, fp.B_div) == 0.0);
    CHECK(sparse_diff(fs.C, fp.C) == 0.0);
}

TEST_CASE("state-dependent kernels: parallel equals serial exactly") {
    FeSystem sys = holed_system(1.0 / 16);
    ExecPolicy serial;
    ExecPolicy parallel;
    parallel.parallel = true;
    parallel.chunk = 128; // also exercise a non-default chunk size

    Vec psi = random_vec(2 * sys.n_S, 1);
    Vec a = random_vec(sys.n_N, 2);
    Vec phi_v = random_vec(sys.n_V, 3);
    EdgeAField a_field(sys, a);
    VertexField phi(sys, phi_v);

    CHECK(sparse_diff(assemble_covariant(sys, a_field, 0.8, serial),
                      assemble_covariant(sys, a_field, 0.8, parallel)) == 0.0);

    Vec rs, rp;
    SpMat js, jp;
    assemble_cubic(sys, psi, &rs, &js, serial);
    assemble_cubic(sys, psi, &rp, &jp, parallel);
    CHECK((rs - rp).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sparse_diff(js, jp) == 0.0);

    auto g = [](Vec2 x) { return Complex(x.x(), x.y()); };
    Vec ss = assemble_psi_source(sys, psi, phi, g, 1.2, 0.9, serial);
    Vec sp = assemble_psi_source(sys, psi, phi, g, 1.2, 0.9, parallel);
    CHECK((ss - sp).cwiseAbs().maxCoeff() == 0.0);

    auto H = [](Vec2 x) { return x.x() * x.y(); };
    Vec ls = assemble_edge_load(sys, H, {}, psi, a_field, 1.1, serial);
    Vec lp = assemble_edge_load(sys, H, {}, psi, a_field, 1.1, parallel);
    CHECK((ls - lp).cwiseAbs().maxCoeff() == 0.0);

    Vec ns = assemble_nodal_load(sys, H, {}, psi, a_field, 1.1, serial);
    Vec np = assemble_nodal_load(sys, H, {}, psi, a_field, 1.1, parallel);
    CHECK((ns - np).cwiseAbs().maxCoeff() == 0.0);

    CHECK(sparse_diff(assemble_nodal_vector_matrix(sys, 10.0, serial),
                      assemble_nodal_vector_matrix(sys, 10.0, parallel)) == 0.0);
}

TEST_CASE("error norms: parallel equals serial exactly") {
    FeSystem sys = holed_system(1.0 / 8);
    ExactSolution exact;
    Vec psi = random_vec(2 * sys.n_S, 4);
    Vec a = random_vec(sys.n_N, 5);
    EdgeAField a_field(sys, a);

    ExecPolicy parallel;
    parallel.parallel = true;
    ErrorNorms es = compute_errors(sys, exact, psi, a_field, 0.7);
    ErrorNorms ep = compute_errors(sys, exact, psi, a_field, 0.7, parallel);
    CHECK(es.psi == ep.psi);
    CHECK(es.abs_psi == ep.abs_psi);
    CHECK(es.a == ep.a);
    CHECK(es.b == ep.b);
}

TEST_CASE("time stepping: parallel run reproduces the serial states bitwise") {
    FeSystem sys = holed_system(1.0 / 8);
    StaticForms forms = assemble_static(sys);

    Scenario applied;
    applied.H = [](Vec2, double) { return 1.0; };

    SolverConfig serial_cfg;
    serial_cfg.tau = 0.02;
    SolverConfig parallel_cfg = serial_cfg;
    parallel_cfg.exec.parallel = true;

    State init = uniform_state(sys, Complex(1.0, 0.0));
    RunReport rs = run_mixed(sys, forms, serial_cfg, applied, init, 3, true);
    RunReport rp = run_mixed(sys, forms, parallel_cfg, applied, init, 3, true);

    CHECK((rs.state.psi - rp.state.psi).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rs.state.a - rp.state.a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rs.state.phi - rp.state.phi).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(rs.energy.size() == rp.energy.size());
    for (size_t i = 0; i < rs.energy.size(); ++i)
        CHECK(rs.energy[i].parts.total() == rp.energy[i].parts.total());
}

TEST_CASE("chunk size never changes a result") {
    FeSystem sys = holed_system(1.0 / 8);
    Vec psi = random_vec(2 * sys.n_S, 6);

    for (int chunk : {1, 17, 64, 4096}) {
        ExecPolicy pol;
        pol.parallel = true;
        pol.chunk = chunk;
        Vec r_ref, r;
        assemble_cubic(sys, psi, &r_ref, nullptr, ExecPolicy{});
        assemble_cubic(sys, psi, &r, nullptr, pol);
        CHECK((r_ref - r).cwiseAbs().maxCoeff() == 0.0);
    }
}
