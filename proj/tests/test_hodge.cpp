#include "tdgl2d/hodge.hpp"

#include "tdgl2d/assembly.hpp"
#include "tdgl2d/fe_system.hpp"

#include <cmath>
#include <doctest.h>
#include <random>

using namespace tdgl;

namespace {

struct Setup {
    FeSystem sys;
    StaticForms forms;
    HodgeDecomposition hodge;

    explicit Setup(DomainKind kind, double h)
        : sys(build_system(build_domain([&] {
              DomainSpec spec;
              spec.kind = kind;
              spec.target_h = h;
              return spec;
          }()))),
          forms(assemble_static(sys)), hodge(sys, forms) {}
};

Vec random_vec(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(gen);
    return v;
}

double mass_dot(const SpMat& m, const Vec& a, const Vec& b) { return a.dot(m * b); }

} // namespace

TEST_CASE("simply connected domain: no harmonic fields, curl-free means gradient") {
    Setup s(DomainKind::LShape, 0.125);
    CHECK(s.hodge.betti() == 0);
    CHECK(s.hodge.harmonic_basis().size() == 0);

    // A discrete gradient decomposes into its potential alone.
    Vec chi = random_vec(s.sys.n_V, 17);
    chi.array() -= chi.mean();
    Vec a = s.forms.G * chi;
    auto split = s.hodge.decompose(a);
    CHECK(split.harmonic.size() == 0);
    CHECK((s.forms.G * split.theta - a).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(split.remainder.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("holed domain: one harmonic field, curl-free and divergence-free") {
    for (double h : {0.25, 0.125}) {
        Setup s(DomainKind::LShapeWithHole, h);
        CHECK(s.hodge.betti() == 1);
        REQUIRE(s.hodge.harmonic_basis().size() == 1);
        const Vec& hvec = s.hodge.harmonic_basis()[0];

        // Elementwise curl vanishes.
        CHECK((s.forms.C * hvec).cwiseAbs().maxCoeff() < 1e-10);
        // Discrete divergence vanishes: orthogonal to every gradient.
        CHECK((s.forms.G.transpose() * (s.forms.M_N * hvec)).cwiseAbs().maxCoeff() < 1e-10);
        // Normalized in the L2 mass.
        CHECK(mass_dot(s.forms.M_N, hvec, hvec) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("harmonic field circulates around the hole") {
    Setup s(DomainKind::LShapeWithHole, 0.125);
    const Vec& hvec = s.hodge.harmonic_basis()[0];

    // The field is curl-free, so its circulations along the outer boundary
    // and around the hole agree up to the (unspecified) loop orientations,
    // and both are nonzero -- that is what makes the field nontrivial.
    REQUIRE(s.sys.mesh.n_loops == 2);
    double outer = s.hodge.circulation(hvec, s.hodge.boundary_cycle(0));
    double inner = s.hodge.circulation(hvec, s.hodge.boundary_cycle(1));
    CHECK(std::abs(outer) > 1e-3);
    CHECK(std::abs(outer) == doctest::Approx(std::abs(inner)).epsilon(1e-9));

    // A gradient circulates not at all (telescoping sum).
    Vec chi = random_vec(s.sys.n_V, 23);
    double grad_circ = s.hodge.circulation(s.forms.G * chi, s.hodge.boundary_cycle(1));
    CHECK(std::abs(grad_circ) < 1e-10);
}

TEST_CASE("decomposition reassembles and is mass-orthogonal") {
    Setup s(DomainKind::LShapeWithHole, 0.125);
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    for (int trial = 0; trial < 20; ++trial) {
        Vec a(s.sys.n_N);
        for (int i = 0; i < a.size(); ++i) a[i] = dist(gen);

        auto split = s.hodge.decompose(a);
        REQUIRE(split.harmonic.size() == 1);
        Vec grad = s.forms.G * split.theta;
        Vec recomposed = grad + split.harmonic[0] * s.hodge.harmonic_basis()[0] +
                         split.remainder;
        CHECK((recomposed - a).cwiseAbs().maxCoeff() < 1e-9);

        Vec harm = split.harmonic[0] * s.hodge.harmonic_basis()[0];
        CHECK(std::abs(mass_dot(s.forms.M_N, grad, harm)) < 1e-9);
        CHECK(std::abs(mass_dot(s.forms.M_N, grad, split.remainder)) < 1e-9);
        CHECK(std::abs(mass_dot(s.forms.M_N, harm, split.remainder)) < 1e-9);
    }
}

TEST_CASE("discrete divergence inverts the weak pairing") {
    Setup s(DomainKind::LShapeWithHole, 0.125);

    // div_h(G chi) solves M_V d = -B_div (G chi) = -K_V chi, the discrete
    // Laplacian of the potential.
    Vec chi = random_vec(s.sys.n_V, 31);
    Vec d = s.hodge.discrete_divergence(s.forms.G * chi);
    Vec residual = s.forms.M_V * d + s.forms.K_V * chi;
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);

    // The harmonic field is divergence-free.
    Vec dh = s.hodge.discrete_divergence(s.hodge.harmonic_basis()[0]);
    CHECK(dh.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gradient potential recovers the potential of a gradient") {
    Setup s(DomainKind::LShapeWithHole, 0.125);
    Vec chi = random_vec(s.sys.n_V, 41);
    chi.array() -= chi.mean();

    Vec theta = s.hodge.gradient_potential(s.forms.G * chi);
    theta.array() -= theta.mean();
    CHECK((theta - chi).cwiseAbs().maxCoeff() < 1e-9);

    CHECK(s.hodge.gradient_embedding_gap(chi) < 1e-12);
}

TEST_CASE("vertex gradients embed exactly into the edge space") {
    Setup s(DomainKind::LShapeWithHole, 0.25);

    // apply_vertex_gradient must agree with the sparse G.
    Vec chi = random_vec(s.sys.n_V, 53);
    Vec g1 = s.hodge.apply_vertex_gradient(chi);
    Vec g2 = s.forms.G * chi;
    CHECK((g1 - g2).cwiseAbs().maxCoeff() == 0.0);

    // The edge dofs of an interpolated vertex gradient are the endpoint
    // differences of the potential -- the pairing is exact, not approximate.
    auto pot = [](Vec2 x) { return std::sin(x.x()) * x.y() + 0.5 * x.x(); };
    Vec chi_h = interpolate_vertex(s.sys, pot);
    Vec direct = s.forms.G * chi_h;
    for (int e = 0; e < s.sys.n_N; ++e) {
        int p = s.sys.mesh.edges[e][0], q = s.sys.mesh.edges[e][1];
        CHECK(direct[e] == doctest::Approx(chi_h[q] - chi_h[p]).epsilon(1e-13));
    }
}

TEST_CASE("embedding diagnostic reports bounded ratios") {
    Setup s(DomainKind::LShapeWithHole, 0.25);
    for (unsigned seed : {61u, 62u, 63u, 64u}) {
        Vec a = random_vec(s.sys.n_N, seed);
        auto row = s.hodge.embedding_diagnostic(a);
        CHECK(row.l2 > 0.0);
        CHECK(row.l4 > 0.0);
        CHECK(row.curl >= 0.0);
        CHECK(row.div_h >= 0.0);
        CHECK(std::isfinite(row.ratio()));
        CHECK(row.ratio() > 0.0);
    }
}
