#include "tdgl2d/assembly.hpp"

#include "tdgl2d/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace tdgl {

SpMat matrix_from_chunks(int rows, int cols, const std::vector<std::vector<Triplet>>& parts) {
    std::vector<Triplet> all;
    size_t total = 0;
    for (const auto& p : parts) total += p.size();
    all.reserve(total);
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    SpMat m(rows, cols);
    m.setFromTriplets(all.begin(), all.end());
    m.makeCompressed();
    return m;
}

void vector_from_chunks(Vec& out, const std::vector<std::vector<std::pair<int, double>>>& parts) {
    for (const auto& p : parts)
        for (const auto& [i, v] : p) out[i] += v;
}

double max_asymmetry(const SpMat& m) {
    SpMat d = SpMat(m.transpose()) - m;
    double worst = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (SpMat::InnerIterator it(d, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return worst;
}

SpMat complex_blocks(const SpMat& m) {
    std::vector<Triplet> trips;
    trips.reserve(2 * static_cast<size_t>(m.nonZeros()));
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            trips.emplace_back(2 * static_cast<int>(it.row()), 2 * static_cast<int>(it.col()),
                               it.value());
            trips.emplace_back(2 * static_cast<int>(it.row()) + 1,
                               2 * static_cast<int>(it.col()) + 1, it.value());
        }
    SpMat out(2 * m.rows(), 2 * m.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

namespace {

using TripChunk = std::vector<Triplet>;
using VecChunk = std::vector<std::pair<int, double>>;

inline void barycentric(const TriangleRule& rule, size_t q, double lambda[3]) {
    lambda[1] = rule.x[q];
    lambda[2] = rule.y[q];
    lambda[0] = 1.0 - lambda[1] - lambda[2];
}

} // namespace

StaticForms assemble_static(const FeSystem& sys, const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_forms();
    const int n_tri = mesh.n_triangles();

    struct Partial {
        TripChunk m_s, k_s, m_n, k_curl, b_div, c;
    };

    auto parts = chunked_map<Partial>(n_tri, pol, [&](Partial& out, int begin, int end) {
        for (int t = begin; t < end; ++t) {
            const auto& tri = mesh.triangles[t];
            const double area = sys.area[t];
            const Vec2* gl = sys.grad_lambda[t].data();
            const auto& te = mesh.tri_edges[t];

            // Constant integrands: P1 stiffness, edge curl-curl, elementwise curl.
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    out.k_s.emplace_back(tri[i], tri[j], area * gl[i].dot(gl[j]));
            for (int i = 0; i < 3; ++i) {
                const double ci = sys.whitney_curl(t, i);
                out.c.emplace_back(t, te[i], ci);
                for (int j = 0; j < 3; ++j)
                    out.k_curl.emplace_back(te[i], te[j], area * ci * sys.whitney_curl(t, j));
            }

            double m_s[3][3] = {};
            double m_n[3][3] = {};
            double b_div[3][3] = {};
            for (int q = 0; q < rule.size(); ++q) {
                double lambda[3];
                barycentric(rule, q, lambda);
                const double w = 2.0 * area * rule.w[q];

                Vec2 wh[3];
                sys.whitney(t, lambda, wh);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        m_s[i][j] += w * lambda[i] * lambda[j];
                        m_n[i][j] += w * wh[i].dot(wh[j]);
                        b_div[i][j] += w * wh[j].dot(gl[i]);
                    }
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    out.m_s.emplace_back(tri[i], tri[j], m_s[i][j]);
                    out.m_n.emplace_back(te[i], te[j], m_n[i][j]);
                    out.b_div.emplace_back(tri[i], te[j], b_div[i][j]);
                }
        }
    });

    StaticForms f;
    std::vector<TripChunk> tmp;
    auto gather = [&](TripChunk Partial::* field) {
        tmp.clear();
        for (auto& p : parts) tmp.push_back(std::move(p.*field));
        return tmp;
    };
    const int n_v = sys.n_V, n_s = sys.n_S, n_n = sys.n_N;
    f.M_S = matrix_from_chunks(n_s, n_s, gather(&Partial::m_s));
    f.K_S = matrix_from_chunks(n_s, n_s, gather(&Partial::k_s));
    // V_h and the real part of S_h share the P1 vertex basis, so the potential
    // space reuses the scalar mass and stiffness matrices.
    f.M_V = f.M_S;
    f.K_V = f.K_S;
    f.M_N = matrix_from_chunks(n_n, n_n, gather(&Partial::m_n));
    f.K_curl = matrix_from_chunks(n_n, n_n, gather(&Partial::k_curl));
    f.B_div = matrix_from_chunks(n_v, n_n, gather(&Partial::b_div));
    f.C = matrix_from_chunks(n_tri, n_n, gather(&Partial::c));

    // Edge-interpolated gradient: (G chi)_e = chi(b) - chi(a) for the edge
    // (a, b) oriented low-to-high vertex id. Uses vertex values only.
    {
        std::vector<Triplet> trips;
        trips.reserve(2 * static_cast<size_t>(sys.n_N));
        for (int e = 0; e < sys.n_N; ++e) {
            trips.emplace_back(e, mesh.edges[e][0], -1.0);
            trips.emplace_back(e, mesh.edges[e][1], 1.0);
        }
        f.G.resize(sys.n_N, sys.n_V);
        f.G.setFromTriplets(trips.begin(), trips.end());
        f.G.makeCompressed();
    }
    return f;
}

SpMat assemble_covariant(const FeSystem& sys, const AField& a, double kappa,
                         const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_forms();
    const double inv_k = 1.0 / kappa;

    auto parts = chunked_map<TripChunk>(
        mesh.n_triangles(), pol, [&](TripChunk& out, int begin, int end) {
            for (int t = begin; t < end; ++t) {
                const auto& tri = mesh.triangles[t];
                const double area = sys.area[t];
                const Vec2* gl = sys.grad_lambda[t].data();
                double re[3][3] = {}, im[3][3] = {};
                for (int q = 0; q < rule.size(); ++q) {
                    double lambda[3];
                    barycentric(rule, q, lambda);
                    const double w = 2.0 * area * rule.w[q];
                    const Vec2 av = a.at(t, lambda);
                    const double a2 = av.squaredNorm();
                    for (int j = 0; j < 3; ++j)
                        for (int k = 0; k < 3; ++k) {
                            re[j][k] += w * (inv_k * inv_k * gl[j].dot(gl[k]) +
                                             a2 * lambda[j] * lambda[k]);
                            im[j][k] += w * inv_k * (lambda[j] * gl[k] - lambda[k] * gl[j]).dot(av);
                        }
                }
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) {
                        const int r = 2 * tri[j], c = 2 * tri[k];
                        out.emplace_back(r, c, re[j][k]);
                        out.emplace_back(r + 1, c + 1, re[j][k]);
                        out.emplace_back(r, c + 1, -im[j][k]);
                        out.emplace_back(r + 1, c, im[j][k]);
                    }
            }
        });
    return matrix_from_chunks(2 * sys.n_S, 2 * sys.n_S, parts);
}

void assemble_cubic(const FeSystem& sys, const Vec& psi, Vec* residual, SpMat* jacobian,
                    const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_forms();

    struct Partial {
        VecChunk res;
        TripChunk jac;
    };
    auto parts = chunked_map<Partial>(
        mesh.n_triangles(), pol, [&](Partial& out, int begin, int end) {
            for (int t = begin; t < end; ++t) {
                const auto& tri = mesh.triangles[t];
                const double area = sys.area[t];
                double res[6] = {};
                double jac[6][6] = {};
                for (int q = 0; q < rule.size(); ++q) {
                    double lambda[3];
                    barycentric(rule, q, lambda);
                    const double w = 2.0 * area * rule.w[q];
                    double p = 0.0, qq = 0.0;
                    for (int i = 0; i < 3; ++i) {
                        p += lambda[i] * psi[2 * tri[i]];
                        qq += lambda[i] * psi[2 * tri[i] + 1];
                    }
                    const double f = p * p + qq * qq - 1.0;
                    if (residual) {
                        for (int j = 0; j < 3; ++j) {
                            res[2 * j] += w * f * p * lambda[j];
                            res[2 * j + 1] += w * f * qq * lambda[j];
                        }
                    }
                    if (jacobian) {
                        const double jpp = f + 2.0 * p * p;
                        const double jpq = 2.0 * p * qq;
                        const double jqq = f + 2.0 * qq * qq;
                        for (int j = 0; j < 3; ++j)
                            for (int k = 0; k < 3; ++k) {
                                const double s = w * lambda[j] * lambda[k];
                                jac[2 * j][2 * k] += s * jpp;
                                jac[2 * j][2 * k + 1] += s * jpq;
                                jac[2 * j + 1][2 * k] += s * jpq;
                                jac[2 * j + 1][2 * k + 1] += s * jqq;
                            }
                    }
                }
                if (residual)
                    for (int j = 0; j < 3; ++j) {
                        out.res.emplace_back(2 * tri[j], res[2 * j]);
                        out.res.emplace_back(2 * tri[j] + 1, res[2 * j + 1]);
                    }
                if (jacobian)
                    for (int j = 0; j < 3; ++j)
                        for (int k = 0; k < 3; ++k) {
                            const int r = 2 * tri[j], c = 2 * tri[k];
                            out.jac.emplace_back(r, c, jac[2 * j][2 * k]);
                            out.jac.emplace_back(r, c + 1, jac[2 * j][2 * k + 1]);
                            out.jac.emplace_back(r + 1, c, jac[2 * j + 1][2 * k]);
                            out.jac.emplace_back(r + 1, c + 1, jac[2 * j + 1][2 * k + 1]);
                        }
            }
        });

    if (residual) {
        residual->setZero(2 * sys.n_S);
        std::vector<VecChunk> res_parts;
        res_parts.reserve(parts.size());
        for (auto& p : parts) res_parts.push_back(std::move(p.res));
        vector_from_chunks(*residual, res_parts);
    }
    if (jacobian) {
        std::vector<TripChunk> jac_parts;
        jac_parts.reserve(parts.size());
        for (auto& p : parts) jac_parts.push_back(std::move(p.jac));
        *jacobian = matrix_from_chunks(2 * sys.n_S, 2 * sys.n_S, jac_parts);
    }
}

Vec assemble_psi_source(const FeSystem& sys, const Vec& psi_n, const ScalarField& phi_n,
                        const std::function<Complex(Vec2)>& g, double eta, double kappa,
                        const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_source();

    auto parts = chunked_map<VecChunk>(
        mesh.n_triangles(), pol, [&](VecChunk& out, int begin, int end) {
            for (int t = begin; t < end; ++t) {
                const auto& tri = mesh.triangles[t];
                const double area = sys.area[t];
                double acc[6] = {};
                for (int q = 0; q < rule.size(); ++q) {
                    double lambda[3];
                    barycentric(rule, q, lambda);
                    const double w = 2.0 * area * rule.w[q];
                    double p = 0.0, qq = 0.0;
                    for (int i = 0; i < 3; ++i) {
                        p += lambda[i] * psi_n[2 * tri[i]];
                        qq += lambda[i] * psi_n[2 * tri[i] + 1];
                    }
                    // Theta(z) = z / max(|z|, 1).
                    const double mag = std::sqrt(p * p + qq * qq);
                    const double scale = 1.0 / std::max(mag, 1.0);
                    const double phi_val = phi_n.at(t, lambda);
                    // -i eta kappa Theta(psi_n) phi_n
                    Complex c(eta * kappa * qq * scale * phi_val,
                              -eta * kappa * p * scale * phi_val);
                    if (g) c += g(sys.ref_to_phys(t, lambda[1], lambda[2]));
                    for (int j = 0; j < 3; ++j) {
                        acc[2 * j] += w * c.real() * lambda[j];
                        acc[2 * j + 1] += w * c.imag() * lambda[j];
                    }
                }
                for (int j = 0; j < 3; ++j) {
                    out.emplace_back(2 * tri[j], acc[2 * j]);
                    out.emplace_back(2 * tri[j] + 1, acc[2 * j + 1]);
                }
            }
        });
    Vec rhs = Vec::Zero(2 * sys.n_S);
    vector_from_chunks(rhs, parts);
    return rhs;
}

namespace {

// Supercurrent J_s = |psi|^2 A + kappa^{-1} (Im psi grad Re psi - Re psi grad Im psi)
// at one quadrature point; the P1 gradients are constant on the element.
Vec2 supercurrent(const FeSystem& sys, int t, const double lambda[3], const Vec& psi,
                  const AField& a, double inv_kappa) {
    const auto& tri = sys.mesh.triangles[t];
    const Vec2* gl = sys.grad_lambda[t].data();
    double p = 0.0, q = 0.0;
    Vec2 gp(0.0, 0.0), gq(0.0, 0.0);
    for (int i = 0; i < 3; ++i) {
        p += lambda[i] * psi[2 * tri[i]];
        q += lambda[i] * psi[2 * tri[i] + 1];
        gp += psi[2 * tri[i]] * gl[i];
        gq += psi[2 * tri[i] + 1] * gl[i];
    }
    return (p * p + q * q) * a.at(t, lambda) + inv_kappa * (q * gp - p * gq);
}

} // namespace

Vec assemble_edge_load(const FeSystem& sys, const std::function<double(Vec2)>& H,
                       const std::function<Vec2(Vec2)>& gvec, const Vec& psi_n,
                       const AField& a_n, double kappa, const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_source();
    const double inv_k = 1.0 / kappa;

    auto parts = chunked_map<VecChunk>(
        mesh.n_triangles(), pol, [&](VecChunk& out, int begin, int end) {
            for (int t = begin; t < end; ++t) {
                const auto& te = mesh.tri_edges[t];
                const double area = sys.area[t];
                const double curls[3] = {sys.whitney_curl(t, 0), sys.whitney_curl(t, 1),
                                         sys.whitney_curl(t, 2)};
                double acc[3] = {};
                for (int q = 0; q < rule.size(); ++q) {
                    double lambda[3];
                    barycentric(rule, q, lambda);
                    const double w = 2.0 * area * rule.w[q];
                    const Vec2 x = sys.ref_to_phys(t, lambda[1], lambda[2]);
                    Vec2 wh[3];
                    sys.whitney(t, lambda, wh);
                    const double h_val = H ? H(x) : 0.0;
                    Vec2 fv = -supercurrent(sys, t, lambda, psi_n, a_n, inv_k);
                    if (gvec) fv += gvec(x);
                    for (int k = 0; k < 3; ++k)
                        acc[k] += w * (h_val * curls[k] + fv.dot(wh[k]));
                }
                for (int k = 0; k < 3; ++k) out.emplace_back(te[k], acc[k]);
            }
        });
    Vec rhs = Vec::Zero(sys.n_N);
    vector_from_chunks(rhs, parts);
    return rhs;
}

Vec assemble_nodal_load(const FeSystem& sys, const std::function<double(Vec2)>& H,
                        const std::function<Vec2(Vec2)>& gvec, const Vec& psi_n,
                        const AField& a_n, double kappa, const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_source();
    const double inv_k = 1.0 / kappa;

    auto parts = chunked_map<VecChunk>(
        mesh.n_triangles(), pol, [&](VecChunk& out, int begin, int end) {
            for (int t = begin; t < end; ++t) {
                const auto& tri = mesh.triangles[t];
                const double area = sys.area[t];
                const Vec2* gl = sys.grad_lambda[t].data();
                double acc[6] = {};
                for (int q = 0; q < rule.size(); ++q) {
                    double lambda[3];
                    barycentric(rule, q, lambda);
                    const double w = 2.0 * area * rule.w[q];
                    const Vec2 x = sys.ref_to_phys(t, lambda[1], lambda[2]);
                    const double h_val = H ? H(x) : 0.0;
                    Vec2 fv = -supercurrent(sys, t, lambda, psi_n, a_n, inv_k);
                    if (gvec) fv += gvec(x);
                    for (int i = 0; i < 3; ++i) {
                        // curl(lambda_i e_x) = -d_y lambda_i, curl(lambda_i e_y) = d_x lambda_i.
                        acc[2 * i] += w * (fv.x() * lambda[i] - h_val * gl[i].y());
                        acc[2 * i + 1] += w * (fv.y() * lambda[i] + h_val * gl[i].x());
                    }
                }
                for (int i = 0; i < 3; ++i) {
                    out.emplace_back(2 * tri[i], acc[2 * i]);
                    out.emplace_back(2 * tri[i] + 1, acc[2 * i + 1]);
                }
            }
        });
    Vec rhs = Vec::Zero(2 * sys.n_S);
    vector_from_chunks(rhs, parts);
    return rhs;
}

SpMat assemble_nodal_vector_matrix(const FeSystem& sys, double mass_coef, const ExecPolicy& pol) {
    const Mesh& mesh = sys.mesh;
    const TriangleRule& rule = tri_rule_forms();

    auto parts = chunked_map<TripChunk>(
        mesh.n_triangles(), pol, [&](TripChunk& out, int begin, int end) {
            for (int t = begin; t < end; ++t) {
                const auto& tri = mesh.triangles[t];
                const double area = sys.area[t];
                const Vec2* gl = sys.grad_lambda[t].data();
                double loc[6][6] = {};
                // div(lambda_i e_c) and curl(lambda_i e_c) are elementwise constant:
                // div = gl[i][c]; curl(lambda_i e_x) = -gl[i].y, curl(lambda_i e_y) = gl[i].x.
                for (int i = 0; i < 3; ++i) {
                    const double div_i[2] = {gl[i].x(), gl[i].y()};
                    const double curl_i[2] = {-gl[i].y(), gl[i].x()};
                    for (int j = 0; j < 3; ++j) {
                        const double div_j[2] = {gl[j].x(), gl[j].y()};
                        const double curl_j[2] = {-gl[j].y(), gl[j].x()};
                        for (int c = 0; c < 2; ++c)
                            for (int d = 0; d < 2; ++d)
                                loc[2 * i + c][2 * j + d] +=
                                    area * (div_i[c] * div_j[d] + curl_i[c] * curl_j[d]);
                    }
                }
                for (int q = 0; q < rule.size(); ++q) {
                    double lambda[3];
                    barycentric(rule, q, lambda);
                    const double w = 2.0 * area * rule.w[q];
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) {
                            const double m = mass_coef * w * lambda[i] * lambda[j];
                            loc[2 * i][2 * j] += m;
                            loc[2 * i + 1][2 * j + 1] += m;
                        }
                }
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        for (int c = 0; c < 2; ++c)
                            for (int d = 0; d < 2; ++d)
                                out.emplace_back(2 * tri[i] + c, 2 * tri[j] + d,
                                                 loc[2 * i + c][2 * j + d]);
            }
        });
    return matrix_from_chunks(2 * sys.n_S, 2 * sys.n_S, parts);
}

} // namespace tdgl
