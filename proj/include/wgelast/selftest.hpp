// SPDX-License-Identifier: MIT
//
// Executable property suite: the structural identities the discretization
// is built on, checked at tight tolerances on small meshes.  Each check
// returns a pass/fail verdict with the measured worst deviation, so the
// suite doubles as a numerical health report.  Shared by the command-line
// `selftest` subcommand and the acceptance harness.
//
// Covered properties:
//   - L2 projections: reproduction of their own space, residual
//     orthogonality, stability (interior, edge, and face-triangle);
//   - weak divergence commutes with the interior/trace projections;
//   - weak gradient integration-by-parts identity for arbitrary traces;
//   - duality form equals the weak strain energy, b_h(eps_w(v), v) =
//     |eps_w(v)|^2 (the discrete inf-sup identity);
//   - compliance algebra: form split into deviatoric and trace parts,
//     the deviatoric norm split, the divergence/deviatoric matrix
//     identity, and deviatoric self-adjointness;
//   - static condensation agrees with dense monolithic solves on one-,
//     two-, and three-cell meshes;
//   - zero data produces the exactly-zero solution;
//   - the boundary interpolant preserves Dirichlet component means;
//   - assembled skeleton systems are symmetric.

#ifndef WGELAST_SELFTEST_HPP
#define WGELAST_SELFTEST_HPP

#include "wgelast/assembly.hpp"
#include "wgelast/interpolant.hpp"
#include "wgelast/solver.hpp"
#include "wgelast/weak_ops.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace wg {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  ///< measured worst deviation and the pinned bound
};

namespace selftest_detail {

template <int D>
Vec<D> zerov(const Vec<D>&) {
    return Vec<D>::Zero();
}

inline Mesh<2> unit_triangle() {
    Mesh<2> m;
    m.vertices = {Vec<2>{0, 0}, Vec<2>{1, 0}, Vec<2>{0, 1}};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 1, 2};
    m.default_boundary_dirichlet = true;
    finalize(m);
    return m;
}

inline Mesh<2> skewed_quad() {
    Mesh<2> m;
    m.vertices = {Vec<2>{0.1, -0.2}, Vec<2>{1.3, 0.1}, Vec<2>{1.1, 1.2}, Vec<2>{-0.3, 0.9}};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 1, 2, 3};
    m.default_boundary_dirichlet = true;
    finalize(m);
    return m;
}

inline Mesh<3> single_tet() {
    Mesh<3> m;
    m.vertices = {Vec<3>{0, 0, 0}, Vec<3>{1.1, 0, 0}, Vec<3>{0.1, 0.9, 0}, Vec<3>{0.2, 0.3, 1.2}};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 1, 2, 3};
    m.cells.back().face_loops = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    m.default_boundary_dirichlet = true;
    finalize(m);
    return m;
}

inline Mesh<2> two_triangles() {
    Mesh<2> m;
    m.vertices = {Vec<2>{0, 0}, Vec<2>{1, 0}, Vec<2>{1, 1}, Vec<2>{0, 1}};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 1, 2};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 2, 3};
    m.default_boundary_dirichlet = true;
    finalize(m);
    return m;
}

/// Three triangles fanning around a boundary vertex; two interior edges.
inline Mesh<2> triangle_fan() {
    Mesh<2> m;
    m.vertices = {Vec<2>{0, 0}, Vec<2>{1, 0}, Vec<2>{1, 1}, Vec<2>{0, 1}, Vec<2>{-1, 0.5}};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 1, 2};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 2, 3};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 3, 4};
    m.default_boundary_dirichlet = true;
    finalize(m);
    return m;
}

inline CheckResult verdict(std::string name, double worst, double tol) {
    CheckResult r;
    r.name = std::move(name);
    r.pass = worst <= tol;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "worst deviation %.3e, bound %.1e", worst, tol);
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// L2 projections.

/// Projecting a member of the target space returns its own coefficients.
inline CheckResult check_projection_reproduction() {
    double worst = 0.0;
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    auto interior = [&](const auto& m, int deg) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        CellBasis<D> b = cell_basis(m, 0, deg);
        VectorXd c(b.size());
        for (int i = 0; i < c.size(); ++i) c[i] = u(rng);
        auto f = [&](const Vec<D>& x) {
            double s = 0.0;
            for (int i = 0; i < c.size(); ++i) s += c[i] * b.eval(i, x);
            return s;
        };
        VectorXd p = project_interior(m, 0, deg, f, 2 * deg + 6);
        worst = std::max(worst,
                         (p - c).template lpNorm<Eigen::Infinity>() /
                             std::max(1.0, c.template lpNorm<Eigen::Infinity>()));
    };
    auto face = [&](const auto& m, int fi, int deg) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        FaceBasis<D> b = face_basis(m, fi, deg);
        VectorXd c(b.size());
        for (int i = 0; i < c.size(); ++i) c[i] = u(rng);
        auto f = [&](const Vec<D>& x) {
            double s = 0.0;
            for (int i = 0; i < c.size(); ++i) s += c[i] * b.eval(i, x);
            return s;
        };
        VectorXd p = project_face(m, fi, deg, f, 2 * deg + 6);
        worst = std::max(worst,
                         (p - c).template lpNorm<Eigen::Infinity>() /
                             std::max(1.0, c.template lpNorm<Eigen::Infinity>()));
    };

    Mesh<2> q = skewed_quad();
    Mesh<3> t = single_tet();
    for (int deg : {0, 1, 2, 3}) interior(q, deg);
    for (int deg : {0, 1, 2}) interior(t, deg);
    for (int deg : {0, 1, 2}) face(q, 0, deg);
    for (int deg : {0, 1, 2}) face(t, 0, deg);
    return verdict("projection reproduces its own space", worst, 1e-11);
}

/// The projection residual of a generic smooth function is orthogonal to
/// every basis function of the target space.
inline CheckResult check_projection_orthogonality() {
    double worst = 0.0;
    const int order = 24;
    std::mt19937 rng(102);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    Mesh<2> q = skewed_quad();
    for (int trial = 0; trial < 12; ++trial) {
        const double a1 = u(rng), a2 = u(rng), w1 = 2.0 + u(rng), w2 = 2.0 + u(rng);
        auto f = [&](const Vec<2>& x) {
            return a1 * std::sin(w1 * x.x()) * std::cos(w2 * x.y()) + a2 * x.x() * x.y();
        };
        const int j = trial % 3;
        VectorXd c = project_interior(q, 0, j, f, order);
        CellBasis<2> b = cell_basis(q, 0, j);
        Rule<2> rule = cell_rule(q, 0, order);
        double nf2 = 0.0;
        for (std::size_t s = 0; s < rule.size(); ++s)
            nf2 += rule.weights[s] * f(rule.points[s]) * f(rule.points[s]);
        for (int a = 0; a < b.size(); ++a) {
            double dot = 0.0, nb2 = 0.0;
            for (std::size_t s = 0; s < rule.size(); ++s) {
                double bv = b.eval(a, rule.points[s]);
                double pv = 0.0;
                for (int i = 0; i < b.size(); ++i) pv += c[i] * b.eval(i, rule.points[s]);
                dot += rule.weights[s] * (f(rule.points[s]) - pv) * bv;
                nb2 += rule.weights[s] * bv * bv;
            }
            worst = std::max(worst, std::abs(dot) / (std::sqrt(nf2) * std::sqrt(nb2) + 1e-30));
        }
    }
    return verdict("projection residual is orthogonal to the space", worst, 1e-11);
}

/// L2 stability: the projection never increases the L2 norm.
inline CheckResult check_projection_stability() {
    double worst = 0.0;
    const int order = 24;
    std::mt19937 rng(103);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    Mesh<2> q = skewed_quad();
    Mesh<3> t = single_tet();
    for (int trial = 0; trial < 10; ++trial) {
        const double a1 = u(rng), w1 = 2.0 + u(rng);
        auto f2 = [&](const Vec<2>& x) { return a1 * std::sin(w1 * (x.x() + 0.3 * x.y())); };
        auto f3 = [&](const Vec<3>& x) { return a1 * std::cos(w1 * (x.x() - x.z())); };
        const int j = trial % 3;

        // Interior, 2D and 3D.
        {
            VectorXd c = project_interior(q, 0, j, f2, order);
            CellBasis<2> b = cell_basis(q, 0, j);
            Rule<2> rule = cell_rule(q, 0, order);
            double nf2 = 0.0, np2 = 0.0;
            for (std::size_t s = 0; s < rule.size(); ++s) {
                double fv = f2(rule.points[s]), pv = 0.0;
                for (int i = 0; i < b.size(); ++i) pv += c[i] * b.eval(i, rule.points[s]);
                nf2 += rule.weights[s] * fv * fv;
                np2 += rule.weights[s] * pv * pv;
            }
            worst = std::max(worst, np2 / nf2 - 1.0);
        }
        {
            VectorXd c = project_interior(t, 0, j, f3, order);
            CellBasis<3> b = cell_basis(t, 0, j);
            Rule<3> rule = cell_rule(t, 0, order);
            double nf2 = 0.0, np2 = 0.0;
            for (std::size_t s = 0; s < rule.size(); ++s) {
                double fv = f3(rule.points[s]), pv = 0.0;
                for (int i = 0; i < b.size(); ++i) pv += c[i] * b.eval(i, rule.points[s]);
                nf2 += rule.weights[s] * fv * fv;
                np2 += rule.weights[s] * pv * pv;
            }
            worst = std::max(worst, np2 / nf2 - 1.0);
        }
        // Faces: a 2D edge and a 3D triangle.
        {
            VectorXd c = project_face(q, 0, 1 + trial % 2, f2, order);
            FaceBasis<2> b = face_basis(q, 0, 1 + trial % 2);
            Rule<2> rule = face_rule(q, 0, order);
            double nf2 = 0.0, np2 = 0.0;
            for (std::size_t s = 0; s < rule.size(); ++s) {
                double fv = f2(rule.points[s]), pv = 0.0;
                for (int i = 0; i < b.size(); ++i) pv += c[i] * b.eval(i, rule.points[s]);
                nf2 += rule.weights[s] * fv * fv;
                np2 += rule.weights[s] * pv * pv;
            }
            worst = std::max(worst, np2 / nf2 - 1.0);
        }
        {
            VectorXd c = project_face(t, 0, 1 + trial % 2, f3, order);
            FaceBasis<3> b = face_basis(t, 0, 1 + trial % 2);
            Rule<3> rule = face_rule(t, 0, order);
            double nf2 = 0.0, np2 = 0.0;
            for (std::size_t s = 0; s < rule.size(); ++s) {
                double fv = f3(rule.points[s]), pv = 0.0;
                for (int i = 0; i < b.size(); ++i) pv += c[i] * b.eval(i, rule.points[s]);
                nf2 += rule.weights[s] * fv * fv;
                np2 += rule.weights[s] * pv * pv;
            }
            worst = std::max(worst, np2 / nf2 - 1.0);
        }
    }
    return verdict("projection is L2-stable", worst, 1e-11);
}

// ---------------------------------------------------------------------------
// Weak operators.

template <int D>
VectorXd apply_op_int_face(const MatrixXd& op_int, const std::vector<MatrixXd>& op_face,
                           const VectorXd& vi, const std::vector<VectorXd>& vb) {
    VectorXd g = op_int * vi;
    for (std::size_t f = 0; f < vb.size(); ++f) g += op_face[f] * vb[f];
    return g;
}

/// Weak divergence of the projected pair equals the projected divergence.
inline CheckResult check_divergence_commutation() {
    double worst = 0.0;
    std::mt19937 rng(104);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto run = [&](const auto& m) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        for (int k = 0; k <= (D == 2 ? 2 : 1); ++k) {
            CellBasis<D> wb = cell_basis(m, 0, k + 3);
            MatrixXd wc(wb.size(), D);
            for (int i = 0; i < wc.rows(); ++i)
                for (int j = 0; j < D; ++j) wc(i, j) = u(rng);
            auto comp = [&](int j) {
                return [&wb, &wc, j](const Vec<D>& x) {
                    double s = 0.0;
                    for (int i = 0; i < wc.rows(); ++i) s += wc(i, j) * wb.eval(i, x);
                    return s;
                };
            };
            auto divw = [&](const Vec<D>& x) {
                double s = 0.0;
                for (int i = 0; i < wc.rows(); ++i)
                    for (int j = 0; j < D; ++j) s += wc(i, j) * wb.grad(i, x)[j];
                return s;
            };

            WeakDivOp<D> op = weak_divergence_op(m, 0, k + 1, k, k + 1);
            const int ni = poly_space_dim(D, k);
            VectorXd vi(D * ni);
            for (int j = 0; j < D; ++j)
                vi.segment(j * ni, ni) = project_interior(m, 0, k, comp(j), 2 * k + 10);
            std::vector<VectorXd> vb;
            for (int fi : m.cells[0].faces) {
                FaceBasis<D> fb = face_basis(m, fi, k + 1);
                VectorXd c(D * fb.size());
                for (int j = 0; j < D; ++j)
                    c.segment(j * fb.size(), fb.size()) =
                        project_face(m, fi, k + 1, comp(j), 2 * k + 10);
                vb.push_back(c);
            }
            VectorXd got = apply_op_int_face<D>(op.op_int, op.op_face, vi, vb);
            VectorXd want = project_interior(m, 0, k + 1, divw, 2 * k + 10);
            worst = std::max(worst,
                             (got - want).template lpNorm<Eigen::Infinity>() /
                                 std::max(1.0, want.template lpNorm<Eigen::Infinity>()));
        }
    };
    run(skewed_quad());
    run(generate_cube_tet_mesh(1));
    return verdict("weak divergence commutes with projections", worst, 1e-11);
}

/// (grad_w {Q v, t}, tau) = (grad v, tau) + <t - v, tau n> for arbitrary
/// traces t and every component basis stress tau.
inline CheckResult check_integration_by_parts() {
    double worst = 0.0;
    std::mt19937 rng(105);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto run = [&](const auto& m) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        for (int k = 0; k <= 1; ++k) {
            WeakGradOp<D> op = weak_gradient_op(m, 0, k, k + 1, k + 1);
            CellBasis<D> vbs = cell_basis(m, 0, k + 3);
            VectorXd vc(vbs.size());
            for (int i = 0; i < vc.size(); ++i) vc[i] = u(rng);
            auto v = [&](const Vec<D>& x) {
                double s = 0.0;
                for (int i = 0; i < vc.size(); ++i) s += vc[i] * vbs.eval(i, x);
                return s;
            };
            auto gradv = [&](const Vec<D>& x) {
                Vec<D> s = Vec<D>::Zero();
                for (int i = 0; i < vc.size(); ++i) s += vc[i] * vbs.grad(i, x);
                return s;
            };
            VectorXd vi = project_interior(m, 0, k + 1, v, 2 * (k + 1) + 8);
            std::vector<VectorXd> traces;
            std::vector<FaceBasis<D>> fbs;
            for (int fi : m.cells[0].faces) {
                fbs.push_back(face_basis(m, fi, k + 1));
                VectorXd t(fbs.back().size());
                for (int i = 0; i < t.size(); ++i) t[i] = u(rng);
                traces.push_back(t);
            }
            VectorXd g = apply_op_int_face<D>(op.op_int, op.op_face, vi, traces);

            const int nk = op.target.size();
            Rule<D> crule = cell_rule(m, 0, 2 * k + 10);
            for (int j = 0; j < D; ++j)
                for (int a = 0; a < nk; ++a) {
                    double lhs = 0.0;
                    for (std::size_t s = 0; s < crule.size(); ++s) {
                        double ma = op.target.eval(a, crule.points[s]);
                        double gw = 0.0;
                        for (int b = 0; b < nk; ++b)
                            gw += g[j * nk + b] * op.target.eval(b, crule.points[s]);
                        lhs += crule.weights[s] * gw * ma;
                    }
                    double rhs = 0.0;
                    for (std::size_t s = 0; s < crule.size(); ++s)
                        rhs += crule.weights[s] * gradv(crule.points[s])[j] *
                               op.target.eval(a, crule.points[s]);
                    for (std::size_t fl = 0; fl < m.cells[0].faces.size(); ++fl) {
                        const int fi = m.cells[0].faces[fl];
                        const double nj = m.faces[fi].normal[j];
                        Rule<D> frule = face_rule(m, fi, 2 * k + 10);
                        for (std::size_t s = 0; s < frule.size(); ++s) {
                            double tval = 0.0;
                            for (int i = 0; i < traces[fl].size(); ++i)
                                tval += traces[fl][i] * fbs[fl].eval(i, frule.points[s]);
                            rhs += frule.weights[s] * (tval - v(frule.points[s])) * nj *
                                   op.target.eval(a, frule.points[s]);
                        }
                    }
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
        }
    };
    run(skewed_quad());
    run(generate_cube_tet_mesh(1));
    return verdict("weak gradient integration-by-parts identity", worst, 1e-11);
}

// ---------------------------------------------------------------------------
// Duality form / weak strain energy.

/// Weak symmetric gradient of a discrete (u_i, u_b) pair as a stress
/// coefficient vector, via the materialized weak-gradient operator.
template <int D>
VectorXd weak_eps(const Mesh<D>& m, const DofMap<D>& dm, const LocalElementSystem<D>& sys,
                  const VectorXd& ui, const VectorXd& ub_vals) {
    WeakGradOp<D> op = weak_gradient_op(m, sys.cell, sys.k, sys.k + 1, sys.k + 1);
    const int nk = sys.sbasis.size();
    const int nui = sys.ubasis.size();
    std::vector<VectorXd> G(D);
    for (int i = 0; i < D; ++i) G[i] = op.op_int * ui.segment(i * nui, nui);
    const auto& faces = m.cells[sys.cell].faces;
    for (std::size_t fl = 0; fl < faces.size(); ++fl) {
        const int fi = faces[fl];
        FaceShapes<D> shapes = [&] {
            if constexpr (D == 2)
                return face_shapes(m, dm, fi);
            else
                return face_tri_shapes(m, dm, fi, 0);
        }();
        const int nf = shapes.size();
        for (int i = 0; i < D; ++i) {
            VectorXd vals(nf);
            for (int c = 0; c < nf; ++c) {
                const int loc = wg::detail::local_slot(sys.ub_nodes, shapes.node_ids[c]);
                vals[c] = ub_vals[loc * D + i];
            }
            G[i] += op.op_face[fl] * (shapes.W.transpose() * vals);
        }
    }
    VectorXd eps = VectorXd::Zero(sys.ns);
    for (int a = 0; a < sym_dim(D); ++a) {
        const auto& [r, s] = sym_pairs<D>()[a];
        for (int b = 0; b < nk; ++b)
            eps[a * nk + b] = 0.5 * (G[r][s * nk + b] + G[s][r * nk + b]);
    }
    return eps;
}

/// b_h(eps_w(v), v) = |eps_w(v)|^2 for random discrete v on single-cell
/// meshes whose boundary faces are all simplicial skeleton elements.
inline CheckResult check_duality_identity() {
    double worst = 0.0;
    std::mt19937 rng(106);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto run = [&](auto& m, int k, int reps) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        DofMap<D> dm = build_dof_map(m, k);
        auto sys = local_forms(m, dm, 0, LameParameters{1.0, 1.0}, zerov<D>, zerov<D>);
        MatrixXd Mk = mass_matrix(sys.sbasis, cell_rule(m, 0, 2 * k + 2));
        MatrixXd Msym = stress_mass<D>(Mk);
        for (int t = 0; t < reps; ++t) {
            VectorXd ui(sys.nu), ub(sys.nb);
            for (int i = 0; i < sys.nu; ++i) ui[i] = u(rng);
            for (int i = 0; i < sys.nb; ++i) ub[i] = u(rng);
            VectorXd eps = weak_eps(m, dm, sys, ui, ub);
            const double bh = eps.dot(sys.Bi * ui) + eps.dot(sys.Bb * ub);
            const double norm2 = eps.dot(Msym * eps);
            worst = std::max(worst, std::abs(bh - norm2) / std::max(norm2, 1e-30));
        }
    };
    Mesh<2> tri = unit_triangle();
    Mesh<2> quad = skewed_quad();
    Mesh<3> tet = single_tet();
    run(tri, 0, 6);
    run(tri, 1, 6);
    run(tri, 2, 4);
    run(quad, 0, 6);
    run(quad, 1, 6);
    run(tet, 0, 4);
    run(tet, 1, 4);
    return verdict("duality form equals the weak strain energy", worst, 1e-11);
}

// ---------------------------------------------------------------------------
// Compliance algebra.

/// Four identities of the compliance operator A s = (1/2mu)(s - c tr(s) I):
///  - the form splits as (A s, t) = (1/2mu)(s_D, t_D) + (tr s, tr t)/(d(d
///    lambda + 2mu)), checked against the assembled element matrix;
///  - |t|^2 = |t_D|^2 + (tr t)^2 / d;
///  - (div v) I = d (grad v - (grad v)_D);
///  - (s_D, t) = (s, t_D).
inline CheckResult check_compliance_identities() {
    double worst = 0.0;
    std::mt19937 rng(107);
    std::uniform_real_distribution<double> u(-2.0, 2.0);

    // Pointwise tensor identities, random symmetric / general matrices.
    auto pointwise = [&](auto dtag) {
        constexpr int D = decltype(dtag)::value;
        for (int trial = 0; trial < 50; ++trial) {
            Mat<D> t;
            for (int i = 0; i < D; ++i)
                for (int j = i; j < D; ++j) t(i, j) = t(j, i) = u(rng);
            Mat<D> s;
            for (int i = 0; i < D; ++i)
                for (int j = i; j < D; ++j) s(i, j) = s(j, i) = u(rng);
            const Mat<D> tD = t - (t.trace() / D) * Mat<D>::Identity();
            const Mat<D> sD = s - (s.trace() / D) * Mat<D>::Identity();

            const double lhs2 = t.squaredNorm();
            const double rhs2 = tD.squaredNorm() + t.trace() * t.trace() / D;
            worst = std::max(worst, std::abs(lhs2 - rhs2) / std::max(1.0, lhs2));

            const double lhs4 = (sD.array() * t.array()).sum();
            const double rhs4 = (s.array() * tD.array()).sum();
            worst = std::max(worst, std::abs(lhs4 - rhs4) / std::max(1.0, std::abs(lhs4)));

            Mat<D> g;  // a gradient is not symmetric in general
            for (int i = 0; i < D; ++i)
                for (int j = 0; j < D; ++j) g(i, j) = u(rng);
            const Mat<D> gD = g - (g.trace() / D) * Mat<D>::Identity();
            const Mat<D> lhs3 = g.trace() * Mat<D>::Identity();
            const Mat<D> rhs3 = static_cast<double>(D) * (g - gD);
            worst = std::max(worst, (lhs3 - rhs3).template lpNorm<Eigen::Infinity>() /
                                        std::max(1.0, std::abs(g.trace())));
        }
    };
    pointwise(std::integral_constant<int, 2>{});
    pointwise(std::integral_constant<int, 3>{});

    // Integral split of the assembled compliance matrix.
    auto split = [&](auto& m, int k, double mu, double lambda) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        DofMap<D> dm = build_dof_map(m, k);
        auto sys = local_forms(m, dm, 0, LameParameters{mu, lambda}, zerov<D>, zerov<D>);
        const int nk = sys.sbasis.size();
        MatrixXd Mk = mass_matrix(sys.sbasis, cell_rule(m, 0, 2 * k + 2));
        MatrixXd Msym = stress_mass<D>(Mk);
        // Trace extraction: sums the diagonal component blocks.
        MatrixXd T = MatrixXd::Zero(nk, sys.ns);
        for (int a = 0; a < sym_dim(D); ++a) {
            const auto& [r, s] = sym_pairs<D>()[a];
            if (r == s) T.block(0, a * nk, nk, nk).setIdentity();
        }
        for (int trial = 0; trial < 8; ++trial) {
            VectorXd sc(sys.ns), tc(sys.ns);
            for (int i = 0; i < sys.ns; ++i) {
                sc[i] = u(rng);
                tc[i] = u(rng);
            }
            const double lhs = sc.dot(sys.A * tc);
            const double full = sc.dot(Msym * tc);
            const double tr = (T * sc).dot(Mk * (T * tc));
            const double rhs = (full - tr / D) / (2.0 * mu) + tr / (D * (D * lambda + 2.0 * mu));
            const double denom = std::sqrt(sc.dot(Msym * sc)) * std::sqrt(tc.dot(Msym * tc)) /
                                 (2.0 * mu);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(denom, 1e-30));
        }
    };
    Mesh<2> tri = unit_triangle();
    Mesh<3> tet = single_tet();
    split(tri, 0, 1.0, 1.0);
    split(tri, 1, 2.0, 1e3);
    split(tet, 0, 1.0, 1.0);
    split(tet, 0, 0.5, 1e3);
    return verdict("compliance split identities", worst, 1e-13);
}

// ---------------------------------------------------------------------------
// Condensation vs. monolithic solves.

/// Dense interior block [A, -Bi; -Bi^T, -Sii] of one element.
template <int D>
MatrixXd dense_kxx(const LocalElementSystem<D>& sys) {
    const int n = sys.ns + sys.nu;
    MatrixXd K = MatrixXd::Zero(n, n);
    K.topLeftCorner(sys.ns, sys.ns) = sys.A;
    K.topRightCorner(sys.ns, sys.nu) = -sys.Bi;
    K.bottomLeftCorner(sys.nu, sys.ns) = -sys.Bi.transpose();
    K.bottomRightCorner(sys.nu, sys.nu) = -sys.Sii;
    return K;
}

/// Dense monolithic solve of the uncondensed global system with Dirichlet
/// values eliminated to the right-hand side.  Returns the per-cell interior
/// unknowns and the free skeleton vector.
template <int D>
std::pair<std::vector<VectorXd>, VectorXd> monolithic_solve(const Mesh<D>& m,
                                                            const DofMap<D>& dm,
                                                            const CondensedSystem<D>& cs) {
    const int ncells = static_cast<int>(m.cells.size());
    std::vector<int> offset(ncells + 1, 0);
    for (int ci = 0; ci < ncells; ++ci)
        offset[ci + 1] = offset[ci] + cs.locals[ci].ns + cs.locals[ci].nu;
    const int ni = offset[ncells];
    const int n = ni + dm.n_free;
    const int sig_base = dm.n_free - dm.n_sigma_nodes;

    MatrixXd K = MatrixXd::Zero(n, n);
    VectorXd b = VectorXd::Zero(n);
    for (int ci = 0; ci < ncells; ++ci) {
        const auto& L = cs.locals[ci];
        const int os = offset[ci], ou = offset[ci] + L.ns;
        K.block(os, os, L.ns, L.ns) += L.A;
        K.block(os, ou, L.ns, L.nu) -= L.Bi;
        K.block(ou, os, L.nu, L.ns) -= L.Bi.transpose();
        K.block(ou, ou, L.nu, L.nu) -= L.Sii;
        b.segment(ou, L.nu) += L.Fi;

        // Skeleton couplings; Dirichlet columns move to the rhs.
        auto skel = [&](int y, int& gfree, int& gfixed) {
            gfree = gfixed = -1;
            if (y < L.nt) {
                gfree = ni + dm.sigma_dof(L.sig_vertices[y]);
                return;
            }
            const int j = (y - L.nt) / D, c = (y - L.nt) % D;
            const int fr = dm.u_free_index(L.ub_nodes[j], c);
            if (fr >= 0)
                gfree = ni + fr;
            else
                gfixed = dm.u_fixed_index(L.ub_nodes[j], c);
        };
        const int ny = L.nt + L.nb;
        for (int yi = 0; yi < ny; ++yi) {
            int gf, gx;
            skel(yi, gf, gx);
            VectorXd colS = yi < L.nt ? VectorXd(L.Zit.col(yi)) : VectorXd(-L.Bb.col(yi - L.nt));
            VectorXd colU =
                yi < L.nt ? VectorXd(VectorXd::Zero(L.nu)) : VectorXd(-L.Sib.col(yi - L.nt));
            if (gf >= 0) {
                K.block(os, gf, L.ns, 1) += colS;
                K.block(ou, gf, L.nu, 1) += colU;
                K.block(gf, os, 1, L.ns) += colS.transpose();
                K.block(gf, ou, 1, L.nu) += colU.transpose();
            } else {
                b.segment(os, L.ns) -= colS * cs.lift[gx];
                b.segment(ou, L.nu) -= colU * cs.lift[gx];
            }
            if (gf >= 0) {
                if (yi >= L.nt) b[gf] += L.Fb[yi - L.nt];
                for (int yj = 0; yj < ny; ++yj) {
                    int hf, hx;
                    skel(yj, hf, hx);
                    double v = 0.0;
                    if (yi < L.nt && yj < L.nt) v = L.Ztt(yi, yj);
                    if (yi >= L.nt && yj >= L.nt) v = -L.Sbb(yi - L.nt, yj - L.nt);
                    if (v == 0.0) continue;
                    if (hf >= 0)
                        K(gf, hf) += v;
                    else
                        b[gf] -= v * cs.lift[hx];
                }
            }
        }
    }
    for (int s : cs.regularized) K(ni + sig_base + s, ni + sig_base + s) += 1.0;

    VectorXd x = K.fullPivLu().solve(b);
    std::vector<VectorXd> interior(ncells);
    for (int ci = 0; ci < ncells; ++ci)
        interior[ci] = x.segment(offset[ci], cs.locals[ci].ns + cs.locals[ci].nu);
    return {interior, x.tail(dm.n_free)};
}

/// Static condensation equals the dense monolithic solve on one-cell fully
/// Dirichlet meshes (local form) and on two- and three-cell meshes with
/// free skeleton unknowns (global form).
inline CheckResult check_condensation_oracle() {
    double worst = 0.0;

    // Local: one fully Dirichlet cell, recovery vs. dense block solve.
    auto local = [&](auto& m, int k) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        DofMap<D> dm = build_dof_map(m, k);
        auto g_d = [](const Vec<D>& x) {
            Vec<D> v;
            v[0] = x[0] + 2.0 * x[1];
            v[1] = x[0] - x[1];
            if constexpr (D == 3) v[2] = 0.5 * x[2] + x[0];
            return v;
        };
        auto f = [](const Vec<D>& x) {
            Vec<D> v = Vec<D>::Zero();
            v[0] = std::sin(x[0]);
            v[1] = x[1];
            return v;
        };
        auto sys = local_forms(m, dm, 0, LameParameters{1.0, 10.0}, f, zerov<D>);
        condense(sys);
        VectorXd lift = scott_zhang_boundary(m, dm, g_d);
        VectorXd y2(sys.nb);
        for (std::size_t j = 0; j < sys.ub_nodes.size(); ++j)
            for (int c = 0; c < D; ++c)
                y2[j * D + c] = lift[dm.u_fixed_index(sys.ub_nodes[j], c)];

        MatrixXd K = dense_kxx(sys);
        VectorXd b(sys.ns + sys.nu);
        b.head(sys.ns) = sys.Bb * y2;
        b.tail(sys.nu) = sys.Fi + sys.Sib * y2;
        VectorXd x = K.fullPivLu().solve(b);

        VectorXd sig, uin;
        sys.recover(VectorXd::Zero(sys.nt), y2, sig, uin);
        worst = std::max(worst, (sig - x.head(sys.ns)).norm() /
                                    std::max(1.0, x.head(sys.ns).norm()));
        worst = std::max(worst,
                         (uin - x.tail(sys.nu)).norm() / std::max(1.0, x.tail(sys.nu).norm()));
    };
    Mesh<2> tri = unit_triangle();
    Mesh<3> tet = single_tet();
    local(tri, 0);
    local(tri, 1);
    local(tet, 0);
    local(tet, 1);

    // Global: condensed sparse path vs. dense uncondensed solve.
    auto global = [&](auto& m, int k) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        auto f = [](const Vec<D>& x) {
            Vec<D> v = Vec<D>::Zero();
            v[0] = std::sin(x[0]) + x[1];
            v[1] = x[0] * x[1];
            return v;
        };
        auto g_d = [](const Vec<D>& x) {
            Vec<D> v = Vec<D>::Zero();
            v[0] = 0.3 * x[0] - x[1];
            v[1] = x[0] + 0.5 * x[1] * x[1];
            return v;
        };
        DofMap<D> dm = build_dof_map(m, k);
        auto cs = assemble_global(m, dm, LameParameters{1.0, 10.0}, f, g_d, zerov<D>);
        auto [y, rep] = solve_sparse_symmetric(cs.K, cs.rhs);
        auto sol = recover_interior(m, dm, cs, y);
        auto [interior, yref] = monolithic_solve(m, dm, cs);
        worst = std::max(worst, (y - yref).norm() / std::max(1.0, yref.norm()));
        for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
            const auto& L = cs.locals[ci];
            worst = std::max(worst, (sol.sigma[ci] - interior[ci].head(L.ns)).norm() /
                                        std::max(1.0, interior[ci].head(L.ns).norm()));
            worst = std::max(worst, (sol.u[ci] - interior[ci].tail(L.nu)).norm() /
                                        std::max(1.0, interior[ci].tail(L.nu).norm()));
        }
    };
    Mesh<2> two = two_triangles();
    Mesh<2> fan = triangle_fan();
    global(two, 0);
    global(two, 1);
    global(fan, 0);
    global(fan, 1);
    return verdict("condensation equals the monolithic solve", worst, 1e-10);
}

/// Zero volume load and zero boundary data produce the exactly-zero
/// discrete solution through the full condensed pipeline.
inline CheckResult check_zero_data() {
    double worst = 0.0;
    auto run = [&](auto& m, int k) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        DofMap<D> dm = build_dof_map(m, k);
        auto cs = assemble_global(m, dm, LameParameters{1.0, 1e3}, zerov<D>, zerov<D>, zerov<D>);
        auto [y, rep] = solve_sparse_symmetric(cs.K, cs.rhs);
        auto sol = recover_interior(m, dm, cs, y);
        worst = std::max(worst, y.template lpNorm<Eigen::Infinity>());
        for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
            worst = std::max(worst, sol.sigma[ci].template lpNorm<Eigen::Infinity>());
            worst = std::max(worst, sol.u[ci].template lpNorm<Eigen::Infinity>());
        }
    };
    Mesh<2> m2 = generate_triangle_mesh(2);
    Mesh<3> m3 = generate_cube_tet_mesh(1);
    run(m2, 0);
    run(m2, 1);
    run(m3, 0);
    return verdict("zero data gives the zero solution", worst, 0.0);
}

// ---------------------------------------------------------------------------
// Boundary interpolant and assembled-system structure.

/// <I g - g, 1> over the Dirichlet boundary, componentwise max abs.
template <int D, class G>
double mean_defect(const Mesh<D>& m, const DofMap<D>& dm, const VectorXd& lift, G&& g) {
    Vec<D> defect = Vec<D>::Zero();
    for (std::size_t fi = 0; fi < m.faces.size(); ++fi) {
        if (m.faces[fi].marker != BoundaryKind::dirichlet) continue;
        auto shapes = skeleton_shapes(m, dm, static_cast<int>(fi));
        for (std::size_t e = 0; e < shapes.size(); ++e) {
            Rule<D> rule = skeleton_element_rule(m, static_cast<int>(fi), static_cast<int>(e),
                                                 2 * (dm.k + 2) + 6);
            VectorXd L;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                shapes[e].eval_all(rule.points[q], L);
                Vec<D> ig = Vec<D>::Zero();
                for (int c = 0; c < shapes[e].size(); ++c) {
                    const int nd = shapes[e].node_ids[c];
                    for (int comp = 0; comp < D; ++comp)
                        ig[comp] += L[c] * lift[dm.u_fixed_index(nd, comp)];
                }
                defect += rule.weights[q] * (ig - g(rule.points[q]));
            }
        }
    }
    return defect.template lpNorm<Eigen::Infinity>();
}

/// The boundary interpolant preserves the mean of each Dirichlet data
/// component over the Dirichlet part of the skeleton.
inline CheckResult check_mean_preservation() {
    double worst = 0.0;
    const double a = 0.8, b = -0.45, w = 2.3;
    auto g2 = [=](const Vec<2>& x) {
        return Vec<2>{a * std::sin(w * (x.x() + 2 * x.y())), b * std::cos(w * x.x())}.eval();
    };
    for (int k : {0, 1}) {
        Mesh<2> m = generate_triangle_mesh(3);
        DofMap<2> dm = build_dof_map(m, k);
        VectorXd lift = scott_zhang_boundary(m, dm, g2);
        worst = std::max(worst, mean_defect(m, dm, lift, g2) / (4.0 * (std::abs(a) + std::abs(b))));
    }
    auto g3 = [=](const Vec<3>& x) {
        double s = a * std::sin(w * (x.x() - x.y())) + b * x.z() * x.z();
        return Vec<3>{s, -0.5 * s, s + b}.eval();
    };
    for (int k : {0, 1}) {
        Mesh<3> m = generate_cube_tet_mesh(2);
        DofMap<3> dm = build_dof_map(m, k);
        VectorXd lift = scott_zhang_boundary(m, dm, g3);
        worst = std::max(worst, mean_defect(m, dm, lift, g3) / (6.0 * (std::abs(a) + std::abs(b))));
    }
    return verdict("boundary interpolant preserves Dirichlet means", worst, 1e-11);
}

/// Assembled condensed skeleton systems are symmetric.
inline CheckResult check_global_symmetry() {
    double worst = 0.0;
    auto run = [&](auto& m, int k) {
        constexpr int D = std::decay_t<decltype(m)>::dim;
        auto f = [](const Vec<D>& x) {
            Vec<D> v = Vec<D>::Zero();
            v[0] = x[1];
            v[1] = -x[0];
            return v;
        };
        DofMap<D> dm = build_dof_map(m, k);
        auto cs = assemble_global(m, dm, LameParameters{1.0, 1e3}, f, zerov<D>, zerov<D>);
        MatrixXd K = MatrixXd(cs.K);
        worst = std::max(worst, (K - K.transpose()).template lpNorm<Eigen::Infinity>() /
                                    K.template lpNorm<Eigen::Infinity>());
    };
    Mesh<2> m2 = generate_triangle_mesh(4);
    Mesh<2> lad = generate_ladder_mesh(2);
    Mesh<3> m3 = generate_cube_tet_mesh(2);
    run(m2, 0);
    run(m2, 1);
    run(lad, 2);
    run(m3, 0);
    return verdict("assembled skeleton system is symmetric", worst, 1e-12);
}

}  // namespace selftest_detail

/// Runs every structural property check and returns one verdict per check.
inline std::vector<CheckResult> run_property_suite() {
    using namespace selftest_detail;
    std::vector<CheckResult> out;
    out.push_back(check_projection_reproduction());
    out.push_back(check_projection_orthogonality());
    out.push_back(check_projection_stability());
    out.push_back(check_divergence_commutation());
    out.push_back(check_integration_by_parts());
    out.push_back(check_duality_identity());
    out.push_back(check_compliance_identities());
    out.push_back(check_condensation_oracle());
    out.push_back(check_zero_data());
    out.push_back(check_mean_preservation());
    out.push_back(check_global_symmetry());
    return out;
}

}  // namespace wg

#endif  // WGELAST_SELFTEST_HPP
