// SPDX-License-Identifier: MIT
//
// Element-local bilinear forms of the weak Galerkin elasticity scheme and
// their static condensation onto the skeleton unknowns.
//
// Per cell T the unknowns split into interior x = (sigma_i, u_i) and
// skeleton y = (sigma_tr|_dT, u_b|_dT).  The local symmetric block system
// (displacement test equation negated so the condensed matrix comes out
// positive definite when the trace variable is absent) is
//
//   [ A + Z_ii   Z_it   -B_i    -B_b  ] (sigma_i)   (0  )
//   [ Z_it^T     Z_tt    0       0    ] (sig_tr ) = (0  )
//   [ -B_i^T     0      -S_ii   -S_ib ] (u_i    )   (F_i)
//   [ -B_b^T     0      -S_ib^T -S_bb ] (u_b    )   (F_b)
//
// with
//   a_h  = (A sigma, tau)_T,  A s = (1/2mu)(s - lambda/(2mu+d lambda) tr(s) I)
//   b_h  = (tau, grad_w v)_T  assembled from the weak-gradient duality blocks
//   s_h  = sum_E  (2mu/h_E)  <u_i - u_b, v_i - v_b>_E
//   z_h  = sum_E  (h_E/2mu)  <tr sigma_i - sig_tr, tr tau_i - tau_tr>_E
//          over interior faces only, present only when k+1 < d.
// F_i = (f, v_i)_T and F_b = -<g_N, v_b> on Neumann faces.
//
// Condensation eliminates x by the nested Cholesky factorization of the
// saddle block [A+Z_ii, -B_i; -B_i^T, -S_ii]: with W = S_ii + B_i^T
// (A+Z_ii)^{-1} B_i positive definite, the solve is
//   u_i    = -W^{-1}(q + B_i^T (A+Z_ii)^{-1} p)
//   sigma_i = (A+Z_ii)^{-1}(p + B_i u_i)
// for interior right-hand side (p, q).  The stored factors make recovery a
// pair of triangular solves per cell.

#ifndef WGELAST_FORMS_HPP
#define WGELAST_FORMS_HPP

#include "wgelast/basis.hpp"
#include "wgelast/mesh.hpp"
#include "wgelast/projection.hpp"
#include "wgelast/spaces.hpp"
#include "wgelast/weak_ops.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace wg {

struct LameParameters {
    double mu = 1.0;
    double lambda = 1.0;
};

namespace detail {

/// Affine nodal (P1) shape functions on one skeleton element, used by the
/// continuous stress-trace field: values at the element vertices are 1/0.
template <int D>
struct P1Shapes {
    std::array<int, D> verts{};  // mesh vertex ids (2 in 2D, 3 in 3D)
    Vec<D> p0 = Vec<D>::Zero();
    Eigen::Matrix<double, D, D - 1> dirs;
    Eigen::Matrix<double, D - 1, D - 1> gram_inv;

    void eval(const Vec<D>& x, Eigen::Matrix<double, D, 1>& psi) const {
        Eigen::Matrix<double, D - 1, 1> t = gram_inv * (dirs.transpose() * (x - p0));
        psi[0] = 1.0 - t.sum();
        for (int i = 0; i < D - 1; ++i) psi[i + 1] = t[i];
    }
};

template <int D>
P1Shapes<D> p1_shapes(const Mesh<D>& m, int face, int e) {
    P1Shapes<D> sh;
    const auto& f = m.faces[face];
    if constexpr (D == 2) {
        sh.verts = {f.loop[0], f.loop[1]};
    } else {
        sh.verts = {f.tris[e][0], f.tris[e][1], f.tris[e][2]};
    }
    sh.p0 = m.vertices[sh.verts[0]];
    for (int i = 0; i < D - 1; ++i) sh.dirs.col(i) = m.vertices[sh.verts[i + 1]] - sh.p0;
    Eigen::Matrix<double, D - 1, D - 1> gram = sh.dirs.transpose() * sh.dirs;
    sh.gram_inv = gram.inverse();
    return sh;
}

inline int local_slot(const std::vector<int>& sorted_ids, int id) {
    auto it = std::lower_bound(sorted_ids.begin(), sorted_ids.end(), id);
    return static_cast<int>(it - sorted_ids.begin());
}

}  // namespace detail

template <int D>
struct LocalElementSystem {
    int cell = -1;
    int k = 0;
    LameParameters lame;
    bool has_sigma_trace = false;

    CellBasis<D> sbasis;  ///< P_k scalar factors of the stress basis
    CellBasis<D> ubasis;  ///< P_{k+1} interior displacement basis

    std::vector<int> ub_nodes;       ///< skeleton node ids on dT, ascending
    std::vector<int> sig_vertices;   ///< skeleton vertex ids on dT, ascending

    int ns = 0;  ///< stress coefficients: sym_dim * dim P_k
    int nu = 0;  ///< interior displacement coefficients: D * dim P_{k+1}
    int nt = 0;  ///< local stress-trace values
    int nb = 0;  ///< local boundary displacement values: D * ub_nodes

    // Blocks; S and Z carry their cross signs (both are PSD as written).
    MatrixXd A;    // ns x ns, includes Z_ii
    MatrixXd Bi;   // ns x nu
    MatrixXd Bb;   // ns x nb
    MatrixXd Zit;  // ns x nt
    MatrixXd Ztt;  // nt x nt
    MatrixXd Sii;  // nu x nu
    MatrixXd Sib;  // nu x nb
    MatrixXd Sbb;  // nb x nb
    VectorXd Fi;   // nu
    VectorXd Fb;   // nb

    // Filled by condense(): skeleton block (ordering sig_tr then u_b),
    // right-hand side, and the factors needed to recover the interior.
    bool condensed = false;
    MatrixXd C;    // (nt+nb) x (nt+nb)
    VectorXd rhs;  // nt+nb
    Eigen::LLT<MatrixXd> A_llt;  // of A (+Z_ii)
    Eigen::LLT<MatrixXd> W_llt;  // of S_ii + B_i^T A^{-1} B_i

    /// Interior solve of [A, -B_i; -B_i^T, -S_ii] x = (p, q).
    void solve_interior(const VectorXd& p, const VectorXd& q, VectorXd& sig,
                        VectorXd& ui) const {
        ui = -W_llt.solve(q + Bi.transpose() * A_llt.solve(p));
        sig = A_llt.solve(p + Bi * ui);
    }

    /// Recover (sigma_i, u_i) from the local skeleton values (y1, y2).
    void recover(const VectorXd& y1, const VectorXd& y2, VectorXd& sig, VectorXd& ui) const {
        VectorXd p = Bb * y2;
        if (nt > 0) p.noalias() -= Zit * y1;
        VectorXd q = Fi + Sib * y2;
        solve_interior(p, q, sig, ui);
    }
};

/// Symmetric-tensor mass matrix from the scalar P_k mass matrix:
/// M[(alpha,a),(beta,b)] = delta_ab_pairs * frobenius_weight * Mk(a,b).
template <int D>
MatrixXd stress_mass(const MatrixXd& Mk) {
    const int nsym = sym_dim(D);
    const int nk = static_cast<int>(Mk.rows());
    MatrixXd M = MatrixXd::Zero(nsym * nk, nsym * nk);
    for (int a = 0; a < nsym; ++a)
        M.block(a * nk, a * nk, nk, nk) = sym_weight<D>(a) * Mk;
    return M;
}

/// Evaluate a stress coefficient vector (layout alpha*nk + a) at a point.
template <int D>
Mat<D> eval_stress(const CellBasis<D>& sbasis, const VectorXd& coef, const Vec<D>& x) {
    const int nk = sbasis.size();
    Mat<D> s = Mat<D>::Zero();
    for (int a = 0; a < sym_dim(D); ++a) {
        const auto& [i, j] = sym_pairs<D>()[a];
        double v = 0.0;
        for (int b = 0; b < nk; ++b) v += coef[a * nk + b] * sbasis.eval(b, x);
        s(i, j) += v;
        if (i != j) s(j, i) += v;
    }
    return s;
}

/// Evaluate a vector coefficient vector (layout i*n + b) at a point.
template <int D>
Vec<D> eval_vector(const CellBasis<D>& basis, const VectorXd& coef, const Vec<D>& x) {
    const int n = basis.size();
    Vec<D> u = Vec<D>::Zero();
    for (int i = 0; i < D; ++i)
        for (int b = 0; b < n; ++b) u[i] += coef[i * n + b] * basis.eval(b, x);
    return u;
}

template <int D, class F, class GN>
LocalElementSystem<D> local_forms(const Mesh<D>& m, const DofMap<D>& dm, int cell,
                                  const LameParameters& lame, F&& f, GN&& g_n) {
    if (!(lame.mu > 0.0) || !(lame.lambda > 0.0))
        throw Error("Lame parameters must be positive");
    LocalElementSystem<D> sys;
    sys.cell = cell;
    sys.k = dm.k;
    sys.lame = lame;
    sys.has_sigma_trace = dm.has_sigma_trace;
    const int k = dm.k;
    const int qform = 2 * (k + 2);
    const int qload = 2 * (k + 2) + 4;

    sys.sbasis = cell_basis(m, cell, k);
    sys.ubasis = cell_basis(m, cell, k + 1);
    const int nk = sys.sbasis.size();
    const int nui = sys.ubasis.size();
    const int nsym = sym_dim(D);
    sys.ns = nsym * nk;
    sys.nu = D * nui;

    const auto& cellref = m.cells[cell];
    {
        std::set<int> nodeset, vertset;
        for (int fi : cellref.faces) {
            if constexpr (D == 2) {
                for (int nd : dm.face_nodes[fi]) nodeset.insert(nd);
            } else {
                for (const auto& tn : dm.face_tri_nodes[fi])
                    for (int nd : tn) nodeset.insert(nd);
            }
            if (sys.has_sigma_trace)
                for (int v : m.faces[fi].loop) vertset.insert(v);
        }
        sys.ub_nodes.assign(nodeset.begin(), nodeset.end());
        sys.sig_vertices.assign(vertset.begin(), vertset.end());
    }
    sys.nt = static_cast<int>(sys.sig_vertices.size());
    sys.nb = D * static_cast<int>(sys.ub_nodes.size());

    // Compliance-weighted stress mass: (A S_alpha p_a, S_beta p_b)_T.
    MatrixXd Mk = mass_matrix(sys.sbasis, cell_rule(m, cell, qform));
    const double c1 = 1.0 / (2.0 * lame.mu);
    const double clam = lame.lambda / (2.0 * lame.mu + D * lame.lambda);
    sys.A = MatrixXd::Zero(sys.ns, sys.ns);
    for (int a = 0; a < nsym; ++a) {
        sys.A.block(a * nk, a * nk, nk, nk) = (c1 * sym_weight<D>(a)) * Mk;
        if (a < D)
            for (int b = 0; b < D; ++b)
                sys.A.block(a * nk, b * nk, nk, nk) -= (c1 * clam) * Mk;
    }

    // b_h coupling to the interior displacement, from the weak-gradient
    // duality blocks: B[(alpha,a),(i,dof)] = sum_j (S_alpha)_{ij} R[(j,a),dof].
    WeakGradOp<D> grad = weak_gradient_op(m, cell, k, k + 1, k + 1, qform);
    sys.Bi = MatrixXd::Zero(sys.ns, sys.nu);
    for (int a = 0; a < nsym; ++a) {
        const auto& [r, s] = sym_pairs<D>()[a];
        for (int aa = 0; aa < nk; ++aa)
            for (int b = 0; b < nui; ++b) {
                sys.Bi(a * nk + aa, r * nui + b) += grad.R_int(s * nk + aa, b);
                if (r != s) sys.Bi(a * nk + aa, s * nui + b) += grad.R_int(r * nk + aa, b);
            }
    }

    sys.Bb = MatrixXd::Zero(sys.ns, sys.nb);
    sys.Zit = MatrixXd::Zero(sys.ns, sys.nt);
    sys.Ztt = MatrixXd::Zero(sys.nt, sys.nt);
    sys.Sii = MatrixXd::Zero(sys.nu, sys.nu);
    sys.Sib = MatrixXd::Zero(sys.nu, sys.nb);
    sys.Sbb = MatrixXd::Zero(sys.nb, sys.nb);
    sys.Fi = VectorXd::Zero(sys.nu);
    sys.Fb = VectorXd::Zero(sys.nb);

    VectorXd uv, Lv, sv;
    Eigen::Matrix<double, D, 1> psi;
    for (int fi : cellref.faces) {
        const auto& face = m.faces[fi];
        const double sign = face.cells[0] == cell ? 1.0 : -1.0;
        const double alpha = 2.0 * lame.mu / face.h;
        const double beta = face.h / (2.0 * lame.mu);
        const bool z_active = sys.has_sigma_trace && face.marker == BoundaryKind::interior;
        const int n_elems = D == 2 ? 1 : static_cast<int>(face.tris.size());
        for (int e = 0; e < n_elems; ++e) {
            FaceShapes<D> shapes = [&] {
                if constexpr (D == 2)
                    return face_shapes(m, dm, fi);
                else
                    return face_tri_shapes(m, dm, fi, e);
            }();
            const int nf = shapes.size();
            std::vector<int> loc(nf);
            for (int c = 0; c < nf; ++c)
                loc[c] = detail::local_slot(sys.ub_nodes, shapes.node_ids[c]);
            detail::P1Shapes<D> p1;
            std::array<int, D> tloc{};
            if (z_active) {
                p1 = detail::p1_shapes(m, fi, e);
                for (int v = 0; v < D; ++v)
                    tloc[v] = detail::local_slot(sys.sig_vertices, p1.verts[v]);
            }

            MatrixXd Gii = MatrixXd::Zero(nui, nui);
            MatrixXd Gib = MatrixXd::Zero(nui, nf);
            MatrixXd Gbb = MatrixXd::Zero(nf, nf);
            MatrixXd Bfac = MatrixXd::Zero(nk, nf);
            MatrixXd Gzz = MatrixXd::Zero(nk, nk);
            MatrixXd Gzt = MatrixXd::Zero(nk, D);
            Eigen::Matrix<double, D, D> Gtt = Eigen::Matrix<double, D, D>::Zero();

            Rule<D> rule = skeleton_element_rule(m, fi, e, qform);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec<D>& x = rule.points[q];
                const double w = rule.weights[q];
                sys.ubasis.eval_all(x, uv);
                shapes.eval_all(x, Lv);
                sys.sbasis.eval_all(x, sv);
                Gii.noalias() += w * uv * uv.transpose();
                Gib.noalias() += w * uv * Lv.transpose();
                Gbb.noalias() += w * Lv * Lv.transpose();
                Bfac.noalias() += w * sv * Lv.transpose();
                if (z_active) {
                    p1.eval(x, psi);
                    Gzz.noalias() += w * sv * sv.transpose();
                    Gzt.noalias() += w * sv * psi.transpose();
                    Gtt.noalias() += w * psi * psi.transpose();
                }
            }

            for (int i = 0; i < D; ++i) {
                sys.Sii.block(i * nui, i * nui, nui, nui) += alpha * Gii;
                for (int b = 0; b < nui; ++b)
                    for (int c = 0; c < nf; ++c)
                        sys.Sib(i * nui + b, loc[c] * D + i) -= alpha * Gib(b, c);
                for (int c = 0; c < nf; ++c)
                    for (int c2 = 0; c2 < nf; ++c2)
                        sys.Sbb(loc[c] * D + i, loc[c2] * D + i) += alpha * Gbb(c, c2);
            }
            for (int a = 0; a < nsym; ++a) {
                const auto& [r, s] = sym_pairs<D>()[a];
                for (int aa = 0; aa < nk; ++aa)
                    for (int c = 0; c < nf; ++c) {
                        const double bv = sign * Bfac(aa, c);
                        sys.Bb(a * nk + aa, loc[c] * D + r) += face.normal[s] * bv;
                        if (r != s) sys.Bb(a * nk + aa, loc[c] * D + s) += face.normal[r] * bv;
                    }
            }
            if (z_active) {
                for (int a = 0; a < D; ++a)
                    for (int b = 0; b < D; ++b)
                        sys.A.block(a * nk, b * nk, nk, nk) += beta * Gzz;
                for (int a = 0; a < D; ++a)
                    for (int aa = 0; aa < nk; ++aa)
                        for (int v = 0; v < D; ++v)
                            sys.Zit(a * nk + aa, tloc[v]) -= beta * Gzt(aa, v);
                for (int v = 0; v < D; ++v)
                    for (int v2 = 0; v2 < D; ++v2)
                        sys.Ztt(tloc[v], tloc[v2]) += beta * Gtt(v, v2);
            }

            // Neumann load on boundary faces marked as such.
            if (face.marker == BoundaryKind::neumann) {
                Rule<D> lrule = skeleton_element_rule(m, fi, e, qload);
                for (std::size_t q = 0; q < lrule.size(); ++q) {
                    const Vec<D>& x = lrule.points[q];
                    const double w = lrule.weights[q];
                    shapes.eval_all(x, Lv);
                    Vec<D> gn = g_n(x);
                    for (int c = 0; c < nf; ++c)
                        for (int i = 0; i < D; ++i)
                            sys.Fb[loc[c] * D + i] -= w * Lv[c] * gn[i];
                }
            }
        }
    }

    // Body load (f, v_i)_T.
    Rule<D> crule = cell_rule(m, cell, qload);
    for (std::size_t q = 0; q < crule.size(); ++q) {
        const Vec<D>& x = crule.points[q];
        const double w = crule.weights[q];
        sys.ubasis.eval_all(x, uv);
        Vec<D> fv = f(x);
        for (int i = 0; i < D; ++i)
            for (int b = 0; b < nui; ++b) sys.Fi[i * nui + b] += w * fv[i] * uv[b];
    }
    return sys;
}

/// Eliminate the interior unknowns; fills C (negated Schur complement, to be
/// scatter-added globally), rhs, and the recovery factors.
template <int D>
void condense(LocalElementSystem<D>& sys) {
    sys.A_llt.compute(sys.A);
    if (sys.A_llt.info() != Eigen::Success)
        throw SolverError("singular stress block on cell " + std::to_string(sys.cell));
    MatrixXd AiBi = sys.A_llt.solve(sys.Bi);
    MatrixXd W = sys.Sii + sys.Bi.transpose() * AiBi;
    W = 0.5 * (W + W.transpose()).eval();
    sys.W_llt.compute(W);
    if (sys.W_llt.info() != Eigen::Success)
        throw SolverError("singular interior displacement block on cell " +
                          std::to_string(sys.cell));

    const int ny = sys.nt + sys.nb;
    // K_xy rows: P (stress test rows), Q (displacement test rows).
    MatrixXd P(sys.ns, ny), Q(sys.nu, ny);
    P.leftCols(sys.nt) = sys.Zit;
    P.rightCols(sys.nb) = -sys.Bb;
    Q.leftCols(sys.nt).setZero();
    Q.rightCols(sys.nb) = -sys.Sib;
    MatrixXd AiP = sys.A_llt.solve(P);
    MatrixXd X2 = -sys.W_llt.solve(Q + sys.Bi.transpose() * AiP);
    MatrixXd X1 = AiP + AiBi * X2;

    MatrixXd Kyy = MatrixXd::Zero(ny, ny);
    Kyy.topLeftCorner(sys.nt, sys.nt) = sys.Ztt;
    Kyy.bottomRightCorner(sys.nb, sys.nb) = -sys.Sbb;
    MatrixXd Shat = Kyy - P.transpose() * X1 - Q.transpose() * X2;
    sys.C = -0.5 * (Shat + Shat.transpose());

    // ghat = b_y - K_xy^T K_xx^{-1} b_x  with b_x = (0, F_i), b_y = (0, F_b).
    VectorXd x2 = -sys.W_llt.solve(sys.Fi);
    VectorXd x1 = AiBi * x2;
    VectorXd ghat = VectorXd::Zero(ny);
    ghat.tail(sys.nb) = sys.Fb;
    ghat -= P.transpose() * x1 + Q.transpose() * x2;
    sys.rhs = -ghat;
    sys.condensed = true;
}

}  // namespace wg

#endif  // WGELAST_FORMS_HPP
