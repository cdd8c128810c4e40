// SPDX-License-Identifier: MIT
//
// Element-local discrete weak gradient and weak divergence operators.
//
// Weak gradient of a scalar pair v = {v_i, v_b} into [P_k(T)]^d:
//   (grad_w v, tau)_T = -(v_i, div tau)_T + <v_b, tau . n>_{dT}
// for all tau in [P_k(T)]^d. Vector fields apply it row-wise.
//
// Weak divergence of a vector pair v = {v_i, v_b} into P_r(T):
//   (div_w v, q)_T = -(v_i, grad q)_T + <v_b . n, q>_{dT}.
//
// Both are materialized as dense matrices acting on stacked coefficient
// vectors: interior coefficients (componentwise blocks for vectors) and one
// block per proper cell face in that face's basis. The raw duality blocks
// R_* (no mass inverse applied) are kept alongside: the bilinear form
// (tau, grad_w v)_T needs only those.

#ifndef WGELAST_WEAK_OPS_HPP
#define WGELAST_WEAK_OPS_HPP

#include "wgelast/basis.hpp"
#include "wgelast/mesh.hpp"
#include "wgelast/projection.hpp"

#include <vector>

namespace wg {

template <int D>
struct WeakGradOp {
    int cell = -1;
    int k = 0;
    CellBasis<D> target;              ///< P_k, gradient components
    CellBasis<D> interior;            ///< interior input space
    std::vector<FaceBasis<D>> faces;  ///< trace input spaces, per cell face

    /// Duality blocks, row (j*nk + a) <-> component j, target function m_a:
    /// R_int((j,a), b)     = -(p_b, d_j m_a)_T
    /// R_face[f]((j,a), c) = <phi_c n_j, m_a>_E   (n outward from this cell)
    MatrixXd R_int;
    std::vector<MatrixXd> R_face;

    /// Materialized operator (mass inverse applied row-block-wise).
    MatrixXd op_int;
    std::vector<MatrixXd> op_face;
};

template <int D>
struct WeakDivOp {
    int cell = -1;
    int r = 0;
    CellBasis<D> target;              ///< P_r
    CellBasis<D> interior;            ///< per-component interior input space
    std::vector<FaceBasis<D>> faces;  ///< per-component trace spaces

    /// R_int(a, j*ni + b)     = -(p_b, d_j q_a)_T
    /// R_face[f](a, j*nf + c) = <phi_c n_j, q_a>_E
    MatrixXd R_int;
    std::vector<MatrixXd> R_face;

    MatrixXd op_int;
    std::vector<MatrixXd> op_face;
};

template <int D>
WeakGradOp<D> weak_gradient_op(const Mesh<D>& m, int cell, int k, int interior_degree,
                               int trace_degree, int order = -1) {
    WeakGradOp<D> op;
    op.cell = cell;
    op.k = k;
    op.target = cell_basis(m, cell, k);
    op.interior = cell_basis(m, cell, interior_degree);
    const int nk = op.target.size();
    const int ni = op.interior.size();

    const int cell_order = order >= 0 ? order : interior_degree + std::max(k - 1, 0) + 2;
    const int face_order = order >= 0 ? order : trace_degree + k + 2;

    op.R_int = MatrixXd::Zero(D * nk, ni);
    Rule<D> crule2 = cell_rule(m, cell, std::max(cell_order, 2 * k));
    for (std::size_t q = 0; q < crule2.size(); ++q) {
        const Vec<D>& x = crule2.points[q];
        const double w = crule2.weights[q];
        for (int a = 0; a < nk; ++a) {
            // The test tensor is tau = e_j m_a, so div tau = d_j m_a.
            Vec<D> gm = op.target.grad(a, x);
            for (int b = 0; b < ni; ++b) {
                double pb = op.interior.eval(b, x);
                for (int j = 0; j < D; ++j) op.R_int(j * nk + a, b) -= w * pb * gm[j];
            }
        }
    }

    for (std::size_t fl = 0; fl < m.cells[cell].faces.size(); ++fl) {
        const int fi = m.cells[cell].faces[fl];
        const auto& face = m.faces[fi];
        const double sign = face.cells[0] == cell ? 1.0 : -1.0;
        FaceBasis<D> fb = face_basis(m, fi, trace_degree);
        const int nf = fb.size();
        MatrixXd R = MatrixXd::Zero(D * nk, nf);
        Rule<D> frule = face_rule(m, fi, face_order);
        for (std::size_t q = 0; q < frule.size(); ++q) {
            const Vec<D>& x = frule.points[q];
            const double w = frule.weights[q];
            for (int c = 0; c < nf; ++c) {
                double phic = fb.eval(c, x);
                for (int a = 0; a < nk; ++a) {
                    double ma = op.target.eval(a, x);
                    for (int j = 0; j < D; ++j)
                        R(j * nk + a, c) += w * phic * sign * face.normal[j] * ma;
                }
            }
        }
        op.faces.push_back(std::move(fb));
        op.R_face.push_back(std::move(R));
    }

    MatrixXd Mk = mass_matrix(op.target, cell_rule(m, cell, 2 * k + 2));
    Eigen::LLT<MatrixXd> llt(Mk);
    if (llt.info() != Eigen::Success) throw SolverError("singular mass matrix");
    op.op_int.resize(D * nk, ni);
    for (int j = 0; j < D; ++j)
        op.op_int.middleRows(j * nk, nk) = llt.solve(op.R_int.middleRows(j * nk, nk));
    for (const MatrixXd& R : op.R_face) {
        MatrixXd o(D * nk, R.cols());
        for (int j = 0; j < D; ++j) o.middleRows(j * nk, nk) = llt.solve(R.middleRows(j * nk, nk));
        op.op_face.push_back(std::move(o));
    }
    return op;
}

template <int D>
WeakDivOp<D> weak_divergence_op(const Mesh<D>& m, int cell, int r, int interior_degree,
                                int trace_degree, int order = -1) {
    WeakDivOp<D> op;
    op.cell = cell;
    op.r = r;
    op.target = cell_basis(m, cell, r);
    op.interior = cell_basis(m, cell, interior_degree);
    const int nr = op.target.size();
    const int ni = op.interior.size();

    const int cell_order = order >= 0 ? order : interior_degree + std::max(r - 1, 0) + 2;
    const int face_order = order >= 0 ? order : trace_degree + r + 2;

    op.R_int = MatrixXd::Zero(nr, D * ni);
    Rule<D> crule = cell_rule(m, cell, cell_order);
    for (std::size_t q = 0; q < crule.size(); ++q) {
        const Vec<D>& x = crule.points[q];
        const double w = crule.weights[q];
        for (int a = 0; a < nr; ++a) {
            Vec<D> gq = op.target.grad(a, x);
            for (int b = 0; b < ni; ++b) {
                double pb = op.interior.eval(b, x);
                for (int j = 0; j < D; ++j) op.R_int(a, j * ni + b) -= w * pb * gq[j];
            }
        }
    }

    for (std::size_t fl = 0; fl < m.cells[cell].faces.size(); ++fl) {
        const int fi = m.cells[cell].faces[fl];
        const auto& face = m.faces[fi];
        const double sign = face.cells[0] == cell ? 1.0 : -1.0;
        FaceBasis<D> fb = face_basis(m, fi, trace_degree);
        const int nf = fb.size();
        MatrixXd R = MatrixXd::Zero(nr, D * nf);
        Rule<D> frule = face_rule(m, fi, face_order);
        for (std::size_t q = 0; q < frule.size(); ++q) {
            const Vec<D>& x = frule.points[q];
            const double w = frule.weights[q];
            for (int a = 0; a < nr; ++a) {
                double qa = op.target.eval(a, x);
                for (int c = 0; c < nf; ++c) {
                    double phic = fb.eval(c, x);
                    for (int j = 0; j < D; ++j)
                        R(a, j * nf + c) += w * phic * sign * face.normal[j] * qa;
                }
            }
        }
        op.faces.push_back(std::move(fb));
        op.R_face.push_back(std::move(R));
    }

    MatrixXd Mr = mass_matrix(op.target, cell_rule(m, cell, 2 * r + 2));
    Eigen::LLT<MatrixXd> llt(Mr);
    if (llt.info() != Eigen::Success) throw SolverError("singular mass matrix");
    op.op_int = llt.solve(op.R_int);
    op.op_face.clear();
    for (const MatrixXd& R : op.R_face) op.op_face.push_back(llt.solve(R));
    return op;
}

}  // namespace wg

#endif  // WGELAST_WEAK_OPS_HPP
