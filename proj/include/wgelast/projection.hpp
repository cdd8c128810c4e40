// SPDX-License-Identifier: MIT
//
// Mass matrices and elementwise L2 projections onto cell and face
// polynomial spaces (the projections Q_j^i and Q_j^b). Mass systems are
// solved by dense Cholesky; the scaled centered bases keep them well
// conditioned for the degrees used here.

#ifndef WGELAST_PROJECTION_HPP
#define WGELAST_PROJECTION_HPP

#include "wgelast/basis.hpp"
#include "wgelast/mesh.hpp"
#include "wgelast/quadrature.hpp"

namespace wg {

/// Integrate a scalar function over a rule.
template <int D, class F>
double integrate(const Rule<D>& rule, F&& f) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(rule.points[q]);
    return s;
}

/// Gram matrix of any basis with eval(a, x) over the given rule.
template <class Basis, int D>
MatrixXd mass_matrix(const Basis& basis, const Rule<D>& rule) {
    const int n = basis.size();
    MatrixXd M = MatrixXd::Zero(n, n);
    VectorXd vals(n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        basis.eval_all(rule.points[q], vals);
        M.selfadjointView<Eigen::Lower>().rankUpdate(vals, rule.weights[q]);
    }
    return M.selfadjointView<Eigen::Lower>();
}

/// Solve the mass system M c = b; throws SolverError on breakdown.
inline VectorXd solve_mass(const MatrixXd& M, const VectorXd& b) {
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw SolverError("singular mass matrix");
    return llt.solve(b);
}

/// L2 projection of f onto P_j(T): coefficients in cell_basis(m, cell, j).
template <int D, class F>
VectorXd project_interior(const Mesh<D>& m, int cell, int j, F&& f, int order) {
    CellBasis<D> basis = cell_basis(m, cell, j);
    Rule<D> rule = cell_rule(m, cell, order);
    MatrixXd M = mass_matrix(basis, rule);
    VectorXd b = VectorXd::Zero(basis.size());
    VectorXd vals(basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        basis.eval_all(rule.points[q], vals);
        b += rule.weights[q] * f(rule.points[q]) * vals;
    }
    return solve_mass(M, b);
}

/// L2 projection of f onto P_j(E): coefficients in face_basis(m, face, j).
template <int D, class F>
VectorXd project_face(const Mesh<D>& m, int face, int j, F&& f, int order) {
    FaceBasis<D> basis = face_basis(m, face, j);
    Rule<D> rule = face_rule(m, face, order);
    MatrixXd M = mass_matrix(basis, rule);
    VectorXd b = VectorXd::Zero(basis.size());
    VectorXd vals(basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        basis.eval_all(rule.points[q], vals);
        b += rule.weights[q] * f(rule.points[q]) * vals;
    }
    return solve_mass(M, b);
}

}  // namespace wg

#endif  // WGELAST_PROJECTION_HPP
