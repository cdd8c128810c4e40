// SPDX-License-Identifier: MIT
//
// Quadrature on reference simplices (segment, triangle, tetrahedron) with
// positive weights at arbitrary order, built as conical products of
// Gauss-Legendre and Gauss-Jacobi rules. Nodes and weights come from the
// Golub-Welsch eigenvalue method applied to the three-term recurrence of the
// corresponding orthogonal polynomials.
//
// Conventions:
//   - reference simplex = { x_i >= 0, sum x_i <= 1 }, volume 1/d!
//   - a rule of "order" p integrates all polynomials of total degree <= p
//   - weights always sum to the (mapped) simplex measure

#ifndef WGELAST_QUADRATURE_HPP
#define WGELAST_QUADRATURE_HPP

#include "wgelast/common.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>

namespace wg {

/// Largest supported exactness order for simplex rules.
inline constexpr int max_quadrature_order = 50;

template <int D>
struct Rule {
    std::vector<Vec<D>> points;
    std::vector<double> weights;
    std::size_t size() const { return points.size(); }
};

namespace detail {

/// Gauss nodes/weights on [0,1] for the weight (1-t)^alpha, alpha integer >= 0.
/// alpha = 0 is plain Gauss-Legendre. Exact for polynomial degree <= 2n-1.
inline void gauss_jacobi_01(int n, int alpha, std::vector<double>& nodes,
                            std::vector<double>& weights) {
    // Recurrence of Jacobi polynomials P^(alpha,0) on [-1,1].
    const double a = static_cast<double>(alpha), b = 0.0;
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) {
        double den = (2 * k + a + b) * (2 * k + a + b + 2);
        diag[k] = (k == 0 && a + b == 0) ? 0.0 : (b * b - a * a) / den;
    }
    for (int k = 1; k < n; ++k) {
        double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
        double den = std::pow(2 * k + a + b, 2) * (2 * k + a + b + 1) * (2 * k + a + b - 1);
        sub[k - 1] = std::sqrt(num / den);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    // mu0 = int_{-1}^{1} (1-x)^a dx = 2^{a+1}/(a+1)   (b = 0)
    const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()[i];
        double w = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        // Map [-1,1] -> [0,1] absorbing the weight normalization:
        // int_0^1 f(t)(1-t)^a dt = 2^{-(a+1)} int_{-1}^1 f((x+1)/2)(1-x)^a dx.
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = w / std::pow(2.0, a + 1.0);
    }
}

inline int points_per_direction(int order) { return order / 2 + 1; }

template <int D>
Rule<D> build_simplex_rule(int order) {
    const int n = points_per_direction(order);
    Rule<D> rule;
    if constexpr (D == 1) {
        std::vector<double> x, w;
        gauss_jacobi_01(n, 0, x, w);
        rule.points.resize(n);
        rule.weights = w;
        for (int i = 0; i < n; ++i) rule.points[i][0] = x[i];
    } else if constexpr (D == 2) {
        // (x,y) = (u(1-v), v), Jacobian (1-v): Legendre x Jacobi(1).
        std::vector<double> xu, wu, xv, wv;
        gauss_jacobi_01(n, 0, xu, wu);
        gauss_jacobi_01(n, 1, xv, wv);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                rule.points.push_back(Vec<2>{xu[i] * (1.0 - xv[j]), xv[j]});
                rule.weights.push_back(wu[i] * wv[j]);
            }
    } else {
        static_assert(D == 3);
        // (x,y,z) = (u(1-v)(1-w), v(1-w), w), Jacobian (1-v)(1-w)^2.
        std::vector<double> xu, wu, xv, wv, xw, ww;
        gauss_jacobi_01(n, 0, xu, wu);
        gauss_jacobi_01(n, 1, xv, wv);
        gauss_jacobi_01(n, 2, xw, ww);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    rule.points.push_back(Vec<3>{xu[i] * (1.0 - xv[j]) * (1.0 - xw[l]),
                                                 xv[j] * (1.0 - xw[l]), xw[l]});
                    rule.weights.push_back(wu[i] * wv[j] * ww[l]);
                }
    }
    return rule;
}

}  // namespace detail

/// Rule on the reference D-simplex, exact for total degree <= order.
/// Cached per order; throws UnsupportedOrderError outside [0, max].
template <int D>
const Rule<D>& simplex_rule(int order) {
    if (order < 0 || order > max_quadrature_order)
        throw UnsupportedOrderError("order " + std::to_string(order) + " not in [0, " +
                                    std::to_string(max_quadrature_order) + "]");
    static std::map<int, Rule<D>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, detail::build_simplex_rule<D>(order)).first;
    return it->second;
}

/// Affine image of a reference rule on the simplex with the given vertices.
template <int D>
Rule<D> map_affine(const Rule<D>& ref, const std::array<Vec<D>, D + 1>& v) {
    Mat<D> J;
    for (int c = 0; c < D; ++c) J.col(c) = v[c + 1] - v[0];
    const double scale = std::abs(J.determinant());
    Rule<D> out;
    out.points.resize(ref.size());
    out.weights.resize(ref.size());
    for (std::size_t q = 0; q < ref.size(); ++q) {
        out.points[q] = v[0] + J * ref.points[q];
        out.weights[q] = ref.weights[q] * scale;
    }
    return out;
}

/// Image of a reference SimD-simplex rule on a simplex embedded in R^AmbD
/// (edges of 2D cells, triangular faces of 3D cells). Weights carry the
/// SimD-dimensional measure.
template <int AmbD, int SimD>
Rule<AmbD> embed_simplex(const Rule<SimD>& ref, const std::array<Vec<AmbD>, SimD + 1>& v) {
    Eigen::Matrix<double, AmbD, SimD> E;
    for (int c = 0; c < SimD; ++c) E.col(c) = v[c + 1] - v[0];
    const double scale = std::sqrt((E.transpose() * E).determinant());
    Rule<AmbD> out;
    out.points.resize(ref.size());
    out.weights.resize(ref.size());
    for (std::size_t q = 0; q < ref.size(); ++q) {
        out.points[q] = v[0] + E * ref.points[q];
        out.weights[q] = ref.weights[q] * scale;
    }
    return out;
}

}  // namespace wg

#endif  // WGELAST_QUADRATURE_HPP
