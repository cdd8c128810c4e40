// SPDX-License-Identifier: MIT
//
// Closed-form elasticity solutions on the unit square/cube with homogeneous
// Dirichlet boundary, used by the convergence harness.  Each case bundles the
// displacement, its gradient, the stress, and the load f = div(sigma), all as
// analytic expressions for one (mu, lambda) pair.

#ifndef WGELAST_MANUFACTURED_HPP
#define WGELAST_MANUFACTURED_HPP

#include "wgelast/forms.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace wg {

template <int D>
struct ManufacturedCase {
    std::string id;
    LameParameters lame;
    std::function<Vec<D>(const Vec<D>&)> u;
    std::function<Mat<D>(const Vec<D>&)> grad_u;  ///< row i = gradient of u_i
    std::function<Mat<D>(const Vec<D>&)> sigma;
    std::function<Vec<D>(const Vec<D>&)> f;  ///< f = div(sigma)

    /// Traction sigma(x)·n, for Neumann variants.
    Vec<D> traction(const Vec<D>& x, const Vec<D>& n) const { return sigma(x) * n; }
};

namespace detail {

/// sigma = mu (G + G^T) + lambda tr(G) I from the displacement gradient.
template <int D, class G>
std::function<Mat<D>(const Vec<D>&)> stress_from_gradient(const LameParameters& lame, G grad) {
    return [lame, grad](const Vec<D>& x) {
        Mat<D> g = grad(x);
        return (lame.mu * (g + g.transpose()) + lame.lambda * g.trace() * Mat<D>::Identity())
            .eval();
    };
}

}  // namespace detail

/// Trigonometric displacement on the unit square, mu = 1.  The divergence
/// carries a 1/(1+lambda) factor so the solution stays smooth and bounded
/// uniformly in lambda (no locking in the exact field).
inline ManufacturedCase<2> make_case_2d(double lambda) {
    constexpr double pi = 3.14159265358979323846;
    const double c = 1.0 / (1.0 + lambda);
    ManufacturedCase<2> mc;
    mc.id = "2d";
    mc.lame = LameParameters{1.0, lambda};
    mc.u = [c](const Vec<2>& p) {
        const double x = p.x(), y = p.y();
        return Vec<2>{
            std::sin(2 * pi * y) * (std::cos(2 * pi * x) - 1.0) +
                c * std::sin(pi * x) * std::sin(pi * y),
            std::sin(2 * pi * x) * (1.0 - std::cos(2 * pi * y)) +
                c * std::sin(pi * x) * std::sin(pi * y)};
    };
    mc.grad_u = [c](const Vec<2>& p) {
        const double x = p.x(), y = p.y();
        Mat<2> g;
        g(0, 0) = -2 * pi * std::sin(2 * pi * x) * std::sin(2 * pi * y) +
                  c * pi * std::cos(pi * x) * std::sin(pi * y);
        g(0, 1) = 2 * pi * std::cos(2 * pi * y) * (std::cos(2 * pi * x) - 1.0) +
                  c * pi * std::sin(pi * x) * std::cos(pi * y);
        g(1, 0) = 2 * pi * std::cos(2 * pi * x) * (1.0 - std::cos(2 * pi * y)) +
                  c * pi * std::cos(pi * x) * std::sin(pi * y);
        g(1, 1) = 2 * pi * std::sin(2 * pi * x) * std::sin(2 * pi * y) +
                  c * pi * std::sin(pi * x) * std::cos(pi * y);
        return g;
    };
    mc.sigma = detail::stress_from_gradient<2>(mc.lame, mc.grad_u);
    // f = mu lap(u) + (mu + lambda) grad(div u), div u = c pi sin(pi(x+y)).
    mc.f = [c, lambda](const Vec<2>& p) {
        const double x = p.x(), y = p.y();
        const double mix = 2.0 * c * pi * pi * std::sin(pi * x) * std::sin(pi * y);
        const double gdiv = c * pi * pi * std::cos(pi * (x + y));
        return Vec<2>{
            -4 * pi * pi * std::sin(2 * pi * y) * (2.0 * std::cos(2 * pi * x) - 1.0) - mix +
                (1.0 + lambda) * gdiv,
            -4 * pi * pi * std::sin(2 * pi * x) * (1.0 - 2.0 * std::cos(2 * pi * y)) - mix +
                (1.0 + lambda) * gdiv};
    };
    return mc;
}

/// Polynomial divergence-free displacement on the unit cube, mu = 1/2.  With
/// q(t) = 2t^3 - 3t^2 + t and s(t) = (t - t^2)^2 (so s' = 2q), the field
/// u = (200 s(x)q(y)q(z), -100 q(x)s(y)q(z), -100 q(x)q(y)s(z)) satisfies
/// div u = 0, hence f = mu lap(u) and sigma = 2 mu eps(u) independently of
/// lambda; lambda still enters the discrete compliance.
inline ManufacturedCase<3> make_case_3d(double lambda) {
    auto q = [](double t) { return t * (2.0 * t * t - 3.0 * t + 1.0); };
    auto dq = [](double t) { return 6.0 * t * t - 6.0 * t + 1.0; };
    auto ddq = [](double t) { return 12.0 * t - 6.0; };
    auto s = [](double t) {
        const double w = t - t * t;
        return w * w;
    };
    auto ds = [q](double t) { return 2.0 * q(t); };
    auto dds = [dq](double t) { return 2.0 * dq(t); };

    ManufacturedCase<3> mc;
    mc.id = "3d";
    mc.lame = LameParameters{0.5, lambda};
    mc.u = [=](const Vec<3>& p) {
        const double x = p.x(), y = p.y(), z = p.z();
        return Vec<3>{200.0 * s(x) * q(y) * q(z), -100.0 * q(x) * s(y) * q(z),
                      -100.0 * q(x) * q(y) * s(z)};
    };
    mc.grad_u = [=](const Vec<3>& p) {
        const double x = p.x(), y = p.y(), z = p.z();
        Mat<3> g;
        g(0, 0) = 200.0 * ds(x) * q(y) * q(z);
        g(0, 1) = 200.0 * s(x) * dq(y) * q(z);
        g(0, 2) = 200.0 * s(x) * q(y) * dq(z);
        g(1, 0) = -100.0 * dq(x) * s(y) * q(z);
        g(1, 1) = -100.0 * q(x) * ds(y) * q(z);
        g(1, 2) = -100.0 * q(x) * s(y) * dq(z);
        g(2, 0) = -100.0 * dq(x) * q(y) * s(z);
        g(2, 1) = -100.0 * q(x) * dq(y) * s(z);
        g(2, 2) = -100.0 * q(x) * q(y) * ds(z);
        return g;
    };
    mc.sigma = detail::stress_from_gradient<3>(mc.lame, mc.grad_u);
    mc.f = [=](const Vec<3>& p) {
        const double x = p.x(), y = p.y(), z = p.z();
        const double mu = 0.5;
        return Vec<3>{
            mu * 200.0 *
                (dds(x) * q(y) * q(z) + s(x) * ddq(y) * q(z) + s(x) * q(y) * ddq(z)),
            mu * -100.0 *
                (ddq(x) * s(y) * q(z) + q(x) * dds(y) * q(z) + q(x) * s(y) * ddq(z)),
            mu * -100.0 *
                (ddq(x) * q(y) * s(z) + q(x) * ddq(y) * s(z) + q(x) * q(y) * dds(z))};
    };
    return mc;
}

/// Dimension-dispatched case factory for generic study drivers.
template <int D>
ManufacturedCase<D> make_case(double lambda);

template <>
inline ManufacturedCase<2> make_case<2>(double lambda) {
    return make_case_2d(lambda);
}

template <>
inline ManufacturedCase<3> make_case<3>(double lambda) {
    return make_case_3d(lambda);
}

/// Admissible Lame ratios exercised by the studies.
inline const std::vector<double>& standard_lambdas() {
    static const std::vector<double> v{1.0, 1e3, 1e6};
    return v;
}

}  // namespace wg

#endif  // WGELAST_MANUFACTURED_HPP
