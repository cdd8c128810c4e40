// SPDX-License-Identifier: MIT
//
// Pointwise validation of the closed-form cases: the compliance relation
// A sigma = eps(u), the hard-coded load f against a finite-difference
// divergence of sigma, gradient consistency, boundary values, and the
// divergence-free property of the 3D field.

#include <catch2/catch_amalgamated.hpp>

#include "wgelast/manufactured.hpp"

#include <random>

using namespace wg;

namespace {

template <int D>
Mat<D> compliance(const Mat<D>& s, const LameParameters& lame) {
    const double clam = lame.lambda / (2.0 * lame.mu + D * lame.lambda);
    return (s - clam * s.trace() * Mat<D>::Identity()) / (2.0 * lame.mu);
}

template <int D>
Vec<D> random_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Vec<D> x;
    for (int i = 0; i < D; ++i) x[i] = dist(rng);
    return x;
}

/// Central finite-difference divergence of sigma, row-wise: (div s)_i.
template <int D>
Vec<D> fd_divergence(const ManufacturedCase<D>& mc, const Vec<D>& x, double h) {
    Vec<D> r = Vec<D>::Zero();
    for (int j = 0; j < D; ++j) {
        Vec<D> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        Mat<D> ds = (mc.sigma(xp) - mc.sigma(xm)) / (2.0 * h);
        r += ds.col(j);
    }
    return r;
}

template <int D>
Mat<D> fd_gradient(const ManufacturedCase<D>& mc, const Vec<D>& x, double h) {
    Mat<D> g;
    for (int j = 0; j < D; ++j) {
        Vec<D> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        g.col(j) = (mc.u(xp) - mc.u(xm)) / (2.0 * h);
    }
    return g;
}

template <int D>
void check_case(const ManufacturedCase<D>& mc) {
    std::mt19937 rng(99);
    const double h = 1e-5;
    for (int trial = 0; trial < 1000; ++trial) {
        Vec<D> x = random_point<D>(rng);
        Mat<D> g = mc.grad_u(x);
        Mat<D> s = mc.sigma(x);

        // Constitutive relation: A sigma = eps(u) pointwise.
        Mat<D> eps = 0.5 * (g + g.transpose());
        REQUIRE((compliance<D>(s, mc.lame) - eps).norm() < 1e-8);

        // Stress symmetry.
        REQUIRE((s - s.transpose()).norm() < 1e-13 * (1.0 + s.norm()));

        // Load convention f = div sigma, hard-coded analytically and
        // cross-checked by central differences of sigma.
        Vec<D> f = mc.f(x);
        REQUIRE((f - fd_divergence<D>(mc, x, h)).norm() < 1e-5 * (1.0 + f.norm()));

        // Analytic gradient against central differences of u.
        REQUIRE((g - fd_gradient<D>(mc, x, h)).norm() < 1e-7 * (1.0 + g.norm()));
    }

    // Homogeneous Dirichlet boundary: u vanishes on every face of the box.
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Vec<D> x = random_point<D>(rng);
        const int axis = trial % D;
        x[axis] = (trial / D) % 2 ? 1.0 : 0.0;
        REQUIRE(mc.u(x).norm() < 1e-13);
    }
}

}  // namespace

TEST_CASE("manufactured: 2D case satisfies the model pointwise", "[manufactured]") {
    for (double lambda : standard_lambdas()) {
        ManufacturedCase<2> mc = make_case_2d(lambda);
        REQUIRE(mc.id == "2d");
        REQUIRE(mc.lame.mu == 1.0);
        REQUIRE(mc.lame.lambda == lambda);
        check_case<2>(mc);
    }
}

TEST_CASE("manufactured: 3D case satisfies the model pointwise", "[manufactured]") {
    for (double lambda : standard_lambdas()) {
        ManufacturedCase<3> mc = make_case_3d(lambda);
        REQUIRE(mc.id == "3d");
        REQUIRE(mc.lame.mu == 0.5);
        check_case<3>(mc);
    }
}

TEST_CASE("manufactured: 3D displacement is divergence free", "[manufactured]") {
    ManufacturedCase<3> mc = make_case_3d(1e3);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        Vec<3> x = random_point<3>(rng);
        REQUIRE(std::abs(mc.grad_u(x).trace()) < 1e-12);
        // With div u = 0 the stress is lambda-independent.
        Mat<3> s1 = make_case_3d(1.0).sigma(x);
        REQUIRE((mc.sigma(x) - s1).norm() < 1e-12 * (1.0 + s1.norm()));
    }
}

TEST_CASE("manufactured: traction helper applies the normal", "[manufactured]") {
    ManufacturedCase<2> mc = make_case_2d(10.0);
    Vec<2> x{0.3, 0.7}, n{0.6, 0.8};
    REQUIRE((mc.traction(x, n) - mc.sigma(x) * n).norm() == 0.0);
}
