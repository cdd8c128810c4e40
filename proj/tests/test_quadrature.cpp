// SPDX-License-Identifier: MIT
//
// Quadrature oracles: every expected value below comes from a closed form,
// never from running the library.
//
//   - segment:  int_0^1 t^p dt = 1/(p+1)
//   - triangle: int_T x^a y^b dx = a! b! / (a+b+2)!          (reference simplex)
//   - tet:      int_T x^a y^b z^c dx = a! b! c! / (a+b+c+3)!
//   - unit square fanned into 4 triangles from its centroid:
//       int x^2 y^2 = 1/9
//   - unit cube split into 6 tets: int xyz = 1/8

#include <catch2/catch_amalgamated.hpp>

#include "wgelast/quadrature.hpp"

#include <cmath>

using namespace wg;

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

template <int D>
double integrate(const Rule<D>& rule, const std::function<double(const Vec<D>&)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.points.size(); ++i) s += rule.weights[i] * f(rule.points[i]);
    return s;
}

}  // namespace

TEST_CASE("segment rule integrates monomials exactly", "[quadrature]") {
    for (int order = 0; order <= 24; ++order) {
        Rule<1> r = simplex_rule<1>(order);
        for (int p = 0; p <= order; ++p) {
            double got = integrate<1>(r, [&](const Vec<1>& x) { return std::pow(x[0], p); });
            REQUIRE(got == Catch::Approx(1.0 / (p + 1)).epsilon(1e-13));
        }
    }
}

TEST_CASE("triangle rule integrates monomials exactly", "[quadrature]") {
    for (int order = 0; order <= 16; ++order) {
        Rule<2> r = simplex_rule<2>(order);
        for (int a = 0; a <= order; ++a) {
            for (int b = 0; a + b <= order; ++b) {
                double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                double got = integrate<2>(
                    r, [&](const Vec<2>& x) { return std::pow(x[0], a) * std::pow(x[1], b); });
                REQUIRE(got == Catch::Approx(exact).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("tetrahedron rule integrates monomials exactly", "[quadrature]") {
    for (int order = 0; order <= 12; ++order) {
        Rule<3> r = simplex_rule<3>(order);
        for (int a = 0; a <= order; ++a)
            for (int b = 0; a + b <= order; ++b)
                for (int c = 0; a + b + c <= order; ++c) {
                    double exact =
                        factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
                    double got = integrate<3>(r, [&](const Vec<3>& x) {
                        return std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
                    });
                    REQUIRE(got == Catch::Approx(exact).epsilon(1e-12));
                }
    }
}

TEST_CASE("weights are positive and sum to the reference volume", "[quadrature]") {
    for (int order = 0; order <= max_quadrature_order; order += 7) {
        Rule<2> r2 = simplex_rule<2>(order);
        Rule<3> r3 = simplex_rule<3>(order);
        double s2 = 0.0, s3 = 0.0;
        for (double w : r2.weights) {
            REQUIRE(w > 0.0);
            s2 += w;
        }
        for (double w : r3.weights) {
            REQUIRE(w > 0.0);
            s3 += w;
        }
        REQUIRE(s2 == Catch::Approx(0.5).epsilon(1e-14));
        REQUIRE(s3 == Catch::Approx(1.0 / 6.0).epsilon(1e-14));
    }
}

TEST_CASE("orders beyond the supported cap are rejected", "[quadrature]") {
    REQUIRE_THROWS_AS(simplex_rule<2>(max_quadrature_order + 1), UnsupportedOrderError);
    REQUIRE_THROWS_AS(simplex_rule<3>(max_quadrature_order + 1), UnsupportedOrderError);
    REQUIRE_THROWS_AS(simplex_rule<2>(-1), UnsupportedOrderError);
}

TEST_CASE("mapped triangle fan integrates x^2 y^2 over the unit square", "[quadrature]") {
    // Fan the unit square around its centroid; int_{[0,1]^2} x^2 y^2 = 1/9.
    const Vec<2> c{0.5, 0.5};
    const Vec<2> corners[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    Rule<2> ref = simplex_rule<2>(4);
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        Rule<2> phys = map_affine<2>(ref, {c, corners[i], corners[(i + 1) % 4]});
        total += integrate<2>(phys, [](const Vec<2>& x) { return x[0] * x[0] * x[1] * x[1]; });
    }
    REQUIRE(std::abs(total - 1.0 / 9.0) < 1e-13);
}

TEST_CASE("mapped tet split integrates xyz over the unit cube", "[quadrature]") {
    // Six tets sharing the diagonal (0,0,0)-(1,1,1); int_{[0,1]^3} xyz = 1/8.
    Rule<3> ref = simplex_rule<3>(3);
    double total = 0.0;
    int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& p : perms) {
        std::array<Vec<3>, 4> v;
        v[0] = Vec<3>::Zero();
        for (int j = 0; j < 3; ++j) {
            v[j + 1] = v[j];
            v[j + 1][p[j]] += 1.0;
        }
        Rule<3> phys = map_affine<3>(ref, v);
        total += integrate<3>(phys, [](const Vec<3>& x) { return x[0] * x[1] * x[2]; });
    }
    REQUIRE(std::abs(total - 0.125) < 1e-13);
}

TEST_CASE("embedded face rules integrate over lower-dimensional simplices", "[quadrature]") {
    // Segment from (0,0) to (3,4): length 5; int of 1 = 5.
    Rule<1> seg = simplex_rule<1>(2);
    Rule<2> e = embed_simplex<2, 1>(seg, {Vec<2>{0, 0}, Vec<2>{3, 4}});
    double len = 0.0;
    for (double w : e.weights) len += w;
    REQUIRE(len == Catch::Approx(5.0).epsilon(1e-14));

    // Triangle (0,0,0),(1,0,0),(0,1,1) has area sqrt(2)/2.
    Rule<2> tri = simplex_rule<2>(2);
    Rule<3> f = embed_simplex<3, 2>(tri, {Vec<3>{0, 0, 0}, Vec<3>{1, 0, 0}, Vec<3>{0, 1, 1}});
    double area = 0.0;
    for (double w : f.weights) area += w;
    REQUIRE(area == Catch::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
}
