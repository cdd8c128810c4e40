// SPDX-License-Identifier: MIT
//
// Mesh generator / submesh / regularity oracles. Frozen expected values:
//   - n x n triangle mesh: (n+1)^2 vertices, 2 n^2 cells, 3n^2 + 2n proper
//     edges (n=1: 4 vertices, 2 cells, 5 edges), areas sum to 1
//   - right-isosceles triangle cells: theta* = 1/6, l* = 1/sqrt(2) exactly
//   - equilateral triangle, star center = centroid( = incenter):
//     theta* = inradius / side = 1/(2 sqrt 3) ~ 0.288675
//   - unit square cell: l* = 1/sqrt(2); centroid fan -> 4 triangles, area 1/4
//   - square with one hanging mid-side node -> 5 fan triangles
//   - ladder mesh: areas sum to 1, theta* >= 0.2, n=4 has a hanging-node
//     witness (a straight cell side made of >= 2 proper edges with distinct
//     neighbor cells)
//   - cube tet mesh: 6 n^3 tets, (n+1)^3 vertices, volumes sum to 1

#include <catch2/catch_amalgamated.hpp>

#include "wgelast/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace wg;

TEST_CASE("triangle mesh counts and measures", "[mesh]") {
    for (int n : {1, 2, 4, 7}) {
        Mesh<2> m = generate_triangle_mesh(n);
        CHECK(static_cast<int>(m.vertices.size()) == (n + 1) * (n + 1));
        CHECK(static_cast<int>(m.cells.size()) == 2 * n * n);
        CHECK(static_cast<int>(m.faces.size()) == 3 * n * n + 2 * n);
        double area = 0.0;
        for (const auto& c : m.cells) area += c.volume;
        CHECK(area == Catch::Approx(1.0).epsilon(1e-14));
        int nb = 0;
        for (const auto& f : m.faces) {
            if (f.cells[1] < 0) {
                ++nb;
                CHECK(f.marker == BoundaryKind::dirichlet);
            } else {
                CHECK(f.marker == BoundaryKind::interior);
            }
        }
        CHECK(nb == 4 * n);
    }
}

TEST_CASE("triangle mesh regularity constants are exact", "[mesh]") {
    Mesh<2> m = generate_triangle_mesh(3);
    RegularityReport rep = check_regularity(m);
    // Right isosceles triangle with legs 1/n, centroid star center:
    // min edge-line distance = 1/(3 sqrt 2 n), h_T = sqrt(2)/n.
    CHECK(rep.theta_min == Catch::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(rep.l_min == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("equilateral triangle star radius equals its inradius", "[mesh]") {
    Mesh<2> m;
    m.vertices = {Vec<2>{0, 0}, Vec<2>{1, 0}, Vec<2>{0.5, std::sqrt(3.0) / 2.0}};
    m.cells.resize(1);
    m.cells[0].vertex_ids = {0, 1, 2};
    m.boundary_markers[{0, 1}] = BoundaryKind::dirichlet;
    m.boundary_markers[{1, 2}] = BoundaryKind::dirichlet;
    m.boundary_markers[{0, 2}] = BoundaryKind::dirichlet;
    finalize(m);
    CHECK(m.cells[0].theta_star == Catch::Approx(1.0 / (2.0 * std::sqrt(3.0))).margin(1e-6));
    CHECK(m.cells[0].h == Catch::Approx(1.0).epsilon(1e-14));
    // Simplicial cell: the submesh degenerates to the cell itself.
    CHECK(m.cells[0].sub.size() == 1);
}

namespace {

Mesh<2> single_cell(std::vector<Vec<2>> pts) {
    Mesh<2> m;
    m.vertices = std::move(pts);
    m.cells.resize(1);
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        m.cells[0].vertex_ids.push_back(static_cast<int>(i));
    const int n = static_cast<int>(m.vertices.size());
    for (int i = 0; i < n; ++i) {
        int a = i, b = (i + 1) % n;
        m.boundary_markers[{std::min(a, b), std::max(a, b)}] = BoundaryKind::dirichlet;
    }
    finalize(m);
    return m;
}

}  // namespace

TEST_CASE("square cell fans into four equal triangles around the centroid", "[mesh]") {
    Mesh<2> m = single_cell({Vec<2>{0, 0}, Vec<2>{1, 0}, Vec<2>{1, 1}, Vec<2>{0, 1}});
    const auto& c = m.cells[0];
    REQUIRE(c.sub.size() == 4);
    CHECK((c.star_center - Vec<2>{0.5, 0.5}).norm() < 1e-14);
    for (const auto& s : c.sub) {
        double area = 0.5 * std::abs((s[1] - s[0]).x() * (s[2] - s[0]).y() -
                                     (s[1] - s[0]).y() * (s[2] - s[0]).x());
        CHECK(area == Catch::Approx(0.25).epsilon(1e-14));
    }
    CHECK(c.l_star == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(c.theta_star == Catch::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("hanging mid-side node yields a five-triangle fan", "[mesh]") {
    Mesh<2> m = single_cell(
        {Vec<2>{0, 0}, Vec<2>{1, 0}, Vec<2>{1, 1}, Vec<2>{0.5, 1}, Vec<2>{0, 1}});
    REQUIRE(m.cells[0].sub.size() == 5);
    double area = 0.0;
    for (const auto& s : m.cells[0].sub)
        area += 0.5 * std::abs((s[1] - s[0]).x() * (s[2] - s[0]).y() -
                               (s[1] - s[0]).y() * (s[2] - s[0]).x());
    CHECK(area == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(static_cast<int>(m.faces.size()) == 5);
}

TEST_CASE("star-shaped nonconvex cell uses the kernel Chebyshev center", "[mesh]") {
    // L-shape; kernel = [0,1]^2, Chebyshev center (0.5, 0.5).
    Mesh<2> m = single_cell({Vec<2>{0, 0}, Vec<2>{2, 0}, Vec<2>{2, 1}, Vec<2>{1, 1},
                             Vec<2>{1, 2}, Vec<2>{0, 2}});
    CHECK((m.cells[0].star_center - Vec<2>{0.5, 0.5}).norm() < 1e-9);
    CHECK(m.cells[0].volume == Catch::Approx(3.0).epsilon(1e-14));
    CHECK(m.cells[0].sub.size() == 6);
}

TEST_CASE("cells with empty star kernel are rejected", "[mesh]") {
    // U-shape: no point sees the whole polygon.
    REQUIRE_THROWS_AS(single_cell({Vec<2>{0, 0}, Vec<2>{3, 0}, Vec<2>{3, 3}, Vec<2>{2, 3},
                                   Vec<2>{2, 1}, Vec<2>{1, 1}, Vec<2>{1, 3}, Vec<2>{0, 3}}),
                      NonStarShapedError);
}

TEST_CASE("ladder mesh covers the square with regular cells", "[mesh]") {
    for (int n : {2, 4, 8}) {
        Mesh<2> m = generate_ladder_mesh(n);
        double area = 0.0;
        for (const auto& c : m.cells) area += c.volume;
        CHECK(area == Catch::Approx(1.0).epsilon(1e-13));
        RegularityReport rep = check_regularity(m);
        CHECK(rep.theta_min >= 0.2);
        validate_submesh(m);
    }
}

TEST_CASE("ladder mesh has hanging-node witnesses", "[mesh]") {
    Mesh<2> m = generate_ladder_mesh(4);
    // Witness: a straight cell side composed of >= 2 proper edges whose
    // opposite cells differ (the side's owner sees two distinct neighbors).
    bool witness = false;
    for (std::size_t ci = 0; ci < m.cells.size() && !witness; ++ci) {
        const auto& loop = m.cells[ci].vertex_ids;
        const int nv = static_cast<int>(loop.size());
        for (int i = 0; i < nv && !witness; ++i) {
            // Hanging node: middle vertex collinear with its loop neighbors.
            Vec<2> a = m.vertices[loop[(i + nv - 1) % nv]];
            Vec<2> b = m.vertices[loop[i]];
            Vec<2> c = m.vertices[loop[(i + 1) % nv]];
            double cross = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
            if (std::abs(cross) > 1e-12) continue;
            int left = m.find_face(loop[(i + nv - 1) % nv], loop[i]);
            int right = m.find_face(loop[i], loop[(i + 1) % nv]);
            REQUIRE(left >= 0);
            REQUIRE(right >= 0);
            int nb_left = m.faces[left].other_cell(static_cast<int>(ci));
            int nb_right = m.faces[right].other_cell(static_cast<int>(ci));
            if (nb_left != nb_right) witness = true;
        }
    }
    CHECK(witness);
}

TEST_CASE("cube tet mesh counts and volumes", "[mesh]") {
    for (int n : {1, 2, 3}) {
        Mesh<3> m = generate_cube_tet_mesh(n);
        CHECK(static_cast<int>(m.cells.size()) == 6 * n * n * n);
        CHECK(static_cast<int>(m.vertices.size()) == (n + 1) * (n + 1) * (n + 1));
        double vol = 0.0;
        for (const auto& c : m.cells) {
            CHECK(c.volume > 0.0);
            vol += c.volume;
            CHECK(c.sub.size() == 1);  // tets degenerate to themselves
        }
        CHECK(vol == Catch::Approx(1.0).epsilon(1e-13));
        validate_submesh(m);
    }
    Mesh<3> m1 = generate_cube_tet_mesh(1);
    int nb = 0;
    for (const auto& f : m1.faces)
        if (f.cells[1] < 0) ++nb;
    CHECK(nb == 12);  // 2 triangles per cube side
}

TEST_CASE("face geometry: unit outward normals and diameters", "[mesh]") {
    Mesh<2> m2 = generate_triangle_mesh(2);
    for (const auto& f : m2.faces) {
        CHECK(f.normal.norm() == Catch::Approx(1.0).epsilon(1e-14));
        // Outward from cells[0]: positive signed distance from that cell's
        // star center to the face plane along the normal.
        const auto& c = m2.cells[f.cells[0]];
        CHECK(f.normal.dot(f.centroid - c.star_center) > 0.0);
        CHECK(f.h == Catch::Approx(f.measure).epsilon(1e-14));  // segments
    }
    Mesh<3> m3 = generate_cube_tet_mesh(2);
    for (const auto& f : m3.faces) {
        CHECK(f.normal.norm() == Catch::Approx(1.0).epsilon(1e-14));
        const auto& c = m3.cells[f.cells[0]];
        CHECK(f.normal.dot(f.centroid - c.star_center) > 0.0);
    }
    validate_submesh(m2);
}

TEST_CASE("submesh interior faces are shared by exactly two sub-simplices", "[mesh]") {
    // Exercised on a mesh with genuine fans (ladder) and on simplicial meshes
    // inside other tests; here the mixed case with hanging nodes.
    Mesh<2> m = generate_ladder_mesh(2);
    validate_submesh(m);
    Mesh<2> t = generate_triangle_mesh(2);
    validate_submesh(t);
}

TEST_CASE("cell quadrature integrates over fans", "[mesh]") {
    // Single square cell: int x^2 y^2 = 1/9 over the 4-triangle fan.
    Mesh<2> m = single_cell({Vec<2>{0, 0}, Vec<2>{1, 0}, Vec<2>{1, 1}, Vec<2>{0, 1}});
    Rule<2> r = cell_rule(m, 0, 4);
    double v = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q)
        v += r.weights[q] * r.points[q].x() * r.points[q].x() * r.points[q].y() * r.points[q].y();
    CHECK(std::abs(v - 1.0 / 9.0) < 1e-13);

    // Face rule on the bottom edge: int_0^1 x^3 ds = 1/4.
    int bottom = m.find_face(0, 1);
    REQUIRE(bottom >= 0);
    Rule<2> fr = face_rule(m, bottom, 3);
    double fv = 0.0;
    for (std::size_t q = 0; q < fr.size(); ++q)
        fv += fr.weights[q] * std::pow(fr.points[q].x(), 3);
    CHECK(std::abs(fv - 0.25) < 1e-14);
}
