// SPDX-License-Identifier: MIT
//
// Text import/export of polytopal meshes: format acceptance, parse errors
// with line numbers, topology validation, and round-trip identity.

#include <catch2/catch_amalgamated.hpp>

#include "wgelast/mesh.hpp"
#include "wgelast/mesh_io.hpp"

#include <string>

using namespace wg;

namespace {

const std::string two_triangles =
    "# two triangles on the unit square\n"
    "wgmesh 2 4 2 4\n"
    "v 0 0\n"
    "v 1 0\n"
    "v 1 1\n"
    "v 0 1\n"
    "c 0 1 2\n"
    "c 0 2 3\n"
    "b 0 1 D\n"
    "b 1 2 D\n"
    "b 2 3 N\n"
    "b 3 0 N\n";

}  // namespace

TEST_CASE("import: minimal two-triangle file", "[mesh_io]") {
    REQUIRE(wgmesh_dimension(two_triangles) == 2);
    Mesh<2> m = import_mesh<2>(two_triangles);
    REQUIRE(m.cells.size() == 2);
    REQUIRE(m.vertices.size() == 4);
    REQUIRE(m.faces.size() == 5);
    REQUIRE(m.vertices[2].isApprox(Vec<2>{1.0, 1.0}));

    int bottom = m.find_face(0, 1);
    int top = m.find_face(2, 3);
    int diag = m.find_face(0, 2);
    REQUIRE(m.faces[bottom].marker == BoundaryKind::dirichlet);
    REQUIRE(m.faces[top].marker == BoundaryKind::neumann);
    REQUIRE(m.faces[diag].marker == BoundaryKind::interior);
    REQUIRE(m.faces[diag].cells[1] != -1);
}

TEST_CASE("import: comments, blank lines, trailing comment on data line", "[mesh_io]") {
    std::string text =
        "wgmesh 2 3 1 3\n"
        "\n"
        "v 0 0  # lower-left corner\n"
        "v 1 0\n"
        "v 0 1\n"
        "# the only cell\n"
        "c 0 1 2\n"
        "b 0 1 D\n"
        "b 1 2 D\n"
        "b 2 0 D\n";
    Mesh<2> m = import_mesh<2>(text);
    REQUIRE(m.cells.size() == 1);
    REQUIRE(m.cells[0].volume == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("import: parse errors carry line numbers", "[mesh_io]") {
    auto expect_parse_error = [](const std::string& text, int line) {
        try {
            (void)import_mesh<2>(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            REQUIRE(e.line == line);
        }
    };
    // Bad magic.
    expect_parse_error("wgmash 2 1 0 0\n", 1);
    // Unsupported dimension.
    expect_parse_error("wgmesh 4 1 0 0\n", 1);
    // Non-numeric coordinate.
    expect_parse_error(
        "wgmesh 2 3 1 3\n"
        "v 0 zero\n"
        "v 1 0\n"
        "v 0 1\n"
        "c 0 1 2\n",
        2);
    // Wrong coordinate count.
    expect_parse_error(
        "wgmesh 2 3 1 3\n"
        "v 0 0 0\n"
        "v 1 0\n"
        "v 0 1\n"
        "c 0 1 2\n",
        2);
    // Unknown directive.
    expect_parse_error(
        "wgmesh 2 3 1 3\n"
        "v 0 0\n"
        "vertex 1 0\n",
        3);
    // Bad boundary marker token.
    expect_parse_error(
        "wgmesh 2 3 1 3\n"
        "v 0 0\n"
        "v 1 0\n"
        "v 0 1\n"
        "c 0 1 2\n"
        "b 0 1 Q\n",
        6);
    // `f` line without a preceding cell (3D), checked against a 3D header.
    try {
        (void)import_mesh<3>(
            "wgmesh 3 4 1 4\n"
            "v 0 0 0\n"
            "v 1 0 0\n"
            "v 0 1 0\n"
            "v 0 0 1\n"
            "f 1 2 3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 6);
    }
    // `f` line in a 2D file.
    expect_parse_error(
        "wgmesh 2 3 1 3\n"
        "v 0 0\n"
        "v 1 0\n"
        "v 0 1\n"
        "c 0 1 2\n"
        "f 0 1\n",
        6);
    // Header/content count mismatch.
    expect_parse_error(
        "wgmesh 2 4 1 3\n"
        "v 0 0\n"
        "v 1 0\n"
        "v 0 1\n"
        "c 0 1 2\n"
        "b 0 1 D\nb 1 2 D\nb 2 0 D\n",
        1);
    // Requesting the wrong compile-time dimension is a parse error too.
    expect_parse_error("wgmesh 3 0 0 0\n", 1);
}

TEST_CASE("import: topology errors", "[mesh_io]") {
    // Dangling vertex id.
    REQUIRE_THROWS_AS(import_mesh<2>("wgmesh 2 3 1 3\n"
                                     "v 0 0\nv 1 0\nv 0 1\n"
                                     "c 0 1 7\n"
                                     "b 0 1 D\nb 1 7 D\nb 7 0 D\n"),
                      TopologyError);
    // Boundary face without a marker.
    REQUIRE_THROWS_AS(import_mesh<2>("wgmesh 2 3 1 2\n"
                                     "v 0 0\nv 1 0\nv 0 1\n"
                                     "c 0 1 2\n"
                                     "b 0 1 D\nb 1 2 D\n"),
                      TopologyError);
    // Marker on an interior face.
    REQUIRE_THROWS_AS(import_mesh<2>("wgmesh 2 4 2 5\n"
                                     "v 0 0\nv 1 0\nv 1 1\nv 0 1\n"
                                     "c 0 1 2\nc 0 2 3\n"
                                     "b 0 1 D\nb 1 2 D\nb 2 3 D\nb 3 0 D\nb 0 2 D\n"),
                      TopologyError);
}

TEST_CASE("import: hanging node split on read", "[mesh_io]") {
    // One big square below two small squares; the big cell's loop does not
    // mention the mid node (4) — the importer must split its top side.
    std::string text =
        "wgmesh 2 8 3 8\n"
        "v 0 0\n"
        "v 1 0\n"
        "v 1 1\n"
        "v 0 1\n"
        "v 0.5 1\n"
        "v 0 2\n"
        "v 0.5 2\n"
        "v 1 2\n"
        "c 0 1 2 3\n"
        "c 3 4 6 5\n"
        "c 4 2 7 6\n"
        "b 0 1 D\n"
        "b 1 2 D\n"
        "b 2 7 D\n"
        "b 7 6 D\n"
        "b 6 5 D\n"
        "b 5 3 D\n"
        "b 3 0 D\n"
        "b 0 3 D\n";  // duplicate key of "3 0" is fine: same sorted pair
    Mesh<2> m = import_mesh<2>(text);
    REQUIRE(m.cells[0].vertex_ids.size() == 5);  // hanging node 4 inserted
    REQUIRE(m.find_face(3, 4) >= 0);
    REQUIRE(m.find_face(4, 2) >= 0);
    REQUIRE(m.find_face(3, 2) == -1);  // unsplit side must not exist
    int f34 = m.find_face(3, 4);
    REQUIRE(m.faces[f34].cells[1] != -1);  // shared: big cell + small cell
    validate_submesh(m);
}

TEST_CASE("round-trip: triangle mesh topology is reproduced bitwise", "[mesh_io]") {
    Mesh<2> m = generate_triangle_mesh(4);
    std::string text = export_mesh(m);
    Mesh<2> r = import_mesh<2>(text);
    REQUIRE(r.vertices.size() == m.vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        REQUIRE(r.vertices[i].x() == m.vertices[i].x());
        REQUIRE(r.vertices[i].y() == m.vertices[i].y());
    }
    REQUIRE(r.cells.size() == m.cells.size());
    for (std::size_t i = 0; i < m.cells.size(); ++i)
        REQUIRE(r.cells[i].vertex_ids == m.cells[i].vertex_ids);
    REQUIRE(r.faces.size() == m.faces.size());
    for (std::size_t i = 0; i < m.faces.size(); ++i) {
        REQUIRE(r.faces[i].marker == m.faces[i].marker);
        REQUIRE(r.faces[i].cells == m.faces[i].cells);
    }
    // A second export is byte-identical (determinism).
    REQUIRE(export_mesh(r) == text);
}

TEST_CASE("round-trip: full-precision coordinates survive", "[mesh_io]") {
    Mesh<2> m;
    m.vertices = {Vec<2>{0.0, 0.0}, Vec<2>{1.0 / 3.0, 1e-17}, Vec<2>{0.1, 0.7}};
    m.cells.emplace_back();
    m.cells.back().vertex_ids = {0, 1, 2};
    m.default_boundary_dirichlet = true;
    finalize(m);
    Mesh<2> r = import_mesh<2>(export_mesh(m));
    for (int i = 0; i < 3; ++i) {
        REQUIRE(r.vertices[i].x() == m.vertices[i].x());
        REQUIRE(r.vertices[i].y() == m.vertices[i].y());
    }
}

TEST_CASE("round-trip: ladder mesh with hanging nodes", "[mesh_io]") {
    Mesh<2> m = generate_ladder_mesh(4);
    Mesh<2> r = import_mesh<2>(export_mesh(m));
    REQUIRE(r.cells.size() == m.cells.size());
    for (std::size_t i = 0; i < m.cells.size(); ++i)
        REQUIRE(r.cells[i].vertex_ids == m.cells[i].vertex_ids);
    REQUIRE(r.faces.size() == m.faces.size());
    validate_submesh(r);
}

TEST_CASE("round-trip: 3D cube mesh", "[mesh_io]") {
    Mesh<3> m = generate_cube_tet_mesh(1);
    std::string text = export_mesh(m);
    REQUIRE(wgmesh_dimension(text) == 3);
    Mesh<3> r = import_mesh<3>(text);
    REQUIRE(r.cells.size() == 6);
    REQUIRE(r.vertices.size() == 8);
    REQUIRE(r.faces.size() == m.faces.size());
    for (std::size_t i = 0; i < m.cells.size(); ++i)
        REQUIRE(r.cells[i].vertex_ids == m.cells[i].vertex_ids);
    for (std::size_t i = 0; i < m.faces.size(); ++i) {
        REQUIRE(r.faces[i].marker == m.faces[i].marker);
        std::vector<int> a = r.faces[i].loop, b = m.faces[i].loop;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        REQUIRE(a == b);
    }
    double vol = 0.0;
    for (const auto& c : r.cells) vol += c.volume;
    REQUIRE(vol == Catch::Approx(1.0).epsilon(1e-12));
}
