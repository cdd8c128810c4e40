// SPDX-License-Identifier: MIT
//
// Text import/export for polytopal meshes.
//
// Format (whitespace separated, `#` starts a comment anywhere on a line):
//   wgmesh <d> <#vertices> <#cells> <#boundary-marker-lines>
//   v <x> <y> [<z>]                 one line per vertex, ids in file order
//   c <v0> <v1> ... <vm>            2D: ccw boundary loop; 3D: vertex set,
//                                   followed by one `f` line per cell face
//   f <v0> <v1> ... <vm>            3D only: face loop of the preceding cell
//   b <face vertex ids...> <D|N>    boundary marker (Dirichlet / Neumann)
//
// Import validates the header counts, runs the full geometry pass
// (finalize), and hence reports dangling ids, unmarked boundary faces and
// markers that match no proper face as TopologyError. Export writes
// coordinates with 17 significant digits so a round trip is bitwise exact.

#ifndef WGELAST_MESH_IO_HPP
#define WGELAST_MESH_IO_HPP

#include "wgelast/mesh.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

namespace wg {

namespace detail {

struct MeshLine {
    int number = 0;
    std::vector<std::string> tokens;
};

inline std::vector<MeshLine> tokenize_wgmesh(const std::string& text) {
    std::vector<MeshLine> lines;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
        std::istringstream ls(raw);
        MeshLine line{number, {}};
        std::string tok;
        while (ls >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

inline long parse_long(const std::string& tok, int line) {
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError(line, "expected an integer, got '" + tok + "'");
    return v;
}

inline double parse_double(const std::string& tok, int line) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError(line, "expected a number, got '" + tok + "'");
    return v;
}

struct WgmeshHeader {
    int dim = 0;
    long n_vertices = 0, n_cells = 0, n_markers = 0;
    int line = 1;
};

inline WgmeshHeader parse_wgmesh_header(const std::vector<MeshLine>& lines) {
    if (lines.empty()) throw ParseError(1, "empty mesh file");
    const MeshLine& h = lines.front();
    if (h.tokens[0] != "wgmesh")
        throw ParseError(h.number, "expected 'wgmesh' header, got '" + h.tokens[0] + "'");
    if (h.tokens.size() != 5)
        throw ParseError(h.number, "header needs: wgmesh <d> <#v> <#c> <#b>");
    WgmeshHeader out;
    out.line = h.number;
    out.dim = static_cast<int>(parse_long(h.tokens[1], h.number));
    if (out.dim != 2 && out.dim != 3)
        throw ParseError(h.number, "dimension must be 2 or 3");
    out.n_vertices = parse_long(h.tokens[2], h.number);
    out.n_cells = parse_long(h.tokens[3], h.number);
    out.n_markers = parse_long(h.tokens[4], h.number);
    if (out.n_vertices < 0 || out.n_cells < 0 || out.n_markers < 0)
        throw ParseError(h.number, "negative count in header");
    return out;
}

}  // namespace detail

/// Dimension declared in the file header (2 or 3); ParseError otherwise.
inline int wgmesh_dimension(const std::string& text) {
    return detail::parse_wgmesh_header(detail::tokenize_wgmesh(text)).dim;
}

template <int D>
Mesh<D> import_mesh(const std::string& text) {
    static_assert(D == 2 || D == 3);
    auto lines = detail::tokenize_wgmesh(text);
    auto header = detail::parse_wgmesh_header(lines);
    if (header.dim != D)
        throw ParseError(header.line, "file is " + std::to_string(header.dim) +
                                          "D, expected " + std::to_string(D) + "D");

    Mesh<D> m;
    long n_markers = 0;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& [number, tokens] = lines[li];
        const std::string& tag = tokens[0];
        if (tag == "v") {
            if (tokens.size() != 1 + D)
                throw ParseError(number, "vertex line needs exactly " + std::to_string(D) +
                                             " coordinates");
            Vec<D> p;
            for (int i = 0; i < D; ++i) p[i] = detail::parse_double(tokens[1 + i], number);
            m.vertices.push_back(p);
        } else if (tag == "c") {
            if (tokens.size() < 1 + D + 1)
                throw ParseError(number, "cell line needs at least " + std::to_string(D + 1) +
                                             " vertex ids");
            m.cells.emplace_back();
            for (std::size_t i = 1; i < tokens.size(); ++i)
                m.cells.back().vertex_ids.push_back(
                    static_cast<int>(detail::parse_long(tokens[i], number)));
        } else if (tag == "f") {
            if constexpr (D == 2) throw ParseError(number, "'f' lines are 3D-only");
            if (m.cells.empty())
                throw ParseError(number, "'f' line before the first cell line");
            if (tokens.size() < 4) throw ParseError(number, "face loop needs >= 3 vertex ids");
            std::vector<int> loop;
            for (std::size_t i = 1; i < tokens.size(); ++i)
                loop.push_back(static_cast<int>(detail::parse_long(tokens[i], number)));
            m.cells.back().face_loops.push_back(std::move(loop));
        } else if (tag == "b") {
            if (tokens.size() < 1 + D + 1)
                throw ParseError(number,
                                 "marker line needs " + std::to_string(D) +
                                     " vertex ids and a D/N tag");
            const std::string& kind = tokens.back();
            if (kind != "D" && kind != "N")
                throw ParseError(number, "boundary kind must be D or N, got '" + kind + "'");
            std::vector<int> key;
            for (std::size_t i = 1; i + 1 < tokens.size(); ++i)
                key.push_back(static_cast<int>(detail::parse_long(tokens[i], number)));
            std::sort(key.begin(), key.end());
            int marker = kind == "D" ? BoundaryKind::dirichlet : BoundaryKind::neumann;
            auto it = m.boundary_markers.find(key);
            if (it != m.boundary_markers.end() && it->second != marker)
                throw ParseError(number, "conflicting markers for the same face");
            m.boundary_markers[key] = marker;
            ++n_markers;
        } else {
            throw ParseError(number, "unknown directive '" + tag + "'");
        }
    }

    if (static_cast<long>(m.vertices.size()) != header.n_vertices)
        throw ParseError(header.line,
                         "header declares " + std::to_string(header.n_vertices) +
                             " vertices, file has " + std::to_string(m.vertices.size()));
    if (static_cast<long>(m.cells.size()) != header.n_cells)
        throw ParseError(header.line, "header declares " + std::to_string(header.n_cells) +
                                          " cells, file has " + std::to_string(m.cells.size()));
    if (n_markers != header.n_markers)
        throw ParseError(header.line,
                         "header declares " + std::to_string(header.n_markers) +
                             " marker lines, file has " + std::to_string(n_markers));

    finalize(m);
    return m;
}

template <int D>
std::string export_mesh(const Mesh<D>& m) {
    static_assert(D == 2 || D == 3);
    long n_marked = 0;
    for (const auto& f : m.faces)
        if (f.marker != BoundaryKind::interior) ++n_marked;

    std::string out;
    auto append = [&out](const char* fmt, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        out += buf;
    };
    append("wgmesh %d %zu %zu %ld\n", D, m.vertices.size(), m.cells.size(), n_marked);
    for (const auto& p : m.vertices) {
        out += 'v';
        for (int i = 0; i < D; ++i) append(" %.17g", p[i]);
        out += '\n';
    }
    for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
        const auto& c = m.cells[ci];
        out += 'c';
        for (int v : c.vertex_ids) append(" %d", v);
        out += '\n';
        if constexpr (D == 3) {
            for (int fi : c.faces) {
                const auto& f = m.faces[fi];
                std::vector<int> loop = f.loop;
                if (f.cells[0] != static_cast<int>(ci))
                    std::reverse(loop.begin(), loop.end());
                out += 'f';
                for (int v : loop) append(" %d", v);
                out += '\n';
            }
        }
    }
    for (const auto& f : m.faces) {
        if (f.marker == BoundaryKind::interior) continue;
        out += 'b';
        for (int v : f.loop) append(" %d", v);
        append(" %s\n", f.marker == BoundaryKind::dirichlet ? "D" : "N");
    }
    return out;
}

}  // namespace wg

#endif  // WGELAST_MESH_IO_HPP
