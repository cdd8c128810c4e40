// SPDX-License-Identifier: MIT
//
// Polytopal meshes with proper faces and a simplicial submesh.
//
// A mesh is a set of polytopal cells whose boundaries are split into
// *proper* faces: no mesh node lies in the relative interior of a face, so
// hanging nodes become ordinary face endpoints. Every cell carries a star
// center M_T (centroid for convex cells, Chebyshev center of the star kernel
// otherwise) and the induced simplicial fan w(T) used for quadrature. The
// union of cell fans is a conforming simplicial complex; its inter-cell
// faces (2D: the proper edges; 3D: each face fanned from its lowest-id
// vertex) make up the skeleton that carries the trace unknowns.
//
// Scope: 2D cells are arbitrary star-shaped polygons, hanging nodes
// included; 3D cells are convex polyhedra with planar faces and no hanging
// nodes (the generators produce tetrahedra).

#ifndef WGELAST_MESH_HPP
#define WGELAST_MESH_HPP

#include "wgelast/common.hpp"
#include "wgelast/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wg {

enum BoundaryKind : int { interior = 0, dirichlet = 1, neumann = 2 };

template <int D>
struct Mesh {
    static constexpr int dim = D;

    struct Face {
        std::vector<int> loop;  ///< 2D: {a,b} in cells[0]'s ccw order; 3D: outward polygon
        std::array<int, 2> cells{-1, -1};
        int marker = BoundaryKind::interior;
        double measure = 0.0;   ///< length / area
        double h = 0.0;         ///< diameter
        Vec<D> normal = Vec<D>::Zero();    ///< unit, outward from cells[0]
        Vec<D> centroid = Vec<D>::Zero();
        std::vector<std::array<int, 3>> tris;  ///< 3D skeleton triangulation of the face

        int other_cell(int c) const { return cells[0] == c ? cells[1] : cells[0]; }
    };

    struct Cell {
        std::vector<int> vertex_ids;  ///< 2D: ccw boundary loop (hanging nodes included)
        std::vector<std::vector<int>> face_loops;  ///< 3D input only
        std::vector<int> faces;       ///< proper faces, 2D: in loop order
        double volume = 0.0;
        double h = 0.0;               ///< max pairwise vertex distance
        double theta_star = 0.0;      ///< star-ball radius around M_T / h
        double l_star = 0.0;          ///< min pairwise vertex distance / h
        Vec<D> centroid = Vec<D>::Zero();
        Vec<D> star_center = Vec<D>::Zero();  ///< M_T
        std::vector<std::array<Vec<D>, D + 1>> sub;  ///< simplicial fan w(T)
    };

    std::vector<Vec<D>> vertices;
    std::vector<Cell> cells;
    std::vector<Face> faces;

    /// Markers supplied before finalize(), keyed by sorted face vertex ids.
    std::map<std::vector<int>, int> boundary_markers;
    /// Generators mark every boundary face Dirichlet unless told otherwise.
    bool default_boundary_dirichlet = false;

    int find_face(int a, int b) const {
        static_assert(D == 2);
        std::vector<int> key{std::min(a, b), std::max(a, b)};
        auto it = face_index_.find(key);
        return it == face_index_.end() ? -1 : it->second;
    }
    int find_face(std::vector<int> key) const {
        std::sort(key.begin(), key.end());
        auto it = face_index_.find(key);
        return it == face_index_.end() ? -1 : it->second;
    }

    std::map<std::vector<int>, int> face_index_;  // sorted vertex ids -> face id
};

struct RegularityReport {
    double theta_min = 0.0;
    double l_min = 0.0;
};

namespace detail {

inline double cross2(const Vec<2>& a, const Vec<2>& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Chebyshev center of { x : n_i . (x - q_i) >= r } over the given
/// (inward normal, point) half-space list, by enumerating active sets of
/// D+1 constraints. Returns the max radius (<= 0 means empty kernel).
template <int D>
double chebyshev_center(const std::vector<std::pair<Vec<D>, Vec<D>>>& half, Vec<D>& center) {
    const int m = static_cast<int>(half.size());
    double best_r = -std::numeric_limits<double>::infinity();
    Vec<D> best_x = Vec<D>::Zero();
    std::array<int, D + 1> idx{};
    auto try_active = [&](const std::array<int, D + 1>& act) {
        Eigen::Matrix<double, D + 1, D + 1> A;
        Eigen::Matrix<double, D + 1, 1> b;
        for (int r = 0; r <= D; ++r) {
            const auto& [n, q] = half[act[r]];
            A.template block<1, D>(r, 0) = n.transpose();
            A(r, D) = -1.0;
            b[r] = n.dot(q);
        }
        Eigen::FullPivLU<Eigen::Matrix<double, D + 1, D + 1>> lu(A);
        if (!lu.isInvertible()) return;
        Eigen::Matrix<double, D + 1, 1> sol = lu.solve(b);
        Vec<D> x = sol.template head<D>();
        double r = sol[D];
        if (r <= best_r) return;
        for (const auto& [n, q] : half)
            if (n.dot(x - q) < r - 1e-12 * (1.0 + std::abs(r))) return;
        best_r = r;
        best_x = x;
    };
    // Enumerate all (D+1)-subsets.
    std::vector<int> comb(D + 1);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == D + 1) {
            for (int i = 0; i <= D; ++i) idx[i] = comb[i];
            try_active(idx);
            return;
        }
        for (int i = start; i < m; ++i) {
            comb[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    if (m >= D + 1) rec(0, 0);
    center = best_x;
    return best_r;
}

/// Uniform grid over vertices for point-on-segment queries.
template <int D>
struct PointGrid {
    double cell = 1.0;
    Vec<D> origin = Vec<D>::Zero();
    std::unordered_map<std::uint64_t, std::vector<int>> buckets;

    static std::uint64_t key(const std::array<std::int64_t, D>& c) {
        std::uint64_t h = 1469598103934665603ull;
        for (int i = 0; i < D; ++i) {
            h ^= static_cast<std::uint64_t>(c[i] + (1ll << 30));
            h *= 1099511628211ull;
        }
        return h;
    }
    std::array<std::int64_t, D> coord(const Vec<D>& p) const {
        std::array<std::int64_t, D> c;
        for (int i = 0; i < D; ++i)
            c[i] = static_cast<std::int64_t>(std::floor((p[i] - origin[i]) / cell));
        return c;
    }
    void build(const std::vector<Vec<D>>& pts, double cell_size) {
        cell = cell_size;
        if (!pts.empty()) origin = pts[0];
        for (std::size_t i = 0; i < pts.size(); ++i)
            buckets[key(coord(pts[i]))].push_back(static_cast<int>(i));
    }
    /// Vertex ids whose grid cell intersects the axis box [lo, hi].
    void query_box(const Vec<D>& lo, const Vec<D>& hi, std::vector<int>& out) const {
        out.clear();
        auto clo = coord(lo), chi = coord(hi);
        std::array<std::int64_t, D> c;
        std::function<void(int)> rec = [&](int dim) {
            if (dim == D) {
                auto it = buckets.find(key(c));
                if (it != buckets.end())
                    out.insert(out.end(), it->second.begin(), it->second.end());
                return;
            }
            for (std::int64_t v = clo[dim]; v <= chi[dim]; ++v) {
                c[dim] = v;
                rec(dim + 1);
            }
        };
        rec(0);
    }
};

template <int D>
double polygon_or_cell_diameter(const std::vector<Vec<D>>& vs) {
    double h = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) h = std::max(h, (vs[i] - vs[j]).norm());
    return h;
}

// ---------------------------------------------------------------------------
// 2D finalization
// ---------------------------------------------------------------------------

inline void finalize_2d(Mesh<2>& m) {
    // Orient every loop counterclockwise.
    for (auto& c : m.cells) {
        if (c.vertex_ids.size() < 3) throw TopologyError("cell with fewer than 3 vertices");
        for (int v : c.vertex_ids)
            if (v < 0 || v >= static_cast<int>(m.vertices.size()))
                throw TopologyError("cell references vertex " + std::to_string(v) +
                                    " out of range");
        double area2 = 0.0;
        for (std::size_t i = 0; i < c.vertex_ids.size(); ++i) {
            const Vec<2>& a = m.vertices[c.vertex_ids[i]];
            const Vec<2>& b = m.vertices[c.vertex_ids[(i + 1) % c.vertex_ids.size()]];
            area2 += cross2(a, b);
        }
        if (std::abs(area2) < 1e-300) throw TopologyError("degenerate cell");
        if (area2 < 0.0) std::reverse(c.vertex_ids.begin(), c.vertex_ids.end());
    }

    // Split cell sides at mesh nodes lying in their relative interior, so
    // that every consecutive loop pair is a proper edge (hanging nodes from
    // neighboring cells become loop vertices of this cell too).
    double max_side = 0.0;
    for (const auto& c : m.cells)
        for (std::size_t i = 0; i < c.vertex_ids.size(); ++i) {
            const Vec<2>& a = m.vertices[c.vertex_ids[i]];
            const Vec<2>& b = m.vertices[c.vertex_ids[(i + 1) % c.vertex_ids.size()]];
            max_side = std::max(max_side, (b - a).norm());
        }
    PointGrid<2> grid;
    grid.build(m.vertices, std::max(max_side, 1e-300));
    std::vector<int> cand;
    for (auto& c : m.cells) {
        std::vector<int> refined;
        const std::size_t nv = c.vertex_ids.size();
        for (std::size_t i = 0; i < nv; ++i) {
            int ia = c.vertex_ids[i], ib = c.vertex_ids[(i + 1) % nv];
            const Vec<2>&a = m.vertices[ia], &b = m.vertices[ib];
            refined.push_back(ia);
            Vec<2> lo = a.cwiseMin(b).array() - 1e-9 * max_side;
            Vec<2> hi = a.cwiseMax(b).array() + 1e-9 * max_side;
            grid.query_box(lo, hi, cand);
            const double len = (b - a).norm();
            std::vector<std::pair<double, int>> on_side;
            for (int v : cand) {
                if (v == ia || v == ib) continue;
                Vec<2> d = b - a, p = m.vertices[v] - a;
                double t = d.dot(p) / (len * len);
                if (t <= 1e-10 || t >= 1.0 - 1e-10) continue;
                double dist = std::abs(cross2(d, p)) / len;
                if (dist < 1e-10 * len) on_side.emplace_back(t, v);
            }
            std::sort(on_side.begin(), on_side.end());
            for (auto& [t, v] : on_side) refined.push_back(v);
        }
        c.vertex_ids = std::move(refined);
    }

    // Proper edges from consecutive loop pairs.
    m.faces.clear();
    m.face_index_.clear();
    for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
        auto& c = m.cells[ci];
        c.faces.clear();
        const std::size_t nv = c.vertex_ids.size();
        for (std::size_t i = 0; i < nv; ++i) {
            int ia = c.vertex_ids[i], ib = c.vertex_ids[(i + 1) % nv];
            std::vector<int> key{std::min(ia, ib), std::max(ia, ib)};
            auto it = m.face_index_.find(key);
            int fid;
            if (it == m.face_index_.end()) {
                fid = static_cast<int>(m.faces.size());
                m.face_index_.emplace(key, fid);
                typename Mesh<2>::Face f;
                f.loop = {ia, ib};
                f.cells = {static_cast<int>(ci), -1};
                const Vec<2>&a = m.vertices[ia], &b = m.vertices[ib];
                Vec<2> d = b - a;
                f.measure = f.h = d.norm();
                f.normal = Vec<2>{d.y(), -d.x()} / f.measure;
                f.centroid = 0.5 * (a + b);
                m.faces.push_back(std::move(f));
            } else {
                fid = it->second;
                if (m.faces[fid].cells[1] != -1)
                    throw TopologyError("edge shared by more than two cells");
                m.faces[fid].cells[1] = static_cast<int>(ci);
            }
            c.faces.push_back(fid);
        }
    }
}

// ---------------------------------------------------------------------------
// 3D finalization
// ---------------------------------------------------------------------------

inline void finalize_3d(Mesh<3>& m) {
    m.faces.clear();
    m.face_index_.clear();
    for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
        auto& c = m.cells[ci];
        if (c.face_loops.empty()) throw TopologyError("3D cell without face loops");
        for (int v : c.vertex_ids)
            if (v < 0 || v >= static_cast<int>(m.vertices.size()))
                throw TopologyError("cell references vertex " + std::to_string(v) +
                                    " out of range");
        Vec<3> approx = Vec<3>::Zero();
        for (int v : c.vertex_ids) approx += m.vertices[v];
        approx /= static_cast<double>(c.vertex_ids.size());

        c.faces.clear();
        for (const auto& loop : c.face_loops) {
            if (loop.size() < 3) throw TopologyError("face with fewer than 3 vertices");
            std::vector<int> key = loop;
            std::sort(key.begin(), key.end());
            auto it = m.face_index_.find(key);
            int fid;
            if (it == m.face_index_.end()) {
                fid = static_cast<int>(m.faces.size());
                m.face_index_.emplace(key, fid);
                typename Mesh<3>::Face f;
                f.loop = loop;
                f.cells = {static_cast<int>(ci), -1};
                // Newell normal; orient the loop outward from cells[0].
                Vec<3> n = Vec<3>::Zero(), ctr = Vec<3>::Zero();
                for (std::size_t i = 0; i < loop.size(); ++i) {
                    const Vec<3>&a = m.vertices[loop[i]],
                                &b = m.vertices[loop[(i + 1) % loop.size()]];
                    n += a.cross(b);
                    ctr += a;
                }
                ctr /= static_cast<double>(loop.size());
                double nn = n.norm();
                if (nn < 1e-300) throw TopologyError("degenerate face");
                n /= nn;
                if (n.dot(ctr - approx) < 0.0) {
                    std::reverse(f.loop.begin(), f.loop.end());
                    n = -n;
                }
                f.normal = n;
                // Planarity.
                for (int v : loop)
                    if (std::abs(n.dot(m.vertices[v] - ctr)) >
                        1e-9 * polygon_or_cell_diameter<3>({m.vertices[loop[0]],
                                                            m.vertices[loop[1]],
                                                            m.vertices[loop[2]]}) +
                            1e-14)
                        throw TopologyError("non-planar face");
                m.faces.push_back(std::move(f));
            } else {
                fid = it->second;
                if (m.faces[fid].cells[1] != -1)
                    throw TopologyError("face shared by more than two cells");
                m.faces[fid].cells[1] = static_cast<int>(ci);
            }
            c.faces.push_back(fid);
        }
        c.face_loops.clear();
    }

    // Face geometry and skeleton triangulation: fan from the lowest vertex
    // id so both adjacent cells produce the same triangles.
    for (auto& f : m.faces) {
        const int nl = static_cast<int>(f.loop.size());
        int start = 0;
        for (int i = 1; i < nl; ++i)
            if (f.loop[i] < f.loop[start]) start = i;
        std::vector<int> rot(nl);
        for (int i = 0; i < nl; ++i) rot[i] = f.loop[(start + i) % nl];
        f.tris.clear();
        double area = 0.0;
        Vec<3> ctr = Vec<3>::Zero();
        for (int i = 1; i + 1 < nl; ++i) {
            f.tris.push_back({rot[0], rot[i], rot[i + 1]});
            const Vec<3>&a = m.vertices[rot[0]], &b = m.vertices[rot[i]],
                        &c = m.vertices[rot[i + 1]];
            double ta = 0.5 * (b - a).cross(c - a).norm();
            area += ta;
            ctr += ta * (a + b + c) / 3.0;
        }
        f.measure = area;
        f.centroid = ctr / area;
        std::vector<Vec<3>> pts;
        for (int v : f.loop) pts.push_back(m.vertices[v]);
        f.h = polygon_or_cell_diameter<3>(pts);
    }

    // Proper-face property: no mesh node in the relative interior of a face
    // or of one of its edges (3D hanging nodes are unsupported).
    double max_h = 0.0;
    for (const auto& f : m.faces) max_h = std::max(max_h, f.h);
    PointGrid<3> grid;
    grid.build(m.vertices, std::max(max_h, 1e-300));
    std::vector<int> cand;
    for (const auto& f : m.faces) {
        Vec<3> lo = m.vertices[f.loop[0]], hi = lo;
        for (int v : f.loop) {
            lo = lo.cwiseMin(m.vertices[v]);
            hi = hi.cwiseMax(m.vertices[v]);
        }
        grid.query_box(Vec<3>(lo.array() - 1e-9 * max_h), Vec<3>(hi.array() + 1e-9 * max_h),
                       cand);
        for (int v : cand) {
            if (std::find(f.loop.begin(), f.loop.end(), v) != f.loop.end()) continue;
            const Vec<3>& p = m.vertices[v];
            if (std::abs(f.normal.dot(p - f.centroid)) > 1e-10 * f.h) continue;
            // Inside one of the skeleton triangles (closed)?
            for (const auto& t : f.tris) {
                const Vec<3>&a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
                Vec<3> n = (b - a).cross(c - a);
                double n2 = n.squaredNorm();
                double u = (b - p).cross(c - p).dot(n) / n2;
                double w = (c - p).cross(a - p).dot(n) / n2;
                double x = 1.0 - u - w;
                if (u > -1e-10 && w > -1e-10 && x > -1e-10)
                    throw TopologyError("mesh node " + std::to_string(v) +
                                        " lies inside a proper face");
            }
        }
    }
}

}  // namespace detail

/// Geometry pass shared by generators and the importer: builds proper faces,
/// boundary markers, the star centers, the simplicial fans w(T) and the
/// per-cell regularity numbers. Throws TopologyError / NonStarShapedError.
template <int D>
void finalize(Mesh<D>& m) {
    if constexpr (D == 2)
        detail::finalize_2d(m);
    else
        detail::finalize_3d(m);

    // Boundary markers.
    std::size_t matched = 0;
    for (auto& f : m.faces) {
        std::vector<int> key = f.loop;
        std::sort(key.begin(), key.end());
        auto it = m.boundary_markers.find(key);
        if (f.cells[1] == -1) {
            if (it != m.boundary_markers.end()) {
                f.marker = it->second;
                ++matched;
            } else if (m.default_boundary_dirichlet) {
                f.marker = BoundaryKind::dirichlet;
            } else {
                throw TopologyError("unmarked boundary face");
            }
        } else if (it != m.boundary_markers.end()) {
            throw TopologyError("boundary marker on interior face");
        }
    }
    if (matched != m.boundary_markers.size())
        throw TopologyError("boundary marker matches no proper face");

    // Cell geometry, star centers, fans, regularity.
    for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
        auto& c = m.cells[ci];
        std::vector<Vec<D>> vs;
        for (int v : c.vertex_ids) vs.push_back(m.vertices[v]);
        c.h = detail::polygon_or_cell_diameter<D>(vs);

        double lmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = i + 1; j < vs.size(); ++j)
                lmin = std::min(lmin, (vs[i] - vs[j]).norm());
        c.l_star = lmin / c.h;

        if constexpr (D == 2) {
            const std::size_t nv = c.vertex_ids.size();
            double area2 = 0.0;
            Vec<2> ctr = Vec<2>::Zero();
            bool convex = true;
            for (std::size_t i = 0; i < nv; ++i) {
                const Vec<2>&a = m.vertices[c.vertex_ids[i]],
                            &b = m.vertices[c.vertex_ids[(i + 1) % nv]],
                            &d = m.vertices[c.vertex_ids[(i + 2) % nv]];
                double cr = detail::cross2(a, b);
                area2 += cr;
                ctr += cr * (a + b);
                if (detail::cross2(b - a, d - b) < -1e-12 * c.h * c.h) convex = false;
            }
            c.volume = 0.5 * area2;
            c.centroid = ctr / (3.0 * area2);

            std::vector<std::pair<Vec<2>, Vec<2>>> half;
            for (std::size_t i = 0; i < nv; ++i) {
                const Vec<2>&a = m.vertices[c.vertex_ids[i]],
                            &b = m.vertices[c.vertex_ids[(i + 1) % nv]];
                Vec<2> t = (b - a).normalized();
                half.emplace_back(Vec<2>{-t.y(), t.x()}, a);  // inward for ccw loops
            }
            if (convex) {
                c.star_center = c.centroid;
            } else {
                double r = detail::chebyshev_center<2>(half, c.star_center);
                if (!(r > 1e-12 * c.h))
                    throw NonStarShapedError("cell " + std::to_string(ci) +
                                             " has an empty star kernel");
            }
            double dist_min = std::numeric_limits<double>::infinity();
            for (const auto& [n, q] : half) dist_min = std::min(dist_min, n.dot(c.star_center - q));
            if (!(dist_min > 1e-12 * c.h))
                throw NonStarShapedError("star center degenerate in cell " + std::to_string(ci));
            c.theta_star = dist_min / c.h;

            c.sub.clear();
            if (nv == 3) {
                c.sub.push_back({vs[0], vs[1], vs[2]});
            } else {
                for (std::size_t i = 0; i < nv; ++i)
                    c.sub.push_back({c.star_center, m.vertices[c.vertex_ids[i]],
                                     m.vertices[c.vertex_ids[(i + 1) % nv]]});
            }
        } else {
            // Volume and centroid from cones over the oriented faces.
            Vec<3> p0 = Vec<3>::Zero();
            for (int v : c.vertex_ids) p0 += m.vertices[v];
            p0 /= static_cast<double>(c.vertex_ids.size());
            double vol = 0.0;
            Vec<3> ctr = Vec<3>::Zero();
            for (int fi : c.faces) {
                const auto& f = m.faces[fi];
                double sign = (f.cells[0] == static_cast<int>(ci)) ? 1.0 : -1.0;
                for (const auto& t : f.tris) {
                    const Vec<3>&a = m.vertices[t[0]], &b = m.vertices[t[1]],
                                &d = m.vertices[t[2]];
                    double v6 = sign * (a - p0).cross(b - p0).dot(d - p0);
                    vol += v6 / 6.0;
                    ctr += (v6 / 6.0) * (p0 + a + b + d) / 4.0;
                }
            }
            if (!(vol > 0.0)) throw TopologyError("nonpositive cell volume");
            c.volume = vol;
            c.centroid = ctr / vol;

            // Convexity (required in 3D): all vertices weakly inside every
            // face plane.
            for (int fi : c.faces) {
                const auto& f = m.faces[fi];
                double sign = (f.cells[0] == static_cast<int>(ci)) ? 1.0 : -1.0;
                for (int v : c.vertex_ids)
                    if (sign * f.normal.dot(m.vertices[v] - f.centroid) > 1e-9 * c.h)
                        throw TopologyError("nonconvex 3D cell " + std::to_string(ci) +
                                            " is unsupported");
            }
            c.star_center = c.centroid;
            double dist_min = std::numeric_limits<double>::infinity();
            for (int fi : c.faces) {
                const auto& f = m.faces[fi];
                double sign = (f.cells[0] == static_cast<int>(ci)) ? 1.0 : -1.0;
                dist_min =
                    std::min(dist_min, -sign * f.normal.dot(c.star_center - f.centroid));
            }
            if (!(dist_min > 1e-12 * c.h))
                throw NonStarShapedError("star center degenerate in cell " + std::to_string(ci));
            c.theta_star = dist_min / c.h;

            c.sub.clear();
            if (c.vertex_ids.size() == 4 && c.faces.size() == 4) {
                std::array<Vec<3>, 4> t;
                for (int i = 0; i < 4; ++i) t[i] = m.vertices[c.vertex_ids[i]];
                if ((t[1] - t[0]).cross(t[2] - t[0]).dot(t[3] - t[0]) < 0.0)
                    std::swap(t[2], t[3]);
                c.sub.push_back(t);
            } else {
                for (int fi : c.faces) {
                    const auto& f = m.faces[fi];
                    double sign = (f.cells[0] == static_cast<int>(ci)) ? 1.0 : -1.0;
                    for (const auto& t : f.tris) {
                        std::array<Vec<3>, 4> s{c.star_center, m.vertices[t[0]],
                                                m.vertices[t[1]], m.vertices[t[2]]};
                        if (sign < 0.0) std::swap(s[2], s[3]);
                        c.sub.push_back(s);
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Generators (unit square / cube, all-Dirichlet boundary)
// ---------------------------------------------------------------------------

/// n x n squares, each split along the lower-left -> upper-right diagonal.
inline Mesh<2> generate_triangle_mesh(int n) {
    if (n < 1) throw Error("triangle mesh needs n >= 1");
    Mesh<2> m;
    m.default_boundary_dirichlet = true;
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices.push_back(Vec<2>{static_cast<double>(i) / n, static_cast<double>(j) / n});
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            m.cells.emplace_back();
            m.cells.back().vertex_ids = {a, b, c};
            m.cells.emplace_back();
            m.cells.back().vertex_ids = {a, c, d};
        }
    finalize(m);
    return m;
}

/// n rows of axis-aligned rectangles with alternating half-width offsets;
/// the row interfaces carry hanging nodes, recorded as cell vertices.
inline Mesh<2> generate_ladder_mesh(int n) {
    if (n < 2) throw Error("ladder mesh needs n >= 2");
    Mesh<2> m;
    m.default_boundary_dirichlet = true;
    // x-breaks per row: even rows at j/n, odd rows offset by 1/(2n).
    auto row_breaks = [n](int row) {
        std::vector<double> xs;
        if (row % 2 == 0) {
            for (int j = 0; j <= n; ++j) xs.push_back(static_cast<double>(j) / n);
        } else {
            xs.push_back(0.0);
            for (int j = 0; j < n; ++j) xs.push_back((2.0 * j + 1.0) / (2.0 * n));
            xs.push_back(1.0);
        }
        return xs;
    };
    // Node ids on the horizontal line y = i/n: union of the breaks of the
    // rows below and above. Key by integral multiples of 1/(2n).
    std::map<std::pair<int, int>, int> node;  // (2n*x, n*y) -> id
    auto get_node = [&](double x, int iy) {
        int ix = static_cast<int>(std::llround(x * 2 * n));
        auto it = node.find({ix, iy});
        if (it != node.end()) return it->second;
        int id = static_cast<int>(m.vertices.size());
        m.vertices.push_back(Vec<2>{x, static_cast<double>(iy) / n});
        node.emplace(std::make_pair(ix, iy), id);
        return id;
    };
    auto line_breaks = [&](int iy) {
        std::vector<double> xs;
        if (iy > 0)
            for (double x : row_breaks(iy - 1)) xs.push_back(x);
        if (iy < n)
            for (double x : row_breaks(iy)) xs.push_back(x);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end(),
                             [n](double a, double b) {
                                 return std::llround(a * 2 * n) == std::llround(b * 2 * n);
                             }),
                 xs.end());
        return xs;
    };
    for (int row = 0; row < n; ++row) {
        std::vector<double> xs = row_breaks(row);
        std::vector<double> below = line_breaks(row);
        std::vector<double> above = line_breaks(row + 1);
        for (std::size_t jc = 0; jc + 1 < xs.size(); ++jc) {
            double xl = xs[jc], xr = xs[jc + 1];
            auto in_span = [&](double x) {
                return x > xl - 1e-12 && x < xr + 1e-12;
            };
            std::vector<int> loop;
            for (double x : below)
                if (in_span(x)) loop.push_back(get_node(x, row));
            for (auto it = above.rbegin(); it != above.rend(); ++it)
                if (in_span(*it)) loop.push_back(get_node(*it, row + 1));
            m.cells.emplace_back();
            m.cells.back().vertex_ids = std::move(loop);
        }
    }
    finalize(m);
    return m;
}

/// Unit cube split into n^3 subcubes, each cut into two triangular prisms by
/// the vertical plane x + y = 1 (local coordinates) and each prism into three
/// tetrahedra. Horizontal subcube faces carry the anti-diagonal, vertical
/// ones the diagonal through the lexicographically smallest corner, and the
/// interior wall the diagonal from (0,1,0) to (1,0,1).
inline Mesh<3> generate_cube_tet_mesh(int n) {
    if (n < 1) throw Error("cube mesh needs n >= 1");
    Mesh<3> m;
    m.default_boundary_dirichlet = true;
    auto vid = [n](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                m.vertices.push_back(Vec<3>{static_cast<double>(i) / n,
                                            static_cast<double>(j) / n,
                                            static_cast<double>(k) / n});
    static constexpr int tets[6][4][3] = {
        {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 0, 1}},
        {{0, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}},
        {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 0, 1}},
        {{0, 1, 0}, {1, 1, 0}, {1, 0, 0}, {1, 1, 1}},
        {{0, 1, 0}, {1, 0, 0}, {1, 1, 1}, {1, 0, 1}},
        {{0, 1, 0}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}},
    };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (const auto& tet : tets) {
                    std::array<int, 4> v;
                    for (int t = 0; t < 4; ++t)
                        v[t] = vid(i + tet[t][0], j + tet[t][1], k + tet[t][2]);
                    m.cells.emplace_back();
                    auto& c = m.cells.back();
                    c.vertex_ids = {v[0], v[1], v[2], v[3]};
                    c.face_loops = {{v[1], v[2], v[3]},
                                    {v[0], v[2], v[3]},
                                    {v[0], v[1], v[3]},
                                    {v[0], v[1], v[2]}};
                }
    finalize(m);
    return m;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

template <int D>
RegularityReport check_regularity(const Mesh<D>& m) {
    RegularityReport rep;
    rep.theta_min = std::numeric_limits<double>::infinity();
    rep.l_min = std::numeric_limits<double>::infinity();
    for (const auto& c : m.cells) {
        rep.theta_min = std::min(rep.theta_min, c.theta_star);
        rep.l_min = std::min(rep.l_min, c.l_star);
    }
    return rep;
}

/// Check that the union of cell fans is a conforming simplicial complex:
/// every sub-simplex face is shared by exactly two sub-simplices, except
/// faces on the domain boundary which appear exactly once.
template <int D>
void validate_submesh(const Mesh<D>& m) {
    using Key = std::vector<double>;
    auto canon = [](std::vector<Vec<D>> pts) {
        std::sort(pts.begin(), pts.end(), [](const Vec<D>& a, const Vec<D>& b) {
            for (int i = 0; i < D; ++i) {
                if (a[i] < b[i]) return true;
                if (a[i] > b[i]) return false;
            }
            return false;
        });
        Key k;
        for (const auto& p : pts)
            for (int i = 0; i < D; ++i) k.push_back(p[i]);
        return k;
    };
    std::map<Key, int> count;
    for (const auto& c : m.cells)
        for (const auto& s : c.sub)
            for (int skip = 0; skip <= D; ++skip) {
                std::vector<Vec<D>> pts;
                for (int i = 0; i <= D; ++i)
                    if (i != skip) pts.push_back(s[i]);
                ++count[canon(pts)];
            }
    std::map<Key, int> on_boundary;
    for (const auto& f : m.faces) {
        if (f.cells[1] != -1) continue;
        if constexpr (D == 2) {
            ++on_boundary[canon({m.vertices[f.loop[0]], m.vertices[f.loop[1]]})];
        } else {
            for (const auto& t : f.tris)
                ++on_boundary[canon(
                    {m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]})];
        }
    }
    for (const auto& [key, n] : count) {
        const bool bdry = on_boundary.count(key) > 0;
        if (bdry && n != 1) throw TopologyError("boundary sub-face shared " + std::to_string(n) + " times");
        if (!bdry && n != 2)
            throw TopologyError("interior sub-face shared " + std::to_string(n) +
                                " times (expected 2)");
    }
}

// ---------------------------------------------------------------------------
// Quadrature over cells and faces
// ---------------------------------------------------------------------------

/// Rule over the cell via its simplicial fan w(T); exact for total degree
/// <= order on each sub-simplex.
template <int D>
Rule<D> cell_rule(const Mesh<D>& m, int cell, int order) {
    const Rule<D>& ref = simplex_rule<D>(order);
    Rule<D> out;
    for (const auto& s : m.cells[cell].sub) {
        Rule<D> part = map_affine<D>(ref, s);
        out.points.insert(out.points.end(), part.points.begin(), part.points.end());
        out.weights.insert(out.weights.end(), part.weights.begin(), part.weights.end());
    }
    return out;
}

/// Rule over a proper face (2D: segment; 3D: union of skeleton triangles).
template <int D>
Rule<D> face_rule(const Mesh<D>& m, int face, int order) {
    const auto& f = m.faces[face];
    Rule<D> out;
    if constexpr (D == 2) {
        out = embed_simplex<2, 1>(simplex_rule<1>(order),
                                  {m.vertices[f.loop[0]], m.vertices[f.loop[1]]});
    } else {
        const Rule<2>& ref = simplex_rule<2>(order);
        for (const auto& t : f.tris) {
            Rule<3> part = embed_simplex<3, 2>(
                ref, {m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]});
            out.points.insert(out.points.end(), part.points.begin(), part.points.end());
            out.weights.insert(out.weights.end(), part.weights.begin(), part.weights.end());
        }
    }
    return out;
}

}  // namespace wg

#endif  // WGELAST_MESH_HPP
