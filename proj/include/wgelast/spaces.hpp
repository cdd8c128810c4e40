// SPDX-License-Identifier: MIT
//
// Degree-of-freedom management for the four discrete spaces:
//   - per-cell symmetric stress block,  dim d(d+1)/2 * C(k+d, d)
//   - per-cell displacement block,      dim d * C(k+1+d, d)
//   - continuous displacement trace: vector-valued Lagrange nodes of degree
//     k+1 on the skeleton (2D: proper edges; 3D: the triangulated faces),
//     single-numbered across faces meeting at a node
//   - scalar continuous P1 stress-trace nodes at skeleton vertices, present
//     only when k+1 < d.
//
// Free-layout: displacement components of non-Dirichlet nodes first
// (node-major, component-minor), then the stress-trace nodes. A node is
// Dirichlet when it lies on the closure of any Dirichlet face.

#ifndef WGELAST_SPACES_HPP
#define WGELAST_SPACES_HPP

#include "wgelast/basis.hpp"
#include "wgelast/common.hpp"
#include "wgelast/mesh.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace wg {

template <int D>
struct DofMap {
    int k = 0;
    int stress_dim = 0;  ///< per-cell interior stress coefficients
    int disp_dim = 0;    ///< per-cell interior displacement coefficients

    struct Node {
        Vec<D> pos = Vec<D>::Zero();
        bool dirichlet = false;
    };
    std::vector<Node> nodes;

    /// 2D: per proper face, [lo-vertex node, hi-vertex node, k interior
    /// nodes from lo to hi]. 3D: deduped union of the face's triangle nodes
    /// in first-encounter order.
    std::vector<std::vector<int>> face_nodes;
    /// 3D only: per (face, skeleton triangle), the degree-(k+1) Lagrange
    /// nodes in barycentric enumeration order.
    std::vector<std::vector<std::vector<int>>> face_tri_nodes;

    bool has_sigma_trace = false;        ///< k+1 < d
    int n_sigma_nodes = 0;               ///< skeleton vertices (when active)
    std::vector<int> vertex_sigma_node;  ///< vertex id -> sigma slot or -1

    std::vector<int> node_free_slot;  ///< node id -> free slot or -1
    std::vector<int> node_fixed_slot; ///< node id -> Dirichlet slot or -1
    int n_free_nodes = 0;
    int n_dirichlet_nodes = 0;

    int n_free = 0;          ///< D*n_free_nodes + active sigma nodes
    int n_fixed = 0;         ///< D*n_dirichlet_nodes
    int skeleton_total = 0;  ///< D*nodes.size() + n_sigma_nodes (reported)

    int u_free_index(int node, int comp) const {
        int s = node_free_slot[node];
        return s < 0 ? -1 : s * D + comp;
    }
    int u_fixed_index(int node, int comp) const {
        int s = node_fixed_slot[node];
        return s < 0 ? -1 : s * D + comp;
    }
    /// Global free index of the sigma-trace DOF at a vertex, or -1.
    int sigma_dof(int vertex) const {
        if (!has_sigma_trace) return -1;
        int s = vertex_sigma_node[vertex];
        return s < 0 ? -1 : D * n_free_nodes + s;
    }
};

namespace detail {

/// Barycentric Lagrange grid of degree p on a triangle (v0, v1, v2):
/// all (i, j), i + j <= p, node at v0 + (i/p)(v1-v0) + (j/p)(v2-v0).
struct TriNodeRef {
    int i, j;
    enum Kind { corner, edge, interior } kind;
    int corner_id;   // 0..2 for corners
    int edge_id;     // 0: v0v1 (j=0), 1: v1v2 (i+j=p), 2: v0v2 (i=0)
    int edge_step;   // 1..p-1 along the edge in local orientation
};

inline std::vector<TriNodeRef> tri_node_grid(int p) {
    std::vector<TriNodeRef> out;
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p - i; ++j) {
            TriNodeRef r{i, j, TriNodeRef::interior, -1, -1, -1};
            if (i == 0 && j == 0) {
                r.kind = TriNodeRef::corner;
                r.corner_id = 0;
            } else if (i == p) {
                r.kind = TriNodeRef::corner;
                r.corner_id = 1;
            } else if (j == p) {
                r.kind = TriNodeRef::corner;
                r.corner_id = 2;
            } else if (j == 0) {
                r.kind = TriNodeRef::edge;
                r.edge_id = 0;
                r.edge_step = i;
            } else if (i + j == p) {
                r.kind = TriNodeRef::edge;
                r.edge_id = 1;
                r.edge_step = j;
            } else if (i == 0) {
                r.kind = TriNodeRef::edge;
                r.edge_id = 2;
                r.edge_step = j;
            }
            out.push_back(r);
        }
    return out;
}

}  // namespace detail

template <int D>
DofMap<D> build_dof_map(const Mesh<D>& m, int k) {
    DofMap<D> dm;
    dm.k = k;
    dm.stress_dim = sym_dim(D) * poly_space_dim(D, k);
    dm.disp_dim = D * poly_space_dim(D, k + 1);
    dm.has_sigma_trace = (k + 1 < D);
    const int p = k + 1;

    const int nv = static_cast<int>(m.vertices.size());
    std::vector<int> vertex_node(nv, -1);
    // Vertex nodes first, in vertex id order, for vertices on the skeleton.
    std::vector<char> on_skeleton(nv, 0);
    for (const auto& f : m.faces)
        for (int v : f.loop) on_skeleton[v] = 1;
    for (int v = 0; v < nv; ++v)
        if (on_skeleton[v]) {
            vertex_node[v] = static_cast<int>(dm.nodes.size());
            dm.nodes.push_back({m.vertices[v], false});
        }

    dm.face_nodes.resize(m.faces.size());
    if constexpr (D == 2) {
        for (std::size_t fi = 0; fi < m.faces.size(); ++fi) {
            const auto& f = m.faces[fi];
            int lo = std::min(f.loop[0], f.loop[1]);
            int hi = std::max(f.loop[0], f.loop[1]);
            auto& fn = dm.face_nodes[fi];
            fn.push_back(vertex_node[lo]);
            fn.push_back(vertex_node[hi]);
            for (int s = 1; s <= p - 1; ++s) {
                double t = static_cast<double>(s) / p;
                Vec<2> pos = (1.0 - t) * m.vertices[lo] + t * m.vertices[hi];
                fn.push_back(static_cast<int>(dm.nodes.size()));
                dm.nodes.push_back({pos, false});
            }
        }
    } else {
        dm.face_tri_nodes.resize(m.faces.size());
        std::map<std::tuple<int, int, int>, int> edge_nodes;  // (lo, hi, step from lo)
        const auto grid = detail::tri_node_grid(p);
        for (std::size_t fi = 0; fi < m.faces.size(); ++fi) {
            const auto& f = m.faces[fi];
            auto& per_tri = dm.face_tri_nodes[fi];
            std::vector<int> uni;
            for (const auto& t : f.tris) {
                std::vector<int> tn;
                const Vec<3>&v0 = m.vertices[t[0]], &v1 = m.vertices[t[1]],
                            &v2 = m.vertices[t[2]];
                for (const auto& g : grid) {
                    int id = -1;
                    if (g.kind == detail::TriNodeRef::corner) {
                        id = vertex_node[t[g.corner_id]];
                    } else if (g.kind == detail::TriNodeRef::edge) {
                        static const int ev[3][2] = {{0, 1}, {1, 2}, {0, 2}};
                        int a = t[ev[g.edge_id][0]], b = t[ev[g.edge_id][1]];
                        int lo = std::min(a, b), hi = std::max(a, b);
                        int step = a == lo ? g.edge_step : p - g.edge_step;
                        auto key = std::make_tuple(lo, hi, step);
                        auto it = edge_nodes.find(key);
                        if (it != edge_nodes.end()) {
                            id = it->second;
                        } else {
                            double s = static_cast<double>(step) / p;
                            Vec<3> pos = (1.0 - s) * m.vertices[lo] + s * m.vertices[hi];
                            id = static_cast<int>(dm.nodes.size());
                            dm.nodes.push_back({pos, false});
                            edge_nodes.emplace(key, id);
                        }
                    } else {
                        Vec<3> pos = v0 + (static_cast<double>(g.i) / p) * (v1 - v0) +
                                     (static_cast<double>(g.j) / p) * (v2 - v0);
                        id = static_cast<int>(dm.nodes.size());
                        dm.nodes.push_back({pos, false});
                    }
                    tn.push_back(id);
                    if (std::find(uni.begin(), uni.end(), id) == uni.end()) uni.push_back(id);
                }
                per_tri.push_back(std::move(tn));
            }
            dm.face_nodes[fi] = std::move(uni);
        }
    }

    // Dirichlet flags: every node listed by a Dirichlet face.
    for (std::size_t fi = 0; fi < m.faces.size(); ++fi)
        if (m.faces[fi].marker == BoundaryKind::dirichlet)
            for (int nd : dm.face_nodes[fi]) dm.nodes[nd].dirichlet = true;

    dm.node_free_slot.assign(dm.nodes.size(), -1);
    dm.node_fixed_slot.assign(dm.nodes.size(), -1);
    for (std::size_t nd = 0; nd < dm.nodes.size(); ++nd) {
        if (dm.nodes[nd].dirichlet)
            dm.node_fixed_slot[nd] = dm.n_dirichlet_nodes++;
        else
            dm.node_free_slot[nd] = dm.n_free_nodes++;
    }

    dm.vertex_sigma_node.assign(nv, -1);
    if (dm.has_sigma_trace) {
        for (int v = 0; v < nv; ++v)
            if (on_skeleton[v]) dm.vertex_sigma_node[v] = dm.n_sigma_nodes++;
    }

    dm.n_free = D * dm.n_free_nodes + dm.n_sigma_nodes;
    dm.n_fixed = D * dm.n_dirichlet_nodes;
    dm.skeleton_total = D * static_cast<int>(dm.nodes.size()) + dm.n_sigma_nodes;
    return dm;
}

// --------------------------------------------------------------------------
// Lagrange shape functions on skeleton elements
// --------------------------------------------------------------------------

/// Nodal (Lagrange) shape functions of the trace space on one skeleton
/// element, expressed in the face monomial basis: L(x) = W phi(x) with
/// L_c(node_j) = delta_cj. `node_ids` gives the global node per local shape.
template <int D>
struct FaceShapes {
    FaceBasis<D> basis;
    MatrixXd W;
    std::vector<int> node_ids;

    int size() const { return static_cast<int>(node_ids.size()); }
    void eval_all(const Vec<D>& x, VectorXd& out) const {
        VectorXd phi;
        basis.eval_all(x, phi);
        out = W * phi;
    }
};

namespace detail {

template <int D>
FaceShapes<D> make_face_shapes(const Mesh<D>& m, const DofMap<D>& dm, int face,
                               const std::vector<int>& node_ids) {
    FaceShapes<D> fs;
    fs.basis = face_basis(m, face, dm.k + 1);
    fs.node_ids = node_ids;
    const int n = static_cast<int>(node_ids.size());
    if (n != fs.basis.size())
        throw Error("trace node count does not match the face polynomial space");
    MatrixXd V(n, n);
    for (int j = 0; j < n; ++j)
        for (int c = 0; c < n; ++c) V(j, c) = fs.basis.eval(c, dm.nodes[node_ids[j]].pos);
    Eigen::FullPivLU<MatrixXd> lu(V);
    if (!lu.isInvertible()) throw Error("degenerate Lagrange node set on a face");
    fs.W = lu.inverse().transpose();
    return fs;
}

}  // namespace detail

/// 2D: shapes over a proper edge (the whole skeleton element).
inline FaceShapes<2> face_shapes(const Mesh<2>& m, const DofMap<2>& dm, int face) {
    return detail::make_face_shapes<2>(m, dm, face, dm.face_nodes[face]);
}

/// 3D: shapes over one skeleton triangle of a proper face.
inline FaceShapes<3> face_tri_shapes(const Mesh<3>& m, const DofMap<3>& dm, int face,
                                     int tri) {
    return detail::make_face_shapes<3>(m, dm, face, dm.face_tri_nodes[face][tri]);
}

/// All skeleton elements of one proper face: one per triangle in 3D, the
/// face itself in 2D. Each element also carries its own quadrature domain:
/// callers integrate 2D elements with face_rule and 3D triangles with the
/// per-triangle rows of Face::tris.
template <int D>
std::vector<FaceShapes<D>> skeleton_shapes(const Mesh<D>& m, const DofMap<D>& dm, int face) {
    std::vector<FaceShapes<D>> out;
    if constexpr (D == 2) {
        out.push_back(face_shapes(m, dm, face));
    } else {
        for (std::size_t t = 0; t < m.faces[face].tris.size(); ++t)
            out.push_back(face_tri_shapes(m, dm, face, static_cast<int>(t)));
    }
    return out;
}

/// Quadrature rule over skeleton element `e` of a proper face (2D: the
/// face; 3D: triangle e of Face::tris).
template <int D>
Rule<D> skeleton_element_rule(const Mesh<D>& m, int face, int e, int order) {
    if constexpr (D == 2) {
        return face_rule(m, face, order);
    } else {
        const auto& t = m.faces[face].tris[e];
        return embed_simplex<3, 2>(simplex_rule<2>(order),
                                   {m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]});
    }
}

}  // namespace wg

#endif  // WGELAST_SPACES_HPP
