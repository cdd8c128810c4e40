// SPDX-License-Identifier: MIT
//
// Mean-preserving boundary interpolant onto the continuous degree-(k+1)
// trace space, restricted to the Dirichlet boundary.
//
// Construction, per component:
//  1. Every Dirichlet node gets the L2-dual-basis functional of one skeleton
//     element containing it (the lowest-(face, triangle) element: this is
//     the whole story for face-interior nodes and the deterministic choice
//     for shared nodes).
//  2. The nodal values are then modified so integrals of the interpolant
//     match integrals of the data:
//      - k+1 >= d: each element has interior nodes; the first one absorbs
//        that element's mean defect (purely local).
//      - d=2, k=0: Dirichlet edges are grouped along each boundary chain
//        into disjoint patches of two consecutive edges (a trailing triple
//        or a single-edge patch when the chain length requires it); each
//        patch's shared vertices absorb the patch defect.
//      - d=3, k<=1: each skeleton triangle is assigned to its largest
//        "anchor" node (vertices for k=0, edge midpoints for k=1, the nodes
//        whose shape functions have nonzero element integrals); anchors are
//        processed in ascending id so that later corrections never perturb
//        already-balanced groups (every triangle containing an anchor has
//        an anchor at least as large).
//     All variants preserve <I g, 1> over the Dirichlet boundary exactly
//     and leave piecewise-polynomial data invariant; the 3D grouping trades
//     strict locality for a guaranteed cover (see the tests).

#ifndef WGELAST_INTERPOLANT_HPP
#define WGELAST_INTERPOLANT_HPP

#include "wgelast/mesh.hpp"
#include "wgelast/projection.hpp"
#include "wgelast/spaces.hpp"

#include <map>
#include <vector>

namespace wg {

namespace detail {

template <int D>
struct BoundaryElem {
    int face = -1;
    int sub = 0;  // skeleton triangle index (3D), 0 in 2D
    FaceShapes<D> shapes;
};

/// Integrals over one element: per-shape integrals and the g moments.
template <int D, class G>
void elem_integrals(const Mesh<D>& m, const BoundaryElem<D>& el, int qorder, G&& g,
                    VectorXd& shape_int, MatrixXd& moments, MatrixXd& gram) {
    Rule<D> rule = skeleton_element_rule(m, el.face, el.sub, qorder);
    const int n = el.shapes.size();
    shape_int = VectorXd::Zero(n);
    moments = MatrixXd::Zero(n, D);
    gram = MatrixXd::Zero(n, n);
    VectorXd L;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        el.shapes.eval_all(rule.points[q], L);
        const double w = rule.weights[q];
        shape_int += w * L;
        moments += w * L * g(rule.points[q]).transpose();
        gram.selfadjointView<Eigen::Lower>().rankUpdate(L, w);
    }
    gram = gram.selfadjointView<Eigen::Lower>();
}

/// Current interpolant integral over one element, using nodal values.
template <int D>
Vec<D> interp_integral(const BoundaryElem<D>& el, const VectorXd& shape_int,
                       const std::vector<Vec<D>>& val) {
    Vec<D> s = Vec<D>::Zero();
    for (int c = 0; c < el.shapes.size(); ++c) s += shape_int[c] * val[el.shapes.node_ids[c]];
    return s;
}

}  // namespace detail

/// Nodal values of the boundary interpolant at the Dirichlet trace nodes,
/// laid out like the fixed-DOF block: lift[fixed_slot*D + component].
template <int D, class G>
VectorXd scott_zhang_boundary(const Mesh<D>& m, const DofMap<D>& dm, G&& g, int order = -1) {
    const int qorder = order >= 0 ? order : 2 * (dm.k + 2) + 4;
    const int p = dm.k + 1;

    std::vector<detail::BoundaryElem<D>> elems;
    for (std::size_t fi = 0; fi < m.faces.size(); ++fi) {
        if (m.faces[fi].marker != BoundaryKind::dirichlet) continue;
        if constexpr (D == 2) {
            elems.push_back({static_cast<int>(fi), 0, face_shapes(m, dm, static_cast<int>(fi))});
        } else {
            for (std::size_t t = 0; t < m.faces[fi].tris.size(); ++t)
                elems.push_back({static_cast<int>(fi), static_cast<int>(t),
                                 face_tri_shapes(m, dm, static_cast<int>(fi),
                                                 static_cast<int>(t))});
        }
    }
    if (elems.empty()) throw Error("empty Dirichlet boundary: the interpolant needs faces");

    // Owner element per node: first in (face, triangle) order.
    std::vector<int> owner(dm.nodes.size(), -1);
    for (std::size_t ei = 0; ei < elems.size(); ++ei)
        for (int nd : elems[ei].shapes.node_ids)
            if (owner[nd] < 0) owner[nd] = static_cast<int>(ei);

    // Dual-basis nodal values from each node's owner element.
    std::vector<Vec<D>> val(dm.nodes.size(), Vec<D>::Zero());
    // Cache per-element shape integrals for the modification passes.
    std::vector<VectorXd> shape_ints(elems.size());
    for (std::size_t ei = 0; ei < elems.size(); ++ei) {
        const auto& el = elems[ei];
        VectorXd shape_int;
        MatrixXd moments, gram;
        detail::elem_integrals(m, el, qorder, g, shape_int, moments, gram);
        shape_ints[ei] = shape_int;
        Eigen::LLT<MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) throw SolverError("singular boundary Gram matrix");
        MatrixXd X = llt.solve(moments);  // dual-basis values, rows per node
        for (int c = 0; c < el.shapes.size(); ++c)
            if (owner[el.shapes.node_ids[c]] == static_cast<int>(ei))
                val[el.shapes.node_ids[c]] = X.row(c);
    }

    // Mean defect of one element with current values.
    auto defect = [&](std::size_t ei) {
        Rule<D> rule = skeleton_element_rule(m, elems[ei].face, elems[ei].sub, qorder);
        Vec<D> d = Vec<D>::Zero();
        VectorXd L;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            elems[ei].shapes.eval_all(rule.points[q], L);
            Vec<D> ig = Vec<D>::Zero();
            for (int c = 0; c < elems[ei].shapes.size(); ++c)
                ig += L[c] * val[elems[ei].shapes.node_ids[c]];
            d += rule.weights[q] * (g(rule.points[q]) - ig);
        }
        return d;
    };

    if (p >= D) {
        // One interior node per element absorbs that element's defect.
        const auto grid = detail::tri_node_grid(p);
        for (std::size_t ei = 0; ei < elems.size(); ++ei) {
            int sel = -1;
            if constexpr (D == 2) {
                sel = 2;  // [lo, hi, interior...]
            } else {
                for (std::size_t c = 0; c < grid.size(); ++c)
                    if (grid[c].kind == detail::TriNodeRef::interior) {
                        sel = static_cast<int>(c);
                        break;
                    }
            }
            val[elems[ei].shapes.node_ids[sel]] += defect(ei) / shape_ints[ei][sel];
        }
    } else if constexpr (D == 2) {
        // k = 0: chains of Dirichlet edges, paired into disjoint patches.
        std::map<int, std::vector<int>> at_node;  // endpoint node -> element ids
        for (std::size_t ei = 0; ei < elems.size(); ++ei) {
            at_node[elems[ei].shapes.node_ids[0]].push_back(static_cast<int>(ei));
            at_node[elems[ei].shapes.node_ids[1]].push_back(static_cast<int>(ei));
        }
        for (const auto& [nd, es] : at_node)
            if (es.size() > 2)
                throw TopologyError("Dirichlet boundary is not a 1-manifold at a node");

        std::vector<char> used(elems.size(), 0);
        auto walk = [&](int start) {
            std::vector<int> chain;
            int cur = start;
            int prev_node = -1;
            while (true) {
                chain.push_back(cur);
                used[cur] = 1;
                int a = elems[cur].shapes.node_ids[0], b = elems[cur].shapes.node_ids[1];
                int through = -1;
                for (int nd : {a, b}) {
                    if (nd == prev_node) continue;
                    for (int e : at_node[nd])
                        if (!used[e]) {
                            through = nd;
                            cur = e;
                            break;
                        }
                    if (through >= 0) break;
                }
                if (through < 0) break;
                prev_node = through;
            }
            return chain;
        };
        std::vector<std::vector<int>> chains;
        // Open chains first (start at degree-1 endpoints), then loops.
        for (const auto& [nd, es] : at_node)
            if (es.size() == 1 && !used[es[0]]) chains.push_back(walk(es[0]));
        for (std::size_t ei = 0; ei < elems.size(); ++ei)
            if (!used[ei]) chains.push_back(walk(static_cast<int>(ei)));

        auto shared_node = [&](int e1, int e2) {
            for (int nd1 : {elems[e1].shapes.node_ids[0], elems[e1].shapes.node_ids[1]})
                for (int nd2 : {elems[e2].shapes.node_ids[0], elems[e2].shapes.node_ids[1]})
                    if (nd1 == nd2) return nd1;
            throw TopologyError("non-adjacent edges in a Dirichlet chain");
        };
        auto apply_patch = [&](const std::vector<int>& es, const std::vector<int>& adjust) {
            Vec<D> total = Vec<D>::Zero();
            double coef = 0.0;
            for (int e : es) {
                total += defect(e);
                for (int nd : adjust)
                    for (int c = 0; c < elems[e].shapes.size(); ++c)
                        if (elems[e].shapes.node_ids[c] == nd) coef += shape_ints[e][c];
            }
            Vec<D> delta = total / coef;
            for (int nd : adjust) val[nd] += delta;
        };
        for (const auto& chain : chains) {
            std::size_t i = 0;
            const std::size_t n = chain.size();
            if (n == 1) {
                apply_patch({chain[0]},
                            {elems[chain[0]].shapes.node_ids[0],
                             elems[chain[0]].shapes.node_ids[1]});
                continue;
            }
            while (i + 1 < n) {
                if (n - i == 3) {  // trailing triple
                    int v1 = shared_node(chain[i], chain[i + 1]);
                    int v2 = shared_node(chain[i + 1], chain[i + 2]);
                    apply_patch({chain[i], chain[i + 1], chain[i + 2]}, {v1, v2});
                    i += 3;
                } else {
                    int v = shared_node(chain[i], chain[i + 1]);
                    apply_patch({chain[i], chain[i + 1]}, {v});
                    i += 2;
                }
            }
        }
    } else {
        // d=3, k<=1: sequential anchor groups over skeleton triangles.
        const auto grid = detail::tri_node_grid(p);
        std::map<int, std::vector<int>> groups;  // anchor node -> element ids
        std::vector<int> anchor_local(elems.size(), -1);
        for (std::size_t ei = 0; ei < elems.size(); ++ei) {
            int best = -1, best_local = -1;
            for (std::size_t c = 0; c < grid.size(); ++c) {
                const bool usable = p == 1 ? grid[c].kind == detail::TriNodeRef::corner
                                           : grid[c].kind == detail::TriNodeRef::edge;
                if (!usable) continue;
                int nd = elems[ei].shapes.node_ids[c];
                if (nd > best) {
                    best = nd;
                    best_local = static_cast<int>(c);
                }
            }
            groups[best].push_back(static_cast<int>(ei));
            anchor_local[ei] = best_local;
        }
        for (const auto& [anchor, es] : groups) {
            Vec<D> total = Vec<D>::Zero();
            double coef = 0.0;
            for (int e : es) {
                total += defect(e);
                // The anchor may sit at different local slots per element.
                for (int c = 0; c < elems[e].shapes.size(); ++c)
                    if (elems[e].shapes.node_ids[c] == anchor) coef += shape_ints[e][c];
            }
            val[anchor] += total / coef;
        }
    }

    VectorXd lift = VectorXd::Zero(dm.n_fixed);
    for (std::size_t nd = 0; nd < dm.nodes.size(); ++nd) {
        if (!dm.nodes[nd].dirichlet) continue;
        for (int c = 0; c < D; ++c)
            lift[dm.u_fixed_index(static_cast<int>(nd), c)] = val[nd][c];
    }
    return lift;
}

}  // namespace wg

#endif  // WGELAST_INTERPOLANT_HPP
