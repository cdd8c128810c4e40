// SPDX-License-Identifier: MIT
//
// Polynomial bases: scaled centered monomials on cells, monomials in an
// orthonormal face frame on proper faces, and the symmetric-tensor
// component enumeration used for stress variables.
//
// Cell basis: m_a(x) = prod_i ((x_i - c_i)/h_T)^{a_i}, centered at the cell
// centroid and scaled by the cell diameter; dimension C(j+d, d).
// Face basis: same construction in (d-1) frame coordinates, centered at the
// face centroid and scaled by the face diameter; dimension C(j+d-1, d-1).
//
// Frames are deterministic: 2D edges are parametrized by arclength from the
// endpoint with the lower vertex id; 3D faces use Gram-Schmidt on the two
// loop edge vectors emanating from the lowest vertex id.

#ifndef WGELAST_BASIS_HPP
#define WGELAST_BASIS_HPP

#include "wgelast/common.hpp"
#include "wgelast/mesh.hpp"

#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace wg {

namespace detail {

inline double int_pow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Cell basis
// --------------------------------------------------------------------------

template <int D>
struct CellBasis {
    int degree = 0;
    Vec<D> center = Vec<D>::Zero();
    double scale = 1.0;
    std::vector<std::array<int, D>> exps;

    int size() const { return static_cast<int>(exps.size()); }

    double eval(int a, const Vec<D>& x) const {
        Vec<D> t = (x - center) / scale;
        double r = 1.0;
        for (int i = 0; i < D; ++i) r *= detail::int_pow(t[i], exps[a][i]);
        return r;
    }

    Vec<D> grad(int a, const Vec<D>& x) const {
        Vec<D> t = (x - center) / scale;
        Vec<D> g;
        for (int dir = 0; dir < D; ++dir) {
            if (exps[a][dir] == 0) {
                g[dir] = 0.0;
                continue;
            }
            double r = exps[a][dir] / scale;
            for (int i = 0; i < D; ++i)
                r *= detail::int_pow(t[i], i == dir ? exps[a][i] - 1 : exps[a][i]);
            g[dir] = r;
        }
        return g;
    }

    void eval_all(const Vec<D>& x, VectorXd& out) const {
        out.resize(size());
        for (int a = 0; a < size(); ++a) out[a] = eval(a, x);
    }
};

template <int D>
CellBasis<D> cell_basis(const Mesh<D>& m, int cell, int degree) {
    CellBasis<D> b;
    b.degree = degree;
    b.center = m.cells[cell].centroid;
    b.scale = m.cells[cell].h;
    b.exps = multi_indices<D>(degree);
    return b;
}

// --------------------------------------------------------------------------
// Face frame and face basis
// --------------------------------------------------------------------------

template <int D>
struct FaceFrame {
    Vec<D> origin = Vec<D>::Zero();
    Eigen::Matrix<double, D, D - 1> axes = Eigen::Matrix<double, D, D - 1>::Zero();

    Vec<D - 1> to_local(const Vec<D>& x) const { return axes.transpose() * (x - origin); }
};

template <int D>
FaceFrame<D> face_frame(const Mesh<D>& m, int face) {
    const auto& f = m.faces[face];
    FaceFrame<D> fr;
    if constexpr (D == 2) {
        int o = std::min(f.loop[0], f.loop[1]);
        int e = std::max(f.loop[0], f.loop[1]);
        fr.origin = m.vertices[o];
        fr.axes.col(0) = (m.vertices[e] - m.vertices[o]).normalized();
    } else {
        const int nl = static_cast<int>(f.loop.size());
        int pos = 0;
        for (int i = 1; i < nl; ++i)
            if (f.loop[i] < f.loop[pos]) pos = i;
        const Vec<3>& v0 = m.vertices[f.loop[pos]];
        Vec<3> e1 = m.vertices[f.loop[(pos + 1) % nl]] - v0;
        Vec<3> e2 = m.vertices[f.loop[(pos + nl - 1) % nl]] - v0;
        fr.origin = v0;
        Vec<3> u1 = e1.normalized();
        fr.axes.col(0) = u1;
        fr.axes.col(1) = (e2 - u1 * u1.dot(e2)).normalized();
    }
    return fr;
}

template <int D>
struct FaceBasis {
    int degree = 0;
    FaceFrame<D> frame;
    Vec<D - 1> center = Vec<D - 1>::Zero();
    double scale = 1.0;
    std::vector<std::array<int, D - 1>> exps;

    int size() const { return static_cast<int>(exps.size()); }

    double eval(int a, const Vec<D>& x) const {
        Vec<D - 1> t = (frame.to_local(x) - center) / scale;
        double r = 1.0;
        for (int i = 0; i < D - 1; ++i) r *= detail::int_pow(t[i], exps[a][i]);
        return r;
    }

    void eval_all(const Vec<D>& x, VectorXd& out) const {
        out.resize(size());
        for (int a = 0; a < size(); ++a) out[a] = eval(a, x);
    }
};

template <int D>
FaceBasis<D> face_basis(const Mesh<D>& m, int face, int degree) {
    FaceBasis<D> b;
    b.degree = degree;
    b.frame = face_frame(m, face);
    b.center = b.frame.to_local(m.faces[face].centroid);
    b.scale = m.faces[face].h;
    b.exps = multi_indices<D - 1>(degree);
    return b;
}

// --------------------------------------------------------------------------
// Symmetric tensor components
// --------------------------------------------------------------------------

/// Component pairs (i, j), i <= j, of a symmetric d x d tensor, diagonal
/// entries first: 2D (00)(11)(01); 3D (00)(11)(22)(01)(02)(12). A tensor is
/// stored as the coefficient vector of S = sum_a c_a S_a with
/// S_a = e_i e_j^T + e_j e_i^T for i < j and e_i e_i^T on the diagonal.
template <int D>
const std::vector<std::pair<int, int>>& sym_pairs() {
    static const std::vector<std::pair<int, int>> pairs = [] {
        std::vector<std::pair<int, int>> p;
        for (int i = 0; i < D; ++i) p.emplace_back(i, i);
        for (int i = 0; i < D; ++i)
            for (int j = i + 1; j < D; ++j) p.emplace_back(i, j);
        return p;
    }();
    return pairs;
}

/// Frobenius weight (S_a, S_a)_F per unit coefficient: 1 on the diagonal,
/// 2 for off-diagonal components.
template <int D>
double sym_weight(int a) {
    return a < D ? 1.0 : 2.0;
}

/// Materialize component a as a d x d matrix.
template <int D>
Mat<D> sym_component(int a) {
    const auto& [i, j] = sym_pairs<D>()[a];
    Mat<D> s = Mat<D>::Zero();
    s(i, j) = 1.0;
    s(j, i) = 1.0;
    return s;
}

}  // namespace wg

#endif  // WGELAST_BASIS_HPP
