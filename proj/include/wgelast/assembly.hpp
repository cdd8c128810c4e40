// SPDX-License-Identifier: MIT
//
// Global assembly of the condensed skeleton system and interior recovery.
//
// Free unknowns follow the DofMap layout: boundary-displacement components
// (node-major) first, then the continuous stress-trace values when k+1 < d.
// Dirichlet displacement DOFs are eliminated symmetrically: their columns
// multiply the boundary-interpolant lift and move to the right-hand side.
//
// Stress-trace values at skeleton vertices all of whose incident faces lie
// on the domain boundary never appear in the trace stabilization (it runs
// over interior faces only); their rows come out exactly zero.  Those slots
// get a unit diagonal so the system stays nonsingular; the solution value
// is zero there and nothing else couples to it.

#ifndef WGELAST_ASSEMBLY_HPP
#define WGELAST_ASSEMBLY_HPP

#include "wgelast/forms.hpp"
#include "wgelast/interpolant.hpp"

#include <Eigen/Sparse>

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace wg {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Worker count: explicit argument wins, then WG_ELAST_JOBS, then 1.
inline int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    if (const char* env = std::getenv("WG_ELAST_JOBS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v < 1024) return static_cast<int>(v);
    }
    return 1;
}

template <int D>
struct CondensedSystem {
    SparseMatrix K;   ///< n_free x n_free, symmetric, both triangles stored
    VectorXd rhs;
    VectorXd lift;    ///< Dirichlet nodal values, n_fixed
    std::vector<LocalElementSystem<D>> locals;  ///< factors for recovery
    std::vector<int> regularized;  ///< stress-trace slots given a unit pivot
};

template <int D>
struct WgSolution {
    int k = 0;
    std::vector<VectorXd> sigma;  ///< per-cell stress coefficients
    std::vector<VectorXd> u;      ///< per-cell interior displacement coefficients
    VectorXd ub;                  ///< all skeleton nodal values, node*D + comp
    VectorXd sigtr;               ///< stress-trace values per active slot
};

template <int D, class F, class GD, class GN>
CondensedSystem<D> assemble_global(const Mesh<D>& m, const DofMap<D>& dm,
                                   const LameParameters& lame, F&& f, GD&& g_d, GN&& g_n,
                                   int jobs = 1) {
    CondensedSystem<D> cs;
    const int n = dm.n_free;
    cs.rhs = VectorXd::Zero(n);
    cs.lift = dm.n_fixed > 0 ? scott_zhang_boundary(m, dm, g_d) : VectorXd();

    const int ncells = static_cast<int>(m.cells.size());
    cs.locals.resize(ncells);
    const int workers = std::max(1, std::min(resolve_jobs(jobs), ncells));
    auto work = [&](int lo, int hi) {
        for (int ci = lo; ci < hi; ++ci) {
            cs.locals[ci] = local_forms(m, dm, ci, lame, f, g_n);
            condense(cs.locals[ci]);
        }
    };
    if (workers == 1) {
        work(0, ncells);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (ncells + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int lo = w * chunk, hi = std::min(ncells, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    // Sequential scatter in cell order: deterministic for any worker count.
    const int sig_base = dm.n_free - dm.n_sigma_nodes;
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<char> sig_diag(dm.n_sigma_nodes, 0);
    std::vector<int> gfree, gfixed;
    for (int ci = 0; ci < ncells; ++ci) {
        const auto& L = cs.locals[ci];
        const int ny = L.nt + L.nb;
        gfree.assign(ny, -1);
        gfixed.assign(ny, -1);
        for (int t = 0; t < L.nt; ++t) gfree[t] = dm.sigma_dof(L.sig_vertices[t]);
        for (std::size_t j = 0; j < L.ub_nodes.size(); ++j)
            for (int c = 0; c < D; ++c) {
                const int idx = L.nt + static_cast<int>(j) * D + c;
                const int fr = dm.u_free_index(L.ub_nodes[j], c);
                if (fr >= 0)
                    gfree[idx] = fr;
                else
                    gfixed[idx] = dm.u_fixed_index(L.ub_nodes[j], c);
            }
        for (int i = 0; i < ny; ++i) {
            if (gfree[i] < 0) continue;
            cs.rhs[gfree[i]] += L.rhs[i];
            for (int j = 0; j < ny; ++j) {
                const double v = L.C(i, j);
                if (v == 0.0) continue;
                if (gfree[j] >= 0) {
                    trips.emplace_back(gfree[i], gfree[j], v);
                    if (gfree[i] == gfree[j] && gfree[i] >= sig_base)
                        sig_diag[gfree[i] - sig_base] = 1;
                } else {
                    cs.rhs[gfree[i]] -= v * cs.lift[gfixed[j]];
                }
            }
        }
    }
    for (int s = 0; s < dm.n_sigma_nodes; ++s)
        if (!sig_diag[s]) {
            trips.emplace_back(sig_base + s, sig_base + s, 1.0);
            cs.regularized.push_back(s);
        }

    cs.K.resize(n, n);
    cs.K.setFromTriplets(trips.begin(), trips.end());
    cs.K.makeCompressed();
    return cs;
}

/// Expand the skeleton solve into per-cell interior fields.
template <int D>
WgSolution<D> recover_interior(const Mesh<D>& m, const DofMap<D>& dm,
                               const CondensedSystem<D>& cs, const VectorXd& y) {
    WgSolution<D> sol;
    sol.k = dm.k;
    const int nn = static_cast<int>(dm.nodes.size());
    sol.ub = VectorXd::Zero(D * nn);
    for (int nd = 0; nd < nn; ++nd)
        for (int c = 0; c < D; ++c) {
            const int fr = dm.u_free_index(nd, c);
            sol.ub[nd * D + c] = fr >= 0 ? y[fr] : cs.lift[dm.u_fixed_index(nd, c)];
        }
    sol.sigtr = y.tail(dm.n_sigma_nodes);

    const int ncells = static_cast<int>(m.cells.size());
    sol.sigma.resize(ncells);
    sol.u.resize(ncells);
    for (int ci = 0; ci < ncells; ++ci) {
        const auto& L = cs.locals[ci];
        VectorXd y1(L.nt), y2(L.nb);
        for (int t = 0; t < L.nt; ++t)
            y1[t] = y[dm.sigma_dof(L.sig_vertices[t])];
        for (std::size_t j = 0; j < L.ub_nodes.size(); ++j)
            for (int c = 0; c < D; ++c)
                y2[j * D + c] = sol.ub[L.ub_nodes[j] * D + c];
        L.recover(y1, y2, sol.sigma[ci], sol.u[ci]);
    }
    return sol;
}

/// Relative residual of the full uncondensed system at a recovered solution;
/// Dirichlet rows are constraints and excluded.
template <int D>
double full_residual(const Mesh<D>& m, const DofMap<D>& dm, const CondensedSystem<D>& cs,
                     const WgSolution<D>& sol) {
    double r2 = 0.0, load2 = 0.0;
    VectorXd rt = VectorXd::Zero(dm.n_sigma_nodes);
    VectorXd rb = VectorXd::Zero(dm.n_free);     // u_b rows (free slots only)
    VectorXd fb = VectorXd::Zero(dm.n_free);     // assembled boundary load
    for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
        const auto& L = cs.locals[ci];
        const VectorXd& x1 = sol.sigma[ci];
        const VectorXd& x2 = sol.u[ci];
        VectorXd y1(L.nt), y2(L.nb);
        for (int t = 0; t < L.nt; ++t)
            y1[t] = sol.sigtr[dm.sigma_dof(L.sig_vertices[t]) - (dm.n_free - dm.n_sigma_nodes)];
        for (std::size_t j = 0; j < L.ub_nodes.size(); ++j)
            for (int c = 0; c < D; ++c) y2[j * D + c] = sol.ub[L.ub_nodes[j] * D + c];

        VectorXd res1 = L.A * x1 - L.Bi * x2 - L.Bb * y2;
        if (L.nt > 0) res1.noalias() += L.Zit * y1;
        VectorXd res2 = -L.Bi.transpose() * x1 - L.Sii * x2 - L.Sib * y2 - L.Fi;
        r2 += res1.squaredNorm() + res2.squaredNorm();
        load2 += L.Fi.squaredNorm();

        VectorXd rest = L.Zit.transpose() * x1 + L.Ztt * y1;
        for (int t = 0; t < L.nt; ++t)
            rt[dm.sigma_dof(L.sig_vertices[t]) - (dm.n_free - dm.n_sigma_nodes)] += rest[t];

        VectorXd resb = -L.Bb.transpose() * x1 - L.Sib.transpose() * x2 - L.Sbb * y2;
        for (std::size_t j = 0; j < L.ub_nodes.size(); ++j)
            for (int c = 0; c < D; ++c) {
                const int fr = dm.u_free_index(L.ub_nodes[j], c);
                if (fr < 0) continue;
                rb[fr] += resb[j * D + c];
                fb[fr] += L.Fb[j * D + c];
            }
    }
    rb -= fb;
    r2 += rt.squaredNorm() + rb.head(dm.n_free - dm.n_sigma_nodes).squaredNorm();
    load2 += fb.squaredNorm();
    const double denom = std::sqrt(load2);
    return std::sqrt(r2) / (denom > 0.0 ? denom : 1.0);
}

}  // namespace wg

#endif  // WGELAST_ASSEMBLY_HPP
