// SPDX-License-Identifier: MIT
//
// Convergence harness: relative error norms against a manufactured case,
// multi-level studies with per-level rates, lambda-robustness ratios, and a
// deterministic CSV report.

#ifndef WGELAST_VERIFY_HPP
#define WGELAST_VERIFY_HPP

#include "wgelast/assembly.hpp"
#include "wgelast/manufactured.hpp"
#include "wgelast/solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace wg {

struct ErrorNorms {
    double err_u = 0.0;      ///< ||u - u_hi||_0 / ||u||_0
    double err_sigma = 0.0;  ///< ||sigma - sigma_hi||_0 / ||sigma||_0
    double err_gradu = 0.0;  ///< broken H1: ||grad(u - u_hi)||_0 / ||grad u||_0
};

namespace detail {

/// Jacobian of a coefficient vector field: row i = gradient of component i.
template <int D>
Mat<D> eval_vector_grad(const CellBasis<D>& basis, const VectorXd& coef, const Vec<D>& x) {
    Mat<D> g = Mat<D>::Zero();
    const int n = basis.size();
    for (int b = 0; b < n; ++b) {
        Vec<D> gb = basis.grad(b, x);
        for (int i = 0; i < D; ++i) g.row(i) += coef[i * n + b] * gb.transpose();
    }
    return g;
}

}  // namespace detail

/// Relative L2 errors of displacement and stress plus the broken H1 error of
/// the displacement, integrated cellwise at the given quadrature order
/// (default 2(k+2)+4 so the quadrature error is negligible).
template <int D>
ErrorNorms error_norms(const Mesh<D>& m, const DofMap<D>& dm, const WgSolution<D>& sol,
                       const ManufacturedCase<D>& mc, int order = -1) {
    if (order < 0) order = 2 * (dm.k + 2) + 4;
    double nu = 0, du = 0, nsg = 0, dsg = 0, ng = 0, dg = 0;
    for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
        CellBasis<D> ub = cell_basis(m, static_cast<int>(ci), dm.k + 1);
        CellBasis<D> sb = cell_basis(m, static_cast<int>(ci), dm.k);
        Rule<D> rule = cell_rule(m, static_cast<int>(ci), order);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec<D>& x = rule.points[q];
            const double w = rule.weights[q];
            Vec<D> ue = mc.u(x);
            Vec<D> uh = eval_vector<D>(ub, sol.u[ci], x);
            Mat<D> se = mc.sigma(x);
            Mat<D> sh = eval_stress<D>(sb, sol.sigma[ci], x);
            Mat<D> ge = mc.grad_u(x);
            Mat<D> gh = detail::eval_vector_grad<D>(ub, sol.u[ci], x);
            nu += w * (ue - uh).squaredNorm();
            du += w * ue.squaredNorm();
            nsg += w * (se - sh).squaredNorm();
            dsg += w * se.squaredNorm();
            ng += w * (ge - gh).squaredNorm();
            dg += w * ge.squaredNorm();
        }
    }
    auto rel = [](double n2, double d2) { return std::sqrt(n2 / (d2 > 0.0 ? d2 : 1.0)); };
    return ErrorNorms{rel(nu, du), rel(nsg, dsg), rel(ng, dg)};
}

// --------------------------------------------------------------------------
// Convergence studies
// --------------------------------------------------------------------------

enum class MeshFamily { triangle, ladder, cube };

struct StudyConfig {
    std::string case_id = "2d";  ///< "2d" | "3d"
    MeshFamily family = MeshFamily::triangle;
    int k = 0;
    std::vector<double> lambdas{1.0};
    std::vector<int> levels{2, 3};    ///< mesh size n = 2^level per entry
    long dof_budget = 4'000'000;      ///< cap on skeleton DOFs per solve
    int jobs = 0;                     ///< 0 -> WG_ELAST_JOBS or 1
    int quad_order = -1;              ///< error-integration override
};

struct StudyRow {
    std::string case_id;
    int k = 0;
    double lambda = 1.0;
    int level = 0;  ///< exponent; mesh size n = 2^level
    long dofs = 0;  ///< total skeleton DOFs (free + Dirichlet)
    double err_u = 0, rate_u = 0;
    double err_sigma = 0, rate_sigma = 0;
    double err_gradu = 0, rate_gradu = 0;
    bool has_rate = false;  ///< false on the first level of each lambda group
    // Diagnostics (not part of the CSV contract):
    double residual = 0.0;
    bool definite = false;
    std::string method;
};

/// Closed-form skeleton-DOF overestimate used as the budget guard, so runs
/// that would blow the budget are rejected before any mesh is built.
inline long estimate_skeleton_dofs(MeshFamily family, int k, int n) {
    const double v = std::pow(n + 1.0, family == MeshFamily::cube ? 3 : 2);
    switch (family) {
        case MeshFamily::triangle:
            return static_cast<long>(2 * (v + static_cast<double>(k) * (3.0 * n * n + 2.0 * n)) +
                                     (k + 1 < 2 ? v : 0.0));
        case MeshFamily::ladder:
            // <= 2(n^2+n) extra midpoint vertices and <= 5n^2+3n edges.
            return static_cast<long>(2 * (3.0 * v + static_cast<double>(k) * (5.0 * n * n + 3.0 * n)) +
                                     (k + 1 < 2 ? 3.0 * v : 0.0));
        case MeshFamily::cube:
            // <= 7(n+1)^3 edges in the six-tet decomposition.
            return static_cast<long>(3 * (v + static_cast<double>(k) * 7.0 * v) +
                                     (k + 1 < 3 ? v : 0.0));
    }
    return 0;
}

namespace detail {

template <int D>
Mesh<D> build_family_mesh(MeshFamily family, int n);

template <>
inline Mesh<2> build_family_mesh<2>(MeshFamily family, int n) {
    return family == MeshFamily::ladder ? generate_ladder_mesh(n) : generate_triangle_mesh(n);
}

template <>
inline Mesh<3> build_family_mesh<3>(MeshFamily family, int n) {
    (void)family;
    return generate_cube_tet_mesh(n);
}

template <int D>
std::vector<StudyRow> run_study(const StudyConfig& cfg) {
    if (cfg.k < 0) throw Error("polynomial degree must be nonnegative");
    if (cfg.levels.empty()) throw Error("study needs at least one level");
    for (int level : cfg.levels) {
        const int n = 1 << level;
        const long est = estimate_skeleton_dofs(cfg.family, cfg.k, n);
        if (est > cfg.dof_budget)
            throw BudgetExceededError("level " + std::to_string(level) + " needs about " +
                                      std::to_string(est) + " skeleton DOFs; budget is " +
                                      std::to_string(cfg.dof_budget));
    }

    std::vector<StudyRow> rows;
    for (double lambda : cfg.lambdas) {
        ManufacturedCase<D> mc = make_case<D>(lambda);
        const ErrorNorms* prev = nullptr;
        ErrorNorms prev_store;
        int prev_n = 0;
        for (int level : cfg.levels) {
            const int n = 1 << level;
            Mesh<D> m = build_family_mesh<D>(cfg.family, n);
            DofMap<D> dm = build_dof_map(m, cfg.k);
            auto zero_n = [](const Vec<D>&) { return Vec<D>::Zero().eval(); };
            auto cs = assemble_global(m, dm, mc.lame, mc.f, mc.u, zero_n, cfg.jobs);
            auto [y, rep] = solve_sparse_symmetric(cs.K, cs.rhs);
            WgSolution<D> sol = recover_interior(m, dm, cs, y);
            ErrorNorms e = error_norms(m, dm, sol, mc, cfg.quad_order);

            StudyRow row;
            row.case_id = mc.id;
            row.k = cfg.k;
            row.lambda = lambda;
            row.level = level;
            row.dofs = dm.skeleton_total;
            row.err_u = e.err_u;
            row.err_sigma = e.err_sigma;
            row.err_gradu = e.err_gradu;
            row.residual = rep.relative_residual;
            row.definite = rep.definite;
            row.method = rep.method;
            if (prev) {
                const double refine = std::log2(static_cast<double>(n) / prev_n);
                row.rate_u = std::log2(prev->err_u / e.err_u) / refine;
                row.rate_sigma = std::log2(prev->err_sigma / e.err_sigma) / refine;
                row.rate_gradu = std::log2(prev->err_gradu / e.err_gradu) / refine;
                row.has_rate = true;
            }
            rows.push_back(row);
            prev_store = e;
            prev = &prev_store;
            prev_n = n;
        }
    }
    return rows;
}

}  // namespace detail

/// Runs the manufactured-solution study described by the config: one solve
/// per (lambda, level) pair, rates against the previous level within each
/// lambda group.  Throws BudgetExceededError before any solve if a level's
/// estimated skeleton size exceeds the budget.
inline std::vector<StudyRow> convergence_study(const StudyConfig& cfg) {
    if (cfg.case_id == "3d") {
        StudyConfig c3 = cfg;
        c3.family = MeshFamily::cube;
        return detail::run_study<3>(c3);
    }
    if (cfg.case_id != "2d") throw Error("unknown case id: " + cfg.case_id);
    if (cfg.family == MeshFamily::cube)
        throw Error("the cube family requires the 3d case");
    return detail::run_study<2>(cfg);
}

/// Writes the report in the fixed CSV layout.  Rates are empty on the first
/// level of each lambda group.  The format is fully deterministic: identical
/// rows serialize to identical bytes.
inline void write_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
    os << "case,k,lambda,level,dofs,err_u,rate_u,err_sigma,rate_sigma,err_gradu,rate_gradu\n";
    char buf[360];
    for (const auto& r : rows) {
        char ru[32] = "", rs[32] = "", rg[32] = "";
        if (r.has_rate) {
            std::snprintf(ru, sizeof(ru), "%.4f", r.rate_u);
            std::snprintf(rs, sizeof(rs), "%.4f", r.rate_sigma);
            std::snprintf(rg, sizeof(rg), "%.4f", r.rate_gradu);
        }
        std::snprintf(buf, sizeof(buf), "%s,%d,%g,%d,%ld,%.6e,%s,%.6e,%s,%.6e,%s\n",
                      r.case_id.c_str(), r.k, r.lambda, r.level, r.dofs, r.err_u, ru,
                      r.err_sigma, rs, r.err_gradu, rg);
        os << buf;
    }
}

struct RobustnessRatios {
    double ratio_u = 0.0;
    double ratio_sigma = 0.0;
    double ratio_gradu = 0.0;
};

/// Errors at lambda = hi divided by errors at lambda = lo on one mesh level.
/// A robust scheme keeps these ratios O(1) as hi grows.
inline RobustnessRatios lambda_sweep(const StudyConfig& cfg, double lo = 1.0, double hi = 1e6) {
    StudyConfig c = cfg;
    c.lambdas = {lo, hi};
    if (c.levels.size() != 1) throw Error("lambda sweep runs on a single level");
    std::vector<StudyRow> rows = convergence_study(c);
    return RobustnessRatios{rows[1].err_u / rows[0].err_u,
                            rows[1].err_sigma / rows[0].err_sigma,
                            rows[1].err_gradu / rows[0].err_gradu};
}

}  // namespace wg

#endif  // WGELAST_VERIFY_HPP
