// SPDX-License-Identifier: MIT
//
// Command-line driver: single solves, convergence studies, mesh checking,
// and the structural property suite.
//
//   wg-elast solve        one solve of a manufactured case or a mesh file
//   wg-elast convergence  multi-level study, fixed-layout CSV report
//   wg-elast check-mesh   parse a .wgmesh file and report shape regularity
//   wg-elast selftest     run the property suite, report pass/fail counts
//
// Exit codes: 0 success, 1 error (bad input, solver failure, budget), 2 an
// enabled assertion failed.  The CSV pipeline is deterministic: identical
// configuration produces identical bytes.

#include <CLI11.hpp>

#include "wgelast/mesh_io.hpp"
#include "wgelast/selftest.hpp"
#include "wgelast/verify.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_assert = 2;

/// Parses "2..7" | "4" | "2,3,5" into a list of level exponents.
std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const int lo = std::stoi(text.substr(0, dots));
            const int hi = std::stoi(text.substr(dots + 2));
            if (lo > hi) throw wg::Error("empty level range: " + text);
            for (int l = lo; l <= hi; ++l) out.push_back(l);
        } else {
            std::stringstream ss(text);
            std::string tok;
            while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
        }
    } catch (const std::invalid_argument&) {
        throw wg::Error("cannot parse levels: " + text);
    } catch (const std::out_of_range&) {
        throw wg::Error("level out of range: " + text);
    }
    if (out.empty()) throw wg::Error("levels must be nonempty");
    for (int l : out)
        if (l < 0 || l > 24) throw wg::Error("level exponent out of range: " + std::to_string(l));
    return out;
}

std::vector<double> parse_lambdas(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw wg::Error("cannot parse lambda value: " + tok);
        }
    }
    if (out.empty()) throw wg::Error("lambda list must be nonempty");
    for (double l : out)
        if (!(l > 0.0)) throw wg::Error("lambda must be positive");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw wg::Error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct SolveOptions {
    std::string case_id = "2d";
    std::string mesh_path;
    int k = 0;
    int level = 3;
    double lambda = 1.0;
    double mu = 0.0;  ///< 0 -> the manufactured case's value
    int jobs = 0;
    long dof_budget = 4'000'000;
    bool enforce = false;  ///< --assert
};

template <int D>
int run_solve_on(const wg::Mesh<D>& m, const SolveOptions& opt) {
    using namespace wg;
    ManufacturedCase<D> mc = make_case<D>(opt.lambda);
    const bool matched_material = opt.mu == 0.0 || opt.mu == mc.lame.mu;
    LameParameters lame = mc.lame;
    if (!matched_material) lame.mu = opt.mu;

    DofMap<D> dm = build_dof_map(m, opt.k);
    if (dm.skeleton_total > opt.dof_budget)
        throw BudgetExceededError("mesh needs " + std::to_string(dm.skeleton_total) +
                                  " skeleton DOFs; budget is " + std::to_string(opt.dof_budget));
    auto zero_n = [](const Vec<D>&) { return Vec<D>::Zero().eval(); };
    auto cs = assemble_global(m, dm, lame, mc.f, mc.u, zero_n, opt.jobs);
    auto [y, rep] = solve_sparse_symmetric(cs.K, cs.rhs);
    WgSolution<D> sol = recover_interior(m, dm, cs, y);

    std::printf("dimension            %d\n", D);
    std::printf("cells                %zu\n", m.cells.size());
    std::printf("degree k             %d\n", opt.k);
    std::printf("mu                   %g\n", lame.mu);
    std::printf("lambda               %g\n", lame.lambda);
    std::printf("skeleton dofs        %ld (free %d)\n", static_cast<long>(dm.skeleton_total),
                dm.n_free);
    std::printf("stress-trace nodes   %d\n", dm.n_sigma_nodes);
    std::printf("solver               %s\n", rep.method.c_str());
    std::printf("relative residual    %.3e\n", rep.relative_residual);
    std::printf("definite             %s\n", rep.definite ? "yes" : "no");
    if (matched_material) {
        ErrorNorms e = error_norms(m, dm, sol, mc, -1);
        std::printf("err_u                %.6e\n", e.err_u);
        std::printf("err_sigma            %.6e\n", e.err_sigma);
        std::printf("err_gradu            %.6e\n", e.err_gradu);
    } else {
        std::printf("err_u                n/a (custom mu: data has no closed-form solution)\n");
    }

    if (opt.enforce) {
        bool ok = true;
        if (!(rep.relative_residual < 1e-9)) {
            std::fprintf(stderr, "assertion failed: relative residual %.3e >= 1e-9\n",
                         rep.relative_residual);
            ok = false;
        }
        if (opt.k + 1 >= D && !rep.definite) {
            std::fprintf(stderr, "assertion failed: system for k+1 >= d is not definite\n");
            ok = false;
        }
        if (!ok) return exit_assert;
    }
    return exit_ok;
}

int run_solve(const SolveOptions& opt) {
    using namespace wg;
    if (!opt.mesh_path.empty()) {
        const std::string text = read_file(opt.mesh_path);
        if (wgmesh_dimension(text) == 2) return run_solve_on(import_mesh<2>(text), opt);
        return run_solve_on(import_mesh<3>(text), opt);
    }
    const int n = 1 << opt.level;
    if (opt.case_id == "2d") return run_solve_on(generate_triangle_mesh(n), opt);
    if (opt.case_id == "3d") return run_solve_on(generate_cube_tet_mesh(n), opt);
    if (opt.case_id == "ladder") {
        SolveOptions o = opt;
        o.case_id = "2d";
        return run_solve_on(generate_ladder_mesh(n), o);
    }
    throw Error("unknown case id: " + opt.case_id);
}

struct ConvergenceOptions {
    std::string case_id = "2d";
    std::string family;  ///< "", "triangle", "ladder", "cube"
    int k = 0;
    std::string lambdas = "1";
    std::string levels = "2..4";
    std::string out_path;
    int jobs = 0;
    long dof_budget = 4'000'000;
    int quad_order = -1;
    bool enforce = false;  ///< --assert
};

int run_convergence(const ConvergenceOptions& opt) {
    using namespace wg;
    StudyConfig cfg;
    cfg.case_id = opt.case_id == "ladder" ? "2d" : opt.case_id;
    cfg.k = opt.k;
    cfg.lambdas = parse_lambdas(opt.lambdas);
    cfg.levels = parse_levels(opt.levels);
    cfg.jobs = opt.jobs;
    cfg.dof_budget = opt.dof_budget;
    cfg.quad_order = opt.quad_order;
    std::string family = opt.family;
    if (family.empty()) family = opt.case_id == "ladder" ? "ladder" : "";
    if (family == "triangle")
        cfg.family = MeshFamily::triangle;
    else if (family == "ladder")
        cfg.family = MeshFamily::ladder;
    else if (family == "cube" || (family.empty() && cfg.case_id == "3d"))
        cfg.family = MeshFamily::cube;
    else if (family.empty())
        cfg.family = MeshFamily::triangle;
    else
        throw Error("unknown mesh family: " + family);

    std::vector<StudyRow> rows = convergence_study(cfg);

    if (opt.out_path.empty()) {
        write_csv(std::cout, rows);
    } else {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw Error("cannot open output file: " + opt.out_path);
        write_csv(out, rows);
        std::printf("wrote %zu data rows to %s\n", rows.size(), opt.out_path.c_str());
    }

    for (const auto& r : rows) {
        std::fprintf(stderr, "level %d lambda %g: solver %s, residual %.2e, definite %s\n",
                     r.level, r.lambda, r.method.c_str(), r.residual, r.definite ? "yes" : "no");
    }

    if (opt.enforce) {
        // Final observed rate per lambda group vs. the design rates
        // (displacement k+2, stress k+1), tolerance 0.2.
        bool ok = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const bool last_of_group = i + 1 == rows.size() || rows[i + 1].lambda != rows[i].lambda;
            if (!last_of_group || !rows[i].has_rate) continue;
            const double want_u = cfg.k + 2.0, want_s = cfg.k + 1.0;
            if (std::abs(rows[i].rate_u - want_u) > 0.2) {
                std::fprintf(stderr,
                             "assertion failed: lambda %g final rate_u %.3f outside %.1f +/- 0.2\n",
                             rows[i].lambda, rows[i].rate_u, want_u);
                ok = false;
            }
            if (std::abs(rows[i].rate_sigma - want_s) > 0.2) {
                std::fprintf(stderr,
                             "assertion failed: lambda %g final rate_sigma %.3f outside %.1f +/- 0.2\n",
                             rows[i].lambda, rows[i].rate_sigma, want_s);
                ok = false;
            }
        }
        if (!ok) return exit_assert;
    }
    return exit_ok;
}

template <int D>
int report_mesh(const wg::Mesh<D>& m) {
    using namespace wg;
    RegularityReport rep = check_regularity(m);
    std::size_t n_dir = 0, n_neu = 0;
    double hmin = std::numeric_limits<double>::infinity(), hmax = 0.0;
    for (const auto& f : m.faces) {
        if (f.marker == BoundaryKind::dirichlet) ++n_dir;
        if (f.marker == BoundaryKind::neumann) ++n_neu;
    }
    for (const auto& c : m.cells) {
        hmin = std::min(hmin, c.h);
        hmax = std::max(hmax, c.h);
    }
    std::printf("dimension            %d\n", D);
    std::printf("vertices             %zu\n", m.vertices.size());
    std::printf("cells                %zu\n", m.cells.size());
    std::printf("faces                %zu\n", m.faces.size());
    std::printf("boundary faces       %zu Dirichlet, %zu Neumann\n", n_dir, n_neu);
    std::printf("cell diameter        [%.6g, %.6g]\n", hmin, hmax);
    std::printf("star-shape theta*    %.6g\n", rep.theta_min);
    std::printf("vertex-gap l*        %.6g\n", rep.l_min);
    std::printf("mesh is valid\n");
    return exit_ok;
}

int run_check_mesh(const std::string& path) {
    const std::string text = read_file(path);
    if (wg::wgmesh_dimension(text) == 2) return report_mesh(wg::import_mesh<2>(text));
    return report_mesh(wg::import_mesh<3>(text));
}

int run_selftest() {
    std::vector<wg::CheckResult> results = wg::run_property_suite();
    int failed = 0;
    for (const auto& r : results) {
        std::printf("[%s] %-50s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        if (!r.pass) ++failed;
    }
    std::printf("%zu checks: %zu passed, %d failed\n", results.size(), results.size() - failed,
                failed);
    return failed == 0 ? exit_ok : exit_assert;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Weak Galerkin solver for linear elasticity with symmetric stress.\n"
        "Condensed skeleton systems, locking-free convergence studies."};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Options file with one [section] per subcommand, e.g. [convergence]; place "
                   "the flag before the subcommand");
    app.failure_message(CLI::FailureMessage::help);

    SolveOptions sopt;
    CLI::App* solve = app.add_subcommand("solve", "Solve one problem and print diagnostics");
    solve->add_option("--case", sopt.case_id, "Manufactured case: 2d | 3d | ladder")
        ->default_str("2d");
    solve->add_option("--mesh", sopt.mesh_path, "Solve on a .wgmesh file instead of a case");
    solve->add_option("--level", sopt.level, "Mesh size exponent, n = 2^level")
        ->check(CLI::Range(0, 24));
    solve->add_option("--k", sopt.k, "Stress polynomial degree")->check(CLI::NonNegativeNumber);
    solve->add_option("--lambda", sopt.lambda, "Lame lambda")->check(CLI::PositiveNumber);
    solve->add_option("--mu", sopt.mu, "Lame mu (default: the case's value)")
        ->check(CLI::PositiveNumber);
    solve->add_option("--jobs", sopt.jobs, "Worker threads (0: WG_ELAST_JOBS or 1)");
    solve->add_option("--dof-budget", sopt.dof_budget, "Skeleton DOF cap");
    solve->add_flag("--assert", sopt.enforce,
                    "Exit 2 unless residual < 1e-9 (and definiteness holds for k+1 >= d)");

    ConvergenceOptions copt;
    CLI::App* conv = app.add_subcommand("convergence", "Run a multi-level convergence study");
    conv->add_option("--case", copt.case_id, "Manufactured case: 2d | 3d | ladder")
        ->default_str("2d");
    conv->add_option("--family", copt.family, "Mesh family: triangle | ladder | cube");
    conv->add_option("--k", copt.k, "Stress polynomial degree")->check(CLI::NonNegativeNumber);
    // join(','): config files split comma lists into items; glue them back.
    conv->add_option("--lambda", copt.lambdas, "Comma-separated Lame lambda list, e.g. 1,1e3,1e6")
        ->join(',');
    conv->add_option("--levels", copt.levels, "Level exponents, e.g. 2..7 or 2,3,4")->join(',');
    conv->add_option("--out", copt.out_path, "CSV output path (default: stdout)");
    conv->add_option("--jobs", copt.jobs, "Worker threads (0: WG_ELAST_JOBS or 1)");
    conv->add_option("--dof-budget", copt.dof_budget, "Skeleton DOF cap per solve");
    conv->add_option("--quad-order", copt.quad_order, "Error-integration quadrature override");
    conv->add_flag("--assert", copt.enforce,
                   "Exit 2 unless final rates match k+2 (u) and k+1 (sigma) within 0.2");

    std::string mesh_file;
    CLI::App* check = app.add_subcommand("check-mesh", "Validate a mesh file and report shape");
    check->add_option("--file", mesh_file, "Path to a .wgmesh file")->required();

    app.add_subcommand("selftest", "Run the structural property suite (exit 2 on any failure)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_error;
    }

    try {
        if (app.got_subcommand("solve")) return run_solve(sopt);
        if (app.got_subcommand("convergence")) return run_convergence(copt);
        if (app.got_subcommand("check-mesh")) return run_check_mesh(mesh_file);
        return run_selftest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_error;
    }
}
