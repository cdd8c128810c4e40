// SPDX-License-Identifier: MIT
//
// Minimal library walkthrough: solve the built-in 2D manufactured problem
// on a sequence of uniform triangle meshes at a benign and a nearly
// incompressible lambda, and print the measured errors and rates.  The
// displacement error should shrink ~4x per refinement and the stress error
// ~2x, at both lambda values alike.

#include "wgelast/assembly.hpp"
#include "wgelast/manufactured.hpp"
#include "wgelast/solver.hpp"
#include "wgelast/verify.hpp"

#include <cstdio>

int main() {
    using namespace wg;
    const int k = 0;

    for (double lambda : {1.0, 1e6}) {
        ManufacturedCase<2> mc = make_case_2d(lambda);
        std::printf("lambda = %g\n", lambda);
        std::printf("  %4s  %8s  %12s  %7s  %12s  %7s\n", "n", "dofs", "err_u", "rate",
                    "err_sigma", "rate");
        double prev_u = 0.0, prev_s = 0.0;
        for (int n : {4, 8, 16, 32}) {
            Mesh<2> mesh = generate_triangle_mesh(n);
            DofMap<2> dm = build_dof_map(mesh, k);

            auto zero_neumann = [](const Vec<2>&) { return Vec<2>::Zero().eval(); };
            CondensedSystem<2> sys =
                assemble_global(mesh, dm, mc.lame, mc.f, mc.u, zero_neumann);
            auto [y, report] = solve_sparse_symmetric(sys.K, sys.rhs);
            WgSolution<2> sol = recover_interior(mesh, dm, sys, y);
            ErrorNorms e = error_norms(mesh, dm, sol, mc);

            if (prev_u > 0.0)
                std::printf("  %4d  %8ld  %12.4e  %7.3f  %12.4e  %7.3f\n", n,
                            static_cast<long>(dm.skeleton_total), e.err_u,
                            std::log2(prev_u / e.err_u), e.err_sigma,
                            std::log2(prev_s / e.err_sigma));
            else
                std::printf("  %4d  %8ld  %12.4e  %7s  %12.4e  %7s\n", n,
                            static_cast<long>(dm.skeleton_total), e.err_u, "", e.err_sigma, "");
            prev_u = e.err_u;
            prev_s = e.err_sigma;
        }
        std::printf("\n");
    }
    return 0;
}
