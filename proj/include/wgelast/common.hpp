// SPDX-License-Identifier: MIT
//
// Shared basics: error types, multi-index enumeration, small helpers.

#ifndef WGELAST_COMMON_HPP
#define WGELAST_COMMON_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wg {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;
template <int D>
using Mat = Eigen::Matrix<double, D, D>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

// --------------------------------------------------------------------------
// Error types
// --------------------------------------------------------------------------

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
    ParseError(int line_no, const std::string& msg)
        : Error("parse error at line " + std::to_string(line_no) + ": " + msg),
          line(line_no) {}
    int line;
};

/// Structurally invalid mesh (dangling ids, unmatched faces, ...).
struct TopologyError : Error {
    explicit TopologyError(const std::string& msg) : Error("topology error: " + msg) {}
};

/// Cell is not star-shaped with respect to its chosen star center.
struct NonStarShapedError : Error {
    explicit NonStarShapedError(const std::string& msg)
        : Error("non-star-shaped cell: " + msg) {}
};

/// Requested quadrature order exceeds what the rule family supports.
struct UnsupportedOrderError : Error {
    explicit UnsupportedOrderError(const std::string& msg)
        : Error("unsupported quadrature order: " + msg) {}
};

/// A study would exceed the configured degree-of-freedom budget.
struct BudgetExceededError : Error {
    explicit BudgetExceededError(const std::string& msg)
        : Error("budget exceeded: " + msg) {}
};

/// Linear solver failure (factorization breakdown or bad residual).
struct SolverError : Error {
    explicit SolverError(const std::string& msg) : Error("solver error: " + msg) {}
};

// --------------------------------------------------------------------------
// Multi-indices for polynomial spaces
// --------------------------------------------------------------------------

/// dim P_j(R^d) = C(j + d, d).
inline int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

inline int poly_space_dim(int dim, int degree) {
    return binomial(degree + dim, dim);
}

/// All exponent vectors with |alpha| <= degree, ordered by total degree,
/// lexicographically within a degree. The ordering is part of the library's
/// deterministic contract (basis coefficients are exchanged by position).
template <int D>
std::vector<std::array<int, D>> multi_indices(int degree) {
    std::vector<std::array<int, D>> out;
    out.reserve(static_cast<std::size_t>(poly_space_dim(D, degree)));
    for (int total = 0; total <= degree; ++total) {
        if constexpr (D == 1) {
            out.push_back({total});
        } else if constexpr (D == 2) {
            for (int a = total; a >= 0; --a) out.push_back({a, total - a});
        } else {
            static_assert(D == 3);
            for (int a = total; a >= 0; --a)
                for (int b = total - a; b >= 0; --b) out.push_back({a, b, total - a - b});
        }
    }
    return out;
}

/// Number of independent entries of a symmetric d x d tensor.
constexpr int sym_dim(int d) { return d * (d + 1) / 2; }

}  // namespace wg

#endif  // WGELAST_COMMON_HPP
