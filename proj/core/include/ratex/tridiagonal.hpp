#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ratex {

/// Tridiagonal matrix in band storage. lower[0] and upper[n-1] are ignored.
struct TridiagonalMatrix {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    explicit TridiagonalMatrix(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// First row with |d_i| < |l_i| + |u_i| (weak dominance lost), if any.
    std::optional<std::size_t> dominance_violation() const;
};

/**
 * Thomas algorithm. Overwrites `rhs` with the solution; `scratch` must hold
 * size() doubles. Returns false if a pivot is zero or non-finite.
 */
bool solve_tridiagonal(const TridiagonalMatrix& a, std::span<double> rhs,
                       std::span<double> scratch);

}  // namespace ratex
