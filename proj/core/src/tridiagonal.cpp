#include "ratex/tridiagonal.hpp"

#include <cmath>

namespace ratex {

void TridiagonalMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + upper[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        y[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
    }
    y[n - 1] = lower[n - 1] * x[n - 2] + diag[n - 1] * x[n - 1];
}

std::optional<std::size_t> TridiagonalMatrix::dominance_violation() const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(lower[i]) : 0.0) + (i + 1 < n ? std::abs(upper[i]) : 0.0);
        if (!(std::abs(diag[i]) >= off)) return i;
    }
    return std::nullopt;
}

bool solve_tridiagonal(const TridiagonalMatrix& a, std::span<double> rhs,
                       std::span<double> scratch) {
    const std::size_t n = a.size();
    double pivot = a.diag[0];
    if (!(std::isfinite(pivot) && pivot != 0.0)) return false;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i - 1] = a.upper[i - 1] / pivot;
        pivot = a.diag[i] - a.lower[i] * scratch[i - 1];
        if (!(std::isfinite(pivot) && pivot != 0.0)) return false;
        rhs[i] = (rhs[i] - a.lower[i] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
    return true;
}

}  // namespace ratex
