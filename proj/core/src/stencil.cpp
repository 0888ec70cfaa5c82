#include "stencil.hpp"

#include "ratex/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ratex::detail {

Stencil::Stencil(const MarketParams& market, const GridSpec& grid) : a_(grid.n_space) {
    const std::size_t n = grid.n_space;
    const double dx = grid.dx();
    const double half_var = 0.5 * market.sigma * market.sigma;
    const double diffusion = half_var / (dx * dx);
    const double drift = (market.r - half_var) / (2.0 * dx);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        a_.lower[j] = diffusion - drift;
        a_.diag[j] = -2.0 * diffusion - market.r;
        a_.upper[j] = diffusion + drift;
    }
    // s V_s ~ (V_1 - V_0) / (e^dx - 1) at the left end, (V_n-1 - V_n-2) / (1 - e^-dx)
    // at the right end; both exact for V affine in s.
    const double left = market.r / std::expm1(dx);
    const double right = market.r / -std::expm1(-dx);
    a_.diag[0] = -left - market.r;
    a_.upper[0] = left;
    a_.lower[n - 1] = -right;
    a_.diag[n - 1] = right - market.r;
}

TridiagonalMatrix Stencil::implicit_matrix(double h, double weight) const {
    TridiagonalMatrix m(size());
    const double c = weight * h;
    for (std::size_t j = 0; j < size(); ++j) {
        m.lower[j] = -c * a_.lower[j];
        m.diag[j] = 1.0 - c * a_.diag[j];
        m.upper[j] = -c * a_.upper[j];
    }
    return m;
}

void Stencil::apply_explicit(double h, double weight, std::span<const double> v,
                             std::span<double> out) const {
    const double c = (1.0 - weight) * h;
    if (c == 0.0) {
        std::copy(v.begin(), v.end(), out.begin());
        return;
    }
    a_.multiply(v, out);
    for (std::size_t j = 0; j < size(); ++j) out[j] = v[j] + c * out[j];
}

std::vector<Substep> substeps_for_row(std::size_t row, const MarketParams& market,
                                      const GridSpec& grid, const SolverConfig& cfg) {
    const double dt = market.expiry / static_cast<double>(grid.n_time);
    const std::size_t steps_from_expiry = grid.n_time - 1 - row;
    const double t_new = static_cast<double>(row) * dt;
    const double t_old = row + 1 == grid.n_time ? market.expiry : t_new + dt;
    if (2 * steps_from_expiry < static_cast<std::size_t>(cfg.rannacher_half_steps)) {
        const double h = 0.5 * (t_old - t_new);
        return {{h, 1.0, t_old - h}, {h, 1.0, t_new}};
    }
    return {{t_old - t_new, 0.5, t_new}};
}

std::vector<double> payoff_row(const MarketParams& market, const GridSpec& grid) {
    std::vector<double> p(grid.n_space);
    for (std::size_t j = 0; j < grid.n_space; ++j) {
        p[j] = std::max(market.strike - grid.spot(j), 0.0);
    }
    return p;
}

void enforce_bounds(std::span<double> v, double strike, std::size_t row) {
    const double slack = 1e-6 * strike;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (!(v[j] >= -slack && v[j] <= strike + slack)) {
            throw NumericalError(
                fmt::format("value {} at row {} node {} violates 0 <= P <= K", v[j], row, j), row,
                v[j]);
        }
        v[j] = std::clamp(v[j], 0.0, strike);
    }
}

}  // namespace ratex::detail
