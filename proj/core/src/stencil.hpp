#pragma once

// Discrete Black-Scholes operator in log-moneyness shared by the penalty
// solvers and PSOR. Not installed.

#include "ratex/market.hpp"
#include "ratex/penalty_pde.hpp"
#include "ratex/tridiagonal.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ratex::detail {

/**
 * Bands of A in V_tau = A V, tau = T - t:
 *   interior   (sigma^2/2) V_xx + (r - sigma^2/2) V_x - r V, central differences
 *   ends       r s V_s - r V, with s V_s differenced one-sidedly in s so that
 *              functions affine in s are reproduced exactly (d2P/ds2 = 0)
 */
class Stencil {
public:
    Stencil(const MarketParams& market, const GridSpec& grid);

    std::size_t size() const noexcept { return a_.size(); }

    /// I - weight * h * A
    TridiagonalMatrix implicit_matrix(double h, double weight) const;

    /// out = (I + (1 - weight) * h * A) v
    void apply_explicit(double h, double weight, std::span<const double> v,
                        std::span<double> out) const;

private:
    TridiagonalMatrix a_;
};

/// One backward sub-step toward an earlier time.
struct Substep {
    double h;        ///< tau increment
    double weight;   ///< implicit weight: 1 = Euler, 0.5 = Crank-Nicolson
    double t_new;    ///< calendar time reached by the sub-step
};

/// Sub-steps carrying row + 1 to row (1 Crank-Nicolson step or 2 Euler half steps).
std::vector<Substep> substeps_for_row(std::size_t row, const MarketParams& market,
                                      const GridSpec& grid, const SolverConfig& cfg);

/// (K - s_j)^+ on every node.
std::vector<double> payoff_row(const MarketParams& market, const GridSpec& grid);

/// Checks 0 <= v <= K up to a small tolerance, then clamps exactly into range.
/// Throws NumericalError naming the row otherwise.
void enforce_bounds(std::span<double> v, double strike, std::size_t row);

}  // namespace ratex::detail
