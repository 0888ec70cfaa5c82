#pragma once

#include "ratex/intensity.hpp"
#include "ratex/market.hpp"

#include <cstddef>
#include <functional>

namespace ratex {

/**
 * Time stepping and nonlinear-solve controls shared by the penalty solvers and
 * the PSOR reference pricer.
 *
 * Every run uses Crank-Nicolson in the diffusion/drift/discount operator with a
 * Rannacher start (the first rannacher_half_steps / 2 intervals are replaced by
 * implicit-Euler half steps). The intensity term is always implicit. Both ends
 * of the log-price domain use the linearity condition d2P/ds2 = 0.
 */
struct SolverConfig {
    double newton_tol = 1e-8;          ///< max-norm residual, currency
    int newton_max_iter = 100;
    int max_halvings = 20;             ///< damping budget per Newton iteration
    int rannacher_half_steps = 4;      ///< even, >= 0
    double psor_omega = 1.5;
    double psor_tol = 1e-8;            ///< max-norm update per sweep, currency
    long psor_max_sweeps = 100000;

    /// Tolerances scaled by the strike: 1e-10 * K for Newton and PSOR.
    static SolverConfig defaults_for(const MarketParams& market);

    void validate() const;
};

/// mu(t, s): exercise intensity per year, evaluated on grid nodes.
using IntensityField = std::function<double(double t, double spot)>;

/**
 * Put price when exercise happens at the first jump of a point process with a
 * known intensity mu(t, s). Marches backward from (K - s)^+ at T; each step is
 * one tridiagonal solve.
 *
 * Throws InputError when mu is negative or non-finite on a node, and
 * NumericalError (with the time row) when the step matrix loses diagonal
 * dominance or the result leaves [0, K].
 */
PriceSurface solve_exogenous(const MarketParams& market, const GridSpec& grid,
                             const IntensityField& mu, const SolverConfig& cfg);

struct NewtonStats {
    int max_iterations = 0;    ///< worst Newton iteration count over all steps
    long total_iterations = 0;
    int max_halvings = 0;      ///< deepest damping used
};

struct RationalSolution {
    PriceSurface surface;
    NewtonStats stats;
};

/**
 * Fixed-point price P_theta: the intensity is f_theta((K - s)^+ - P_theta)
 * evaluated on the unknown itself. Each step solves the nonlinear system by
 * Newton's method with an analytic Jacobian, starting from the previous row,
 * halving the step when the residual does not decrease.
 *
 * Throws NumericalError with the failing row and residual when Newton does not
 * reach cfg.newton_tol.
 */
RationalSolution solve_rational_detailed(const MarketParams& market, const GridSpec& grid,
                                         const IntensityFamily& family, const SolverConfig& cfg);

PriceSurface solve_rational(const MarketParams& market, const GridSpec& grid,
                            const IntensityFamily& family, const SolverConfig& cfg);

}  // namespace ratex
