#pragma once

#include "ratex/market.hpp"
#include "ratex/penalty_pde.hpp"

#include <cstddef>
#include <vector>

namespace ratex {

/// Standard normal CDF via erfc.
double normal_cdf(double z);

/**
 * Black-Scholes European put K e^{-r(T-t)} N(-d2) - s N(-d1).
 * Throws DomainError for t >= T (use put_payoff there) or s <= 0.
 */
double european_put(const MarketParams& market, double t, double spot);

/**
 * Put exercised at an independent exponential clock of rate lambda:
 *
 *   int_0^tau lambda e^{-lambda u} EP(u) du + e^{-lambda tau} EP(tau),
 *
 * with tau = T - t and EP(u) the European put with horizon u. Integrated in
 * w = sqrt(u), which removes the square-root behaviour of EP near u = 0,
 * with adaptive Gauss-Kronrod.
 */
double constant_intensity_quadrature(const MarketParams& market, double lambda, double t,
                                     double spot);

/// Cox-Ross-Rubinstein tree with early exercise at every node.
double binomial_american(const MarketParams& market, double t, double spot, std::size_t steps);

struct AmericanSolution {
    PriceSurface surface;
    /// Critical price y_u per time row (0 when no node is in the exercise region).
    std::vector<double> boundary;
    /// Node index of y_u per row, -1 when absent.
    std::vector<long> boundary_node;
};

/**
 * American put on the same grid and time stepping as the penalty solvers: the
 * discrete linear complementarity problem of each step is solved by projected
 * SOR. The exercise boundary is the largest in-the-money node of each row whose
 * value is within 10 * psor_tol of the payoff.
 *
 * Throws NumericalError when a step needs more than cfg.psor_max_sweeps sweeps.
 */
AmericanSolution psor_american(const MarketParams& market, const GridSpec& grid,
                               const SolverConfig& cfg);

/// Writes the boundary as CSV `t,y`, one line per time row from t = 0.
void write_boundary_csv(const AmericanSolution& solution, std::ostream& out);

}  // namespace ratex
