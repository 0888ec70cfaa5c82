#include "ratex/penalty_pde.hpp"

#include "ratex/errors.hpp"
#include "stencil.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ratex {

SolverConfig SolverConfig::defaults_for(const MarketParams& market) {
    SolverConfig cfg;
    cfg.newton_tol = 1e-10 * market.strike;
    cfg.psor_tol = 1e-10 * market.strike;
    return cfg;
}

void SolverConfig::validate() const {
    if (!(newton_tol > 0.0)) throw ArgumentError("solver: newton_tol must be > 0");
    if (newton_max_iter < 1) throw ArgumentError("solver: newton_max_iter must be >= 1");
    if (max_halvings < 0) throw ArgumentError("solver: max_halvings must be >= 0");
    if (rannacher_half_steps < 0 || rannacher_half_steps % 2 != 0) {
        throw ArgumentError("solver: rannacher_half_steps must be even and >= 0");
    }
    if (!(psor_omega > 0.0 && psor_omega < 2.0)) throw ArgumentError("solver: psor_omega must be in (0, 2)");
    if (!(psor_tol > 0.0)) throw ArgumentError("solver: psor_tol must be > 0");
    if (psor_max_sweeps < 1) throw ArgumentError("solver: psor_max_sweeps must be >= 1");
}

namespace {

void validate_inputs(const MarketParams& market, const GridSpec& grid, const SolverConfig& cfg) {
    market.validate();
    grid.validate();
    cfg.validate();
}

}  // namespace

PriceSurface solve_exogenous(const MarketParams& market, const GridSpec& grid,
                             const IntensityField& mu, const SolverConfig& cfg) {
    validate_inputs(market, grid, cfg);
    const std::size_t n = grid.n_space;
    const detail::Stencil stencil(market, grid);
    const std::vector<double> payoff = detail::payoff_row(market, grid);
    std::vector<double> spots(n);
    for (std::size_t j = 0; j < n; ++j) spots[j] = grid.spot(j);

    std::vector<double> values((grid.n_time + 1) * n);
    std::copy(payoff.begin(), payoff.end(), values.begin() + static_cast<std::ptrdiff_t>(grid.n_time * n));

    std::vector<double> v(payoff);
    std::vector<double> rhs(n);
    std::vector<double> scratch(n);
    std::vector<double> rate(n);

    for (std::size_t row = grid.n_time; row-- > 0;) {
        for (const detail::Substep& step : detail::substeps_for_row(row, market, grid, cfg)) {
            for (std::size_t j = 0; j < n; ++j) {
                rate[j] = mu(step.t_new, spots[j]);
                if (!(std::isfinite(rate[j]) && rate[j] >= 0.0)) {
                    throw InputError(fmt::format(
                        "solve_exogenous: intensity {} at t={} s={} is not finite and >= 0",
                        rate[j], step.t_new, spots[j]));
                }
            }
            TridiagonalMatrix m = stencil.implicit_matrix(step.h, step.weight);
            stencil.apply_explicit(step.h, step.weight, v, rhs);
            for (std::size_t j = 0; j < n; ++j) {
                m.diag[j] += step.h * rate[j];
                rhs[j] += step.h * rate[j] * payoff[j];
            }
            if (auto bad = m.dominance_violation()) {
                throw NumericalError(
                    fmt::format("solve_exogenous: diagonal dominance lost at row {} node {}", row, *bad),
                    row, 0.0);
            }
            if (!solve_tridiagonal(m, rhs, scratch)) {
                throw NumericalError(fmt::format("solve_exogenous: zero pivot at row {}", row), row, 0.0);
            }
            v.swap(rhs);
        }
        detail::enforce_bounds(v, market.strike, row);
        std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(row * n));
    }
    return PriceSurface(grid, market, std::move(values));
}

namespace {

// Residual F(V) = M V - rhs - h psi(p - V), psi(g) = f(g) g.
double residual(const TridiagonalMatrix& m, const IntensityFamily& family, double h,
                std::span<const double> v, std::span<const double> rhs,
                std::span<const double> payoff, std::span<double> out) {
    m.multiply(v, out);
    double worst = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double gap = payoff[j] - v[j];
        out[j] -= rhs[j] + h * eval_f(family, gap) * gap;
        worst = std::max(worst, std::abs(out[j]));
    }
    return std::isfinite(worst) ? worst : HUGE_VAL;
}

}  // namespace

RationalSolution solve_rational_detailed(const MarketParams& market, const GridSpec& grid,
                                         const IntensityFamily& family, const SolverConfig& cfg) {
    validate_inputs(market, grid, cfg);
    family.validate();
    const std::size_t n = grid.n_space;
    const detail::Stencil stencil(market, grid);
    const std::vector<double> payoff = detail::payoff_row(market, grid);

    std::vector<double> values((grid.n_time + 1) * n);
    std::copy(payoff.begin(), payoff.end(), values.begin() + static_cast<std::ptrdiff_t>(grid.n_time * n));

    std::vector<double> v(payoff);
    std::vector<double> rhs(n);
    std::vector<double> f(n);
    std::vector<double> f_trial(n);
    std::vector<double> delta(n);
    std::vector<double> trial(n);
    std::vector<double> scratch(n);
    NewtonStats stats;

    for (std::size_t row = grid.n_time; row-- > 0;) {
        for (const detail::Substep& step : detail::substeps_for_row(row, market, grid, cfg)) {
            const TridiagonalMatrix m = stencil.implicit_matrix(step.h, step.weight);
            stencil.apply_explicit(step.h, step.weight, v, rhs);

            double res = residual(m, family, step.h, v, rhs, payoff, f);
            int iter = 0;
            while (res >= cfg.newton_tol) {
                if (iter == cfg.newton_max_iter) {
                    throw NumericalError(
                        fmt::format("solve_rational: Newton did not converge at row {} "
                                    "(theta={}, residual={:.3e} after {} iterations)",
                                    row, family.theta, res, iter),
                        row, res);
                }
                ++iter;
                TridiagonalMatrix jac = m;
                for (std::size_t j = 0; j < n; ++j) {
                    const double gap = payoff[j] - v[j];
                    jac.diag[j] += step.h * (eval_f(family, gap) + eval_df(family, gap) * gap);
                    delta[j] = -f[j];
                }
                if (!solve_tridiagonal(jac, delta, scratch)) {
                    throw NumericalError(
                        fmt::format("solve_rational: singular Jacobian at row {}", row), row, res);
                }
                double lambda = 1.0;
                int halvings = 0;
                for (;;) {
                    for (std::size_t j = 0; j < n; ++j) trial[j] = v[j] + lambda * delta[j];
                    const double trial_res = residual(m, family, step.h, trial, rhs, payoff, f_trial);
                    if (trial_res < res) {
                        res = trial_res;
                        break;
                    }
                    if (halvings == cfg.max_halvings) {
                        throw NumericalError(
                            fmt::format("solve_rational: damped Newton stalled at row {} "
                                        "(theta={}, residual={:.3e})",
                                        row, family.theta, res),
                            row, res);
                    }
                    ++halvings;
                    lambda *= 0.5;
                }
                stats.max_halvings = std::max(stats.max_halvings, halvings);
                v.swap(trial);
                f.swap(f_trial);
            }
            stats.max_iterations = std::max(stats.max_iterations, iter);
            stats.total_iterations += iter;
        }
        detail::enforce_bounds(v, market.strike, row);
        std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(row * n));
    }
    return {PriceSurface(grid, market, std::move(values)), stats};
}

PriceSurface solve_rational(const MarketParams& market, const GridSpec& grid,
                            const IntensityFamily& family, const SolverConfig& cfg) {
    return solve_rational_detailed(market, grid, family, cfg).surface;
}

}  // namespace ratex
