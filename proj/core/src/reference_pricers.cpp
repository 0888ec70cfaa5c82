#include "ratex/reference_pricers.hpp"

#include "ratex/errors.hpp"
#include "stencil.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ratex {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// European put with time to expiry tau; the payoff when tau <= 0.
double put_with_horizon(const MarketParams& m, double tau, double spot) {
    if (tau <= 0.0) return std::max(m.strike - spot, 0.0);
    if (spot <= 0.0) return m.strike * std::exp(-m.r * tau);
    const double vol = m.sigma * std::sqrt(tau);
    const double d1 = (std::log(spot / m.strike) + (m.r + 0.5 * m.sigma * m.sigma) * tau) / vol;
    const double d2 = d1 - vol;
    return m.strike * std::exp(-m.r * tau) * normal_cdf(-d2) - spot * normal_cdf(-d1);
}

}  // namespace

double european_put(const MarketParams& market, double t, double spot) {
    market.validate();
    if (!(t < market.expiry)) throw DomainError("european_put: t must be < T (use put_payoff at expiry)");
    if (!(spot > 0.0)) throw DomainError("european_put: spot must be > 0");
    return put_with_horizon(market, market.expiry - t, spot);
}

double constant_intensity_quadrature(const MarketParams& market, double lambda, double t,
                                     double spot) {
    market.validate();
    if (!(lambda >= 0.0 && std::isfinite(lambda))) throw DomainError("quadrature: lambda must be >= 0");
    if (!(spot >= 0.0)) throw DomainError("quadrature: spot must be >= 0");
    const double tau = market.expiry - t;
    if (!(tau >= 0.0)) throw DomainError("quadrature: t must be <= T");
    const double tail = std::exp(-lambda * tau) * put_with_horizon(market, tau, spot);
    if (lambda == 0.0 || tau == 0.0) return tail;

    using boost::math::quadrature::gauss_kronrod;
    // u = w^2, du = 2 w dw
    auto integrand = [&](double w) {
        const double u = w * w;
        return 2.0 * w * lambda * std::exp(-lambda * u) * put_with_horizon(market, u, spot);
    };
    const double w_end = std::sqrt(tau);
    // The clock density decays on the scale u ~ 1/lambda; split there so the
    // adaptive rule sees the bulk of the mass on its own panel.
    const double w_split = std::min(w_end, std::sqrt(30.0 / lambda));
    double body = gauss_kronrod<double, 61>::integrate(integrand, 0.0, w_split, 20, 1e-13);
    if (w_split < w_end) {
        body += gauss_kronrod<double, 61>::integrate(integrand, w_split, w_end, 20, 1e-13);
    }
    return body + tail;
}

double binomial_american(const MarketParams& market, double t, double spot, std::size_t steps) {
    market.validate();
    if (steps < 1) throw ArgumentError("binomial_american: steps must be >= 1");
    if (!(spot >= 0.0)) throw DomainError("binomial_american: spot must be >= 0");
    const double tau = market.expiry - t;
    if (tau <= 0.0) return put_payoff(spot, market.strike);

    const double dt = tau / static_cast<double>(steps);
    const double log_up = market.sigma * std::sqrt(dt);
    const double up = std::exp(log_up);
    const double down = 1.0 / up;
    const double growth = std::exp(market.r * dt);
    const double p_up = (growth - down) / (up - down);
    const double disc_up = p_up / growth;
    const double disc_down = (1.0 - p_up) / growth;

    // level[k] = spot * up^(k - steps); node (i, j) with j down moves sits at k = i - 2j + steps.
    std::vector<double> level(2 * steps + 1);
    for (std::size_t k = 0; k < level.size(); ++k) {
        level[k] = spot * std::exp((static_cast<double>(k) - static_cast<double>(steps)) * log_up);
    }
    std::vector<double> v(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) {
        v[j] = std::max(market.strike - level[2 * (steps - j)], 0.0);
    }
    for (std::size_t i = steps; i-- > 0;) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double hold = disc_up * v[j] + disc_down * v[j + 1];
            const double exercise = market.strike - level[i - 2 * j + steps];
            v[j] = std::max(hold, exercise);
        }
    }
    return v[0];
}

AmericanSolution psor_american(const MarketParams& market, const GridSpec& grid,
                               const SolverConfig& cfg) {
    market.validate();
    grid.validate();
    cfg.validate();
    const std::size_t n = grid.n_space;
    const detail::Stencil stencil(market, grid);
    const std::vector<double> payoff = detail::payoff_row(market, grid);

    std::vector<double> values((grid.n_time + 1) * n);
    std::copy(payoff.begin(), payoff.end(), values.begin() + static_cast<std::ptrdiff_t>(grid.n_time * n));

    std::vector<double> v(payoff);
    std::vector<double> rhs(n);
    const double omega = cfg.psor_omega;

    for (std::size_t row = grid.n_time; row-- > 0;) {
        for (const detail::Substep& step : detail::substeps_for_row(row, market, grid, cfg)) {
            const TridiagonalMatrix m = stencil.implicit_matrix(step.h, step.weight);
            stencil.apply_explicit(step.h, step.weight, v, rhs);
            for (std::size_t j = 0; j < n; ++j) v[j] = std::max(v[j], payoff[j]);
            long sweep = 0;
            for (;;) {
                if (sweep == cfg.psor_max_sweeps) {
                    throw NumericalError(
                        fmt::format("psor_american: no convergence after {} sweeps at row {}", sweep, row),
                        row, 0.0);
                }
                ++sweep;
                double change = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    double sum = rhs[j];
                    if (j > 0) sum -= m.lower[j] * v[j - 1];
                    if (j + 1 < n) sum -= m.upper[j] * v[j + 1];
                    const double gs = sum / m.diag[j];
                    const double next = std::max(payoff[j], v[j] + omega * (gs - v[j]));
                    change = std::max(change, std::abs(next - v[j]));
                    v[j] = next;
                }
                if (change < cfg.psor_tol) break;
            }
        }
        detail::enforce_bounds(v, market.strike, row);
        std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(row * n));
    }

    AmericanSolution out{PriceSurface(grid, market, std::move(values)), {}, {}};
    const double contact = 10.0 * cfg.psor_tol;
    for (std::size_t row = 0; row < out.surface.n_rows(); ++row) {
        long node = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (payoff[j] > 0.0 && std::abs(out.surface.at(row, j) - payoff[j]) < contact) {
                node = static_cast<long>(j);
            }
        }
        out.boundary_node.push_back(node);
        out.boundary.push_back(node < 0 ? 0.0 : grid.spot(static_cast<std::size_t>(node)));
    }
    return out;
}

void write_boundary_csv(const AmericanSolution& solution, std::ostream& out) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "t,y\n");
    for (std::size_t i = 0; i < solution.boundary.size(); ++i) {
        fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g}\n", solution.surface.time(i),
                       solution.boundary[i]);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write_boundary_csv: stream write failed");
}

}  // namespace ratex
