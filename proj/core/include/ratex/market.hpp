#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ratex {

/// Black-Scholes market and put contract constants.
struct MarketParams {
    double r = 0.05;       ///< risk-free rate per year, >= 0
    double sigma = 0.2;    ///< volatility per sqrt(year), > 0
    double strike = 100.0; ///< K, > 0
    double expiry = 1.0;   ///< T in years, > 0

    /// Throws ArgumentError when any invariant fails.
    void validate() const;

    friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

/**
 * Uniform grid in log-moneyness x = ln(s/K) and calendar time t.
 *
 * The spatial nodes are x_j = x0 + (j - mid) * dx with x0 = ln(anchor_spot/K)
 * and mid = (n_space - 1) / 2, so the anchor spot sits exactly on the middle
 * node. Time rows are t_i = i * T / n_time, i = 0..n_time.
 */
struct GridSpec {
    std::size_t n_space = 801;
    std::size_t n_time = 2000;
    double log_half_width = 1.6;
    double anchor_spot = 100.0;

    void validate() const;

    /// Default grid for a market: L = 8 * sigma * sqrt(T), 801 x 2000 nodes.
    static GridSpec defaults_for(const MarketParams& market, double anchor_spot);

    /// Same anchor and width with both spacings halved.
    GridSpec refined() const;

    std::size_t mid_index() const { return (n_space - 1) / 2; }
    double dx() const { return 2.0 * log_half_width / static_cast<double>(n_space - 1); }

    /// Spot at a node; returns anchor_spot exactly at mid_index().
    double spot(std::size_t node) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// (K - s)^+. Throws DomainError for s < 0 or strike <= 0.
double put_payoff(double spot, double strike);

/**
 * Discretized P(t, s) on a GridSpec. Values are stored time-major: row i holds
 * t_i for i = 0..n_time, each row has n_space entries ordered by increasing s.
 * Immutable after construction.
 */
class PriceSurface {
public:
    PriceSurface(GridSpec grid, MarketParams market, std::vector<double> values);

    const GridSpec& grid() const noexcept { return grid_; }
    const MarketParams& market() const noexcept { return market_; }

    std::size_t n_space() const noexcept { return grid_.n_space; }
    std::size_t n_rows() const noexcept { return grid_.n_time + 1; }

    double dt() const noexcept { return market_.expiry / static_cast<double>(grid_.n_time); }
    double time(std::size_t row) const;
    double log_moneyness(std::size_t node) const;
    double spot(std::size_t node) const;

    double x_min() const { return log_moneyness(0); }
    double x_max() const { return log_moneyness(n_space() - 1); }
    double s_min() const { return spot(0); }
    double s_max() const { return spot(n_space() - 1); }

    double at(std::size_t row, std::size_t node) const { return values_[row * n_space() + node]; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * n_space(), n_space()};
    }
    std::span<const double> values() const noexcept { return values_; }

    /// Value at the anchor spot at t = 0.
    double anchor_value() const { return at(0, grid_.mid_index()); }

private:
    GridSpec grid_;
    MarketParams market_;
    std::vector<double> values_;
    double x0_;
};

/// Bilinear interpolation: linear in t between rows, linear in x = ln(s/K)
/// between nodes. Throws ExtrapolationError outside [0, T] x [s_min, s_max].
double interpolate(const PriceSurface& surface, double t, double spot);

/// Same as interpolate() with the spatial coordinate given as x = ln(s/K).
double interpolate_log(const PriceSurface& surface, double t, double x);

/// Writes the surface as CSV `t,s,value`, time-major, 17 significant digits.
void write_surface_csv(const PriceSurface& surface, std::ostream& out);
void write_surface_csv(const PriceSurface& surface, const std::string& path);

/// Decimal rendering used by every CSV writer: 17 significant digits.
std::string format_number(double value);

}  // namespace ratex
