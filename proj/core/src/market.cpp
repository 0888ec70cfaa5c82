#include "ratex/market.hpp"

#include "ratex/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace ratex {

void MarketParams::validate() const {
    if (!(std::isfinite(r) && r >= 0.0)) throw ArgumentError("market: r must be finite and >= 0");
    if (!(std::isfinite(sigma) && sigma > 0.0)) throw ArgumentError("market: sigma must be > 0");
    if (!(std::isfinite(strike) && strike > 0.0)) throw ArgumentError("market: strike must be > 0");
    if (!(std::isfinite(expiry) && expiry > 0.0)) throw ArgumentError("market: expiry must be > 0");
}

void GridSpec::validate() const {
    if (n_space < 3 || n_space % 2 == 0) {
        throw ArgumentError("grid: n_space must be an odd integer >= 3");
    }
    if (n_time < 1) throw ArgumentError("grid: n_time must be >= 1");
    if (!(std::isfinite(log_half_width) && log_half_width > 0.0)) {
        throw ArgumentError("grid: log_half_width must be > 0");
    }
    if (!(std::isfinite(anchor_spot) && anchor_spot > 0.0)) {
        throw ArgumentError("grid: anchor_spot must be > 0");
    }
}

GridSpec GridSpec::defaults_for(const MarketParams& market, double anchor_spot) {
    GridSpec g;
    g.log_half_width = 8.0 * market.sigma * std::sqrt(market.expiry);
    g.anchor_spot = anchor_spot;
    return g;
}

GridSpec GridSpec::refined() const {
    GridSpec g = *this;
    g.n_space = 2 * (n_space - 1) + 1;
    g.n_time = 2 * n_time;
    return g;
}

double GridSpec::spot(std::size_t node) const {
    const auto offset = static_cast<double>(node) - static_cast<double>(mid_index());
    return anchor_spot * std::exp(offset * dx());
}

double put_payoff(double spot, double strike) {
    if (!(spot >= 0.0)) throw DomainError("put_payoff: spot must be >= 0");
    if (!(strike > 0.0)) throw DomainError("put_payoff: strike must be > 0");
    return std::max(strike - spot, 0.0);
}

PriceSurface::PriceSurface(GridSpec grid, MarketParams market, std::vector<double> values)
    : grid_(grid), market_(market), values_(std::move(values)) {
    grid_.validate();
    market_.validate();
    if (values_.size() != n_rows() * n_space()) {
        throw InputError("PriceSurface: value count does not match grid");
    }
    x0_ = std::log(grid_.anchor_spot / market_.strike);
}

double PriceSurface::time(std::size_t row) const {
    if (row == grid_.n_time) return market_.expiry;
    return static_cast<double>(row) * dt();
}

double PriceSurface::log_moneyness(std::size_t node) const {
    const auto offset = static_cast<double>(node) - static_cast<double>(grid_.mid_index());
    return x0_ + offset * grid_.dx();
}

double PriceSurface::spot(std::size_t node) const { return grid_.spot(node); }

namespace {

// Locates v in [lo, lo + h * n] as a cell index and weight. Coordinates within
// 1e-9 cells of a node snap onto it, which also absorbs rounding at the ends.
bool locate(double v, double lo, double h, std::size_t n_cells, std::size_t& cell, double& w) {
    const double u = (v - lo) / h;
    constexpr double slack = 1e-9;
    const auto n = static_cast<double>(n_cells);
    if (!(u >= -slack && u <= n + slack)) return false;
    double uc = std::clamp(u, 0.0, n);
    if (const double nearest = std::round(uc); std::abs(uc - nearest) < slack) uc = nearest;
    cell = std::min(static_cast<std::size_t>(uc), n_cells - 1);
    w = uc - static_cast<double>(cell);
    return true;
}

}  // namespace

double interpolate_log(const PriceSurface& surface, double t, double x) {
    std::size_t row = 0;
    std::size_t node = 0;
    double wt = 0.0;
    double wx = 0.0;
    if (!locate(t, 0.0, surface.dt(), surface.grid().n_time, row, wt)) {
        throw ExtrapolationError(fmt::format("interpolate: t={} outside [0, {}]", t,
                                             surface.market().expiry));
    }
    if (!locate(x, surface.x_min(), surface.grid().dx(), surface.n_space() - 1, node, wx)) {
        throw ExtrapolationError(fmt::format("interpolate: x={} outside [{}, {}]", x,
                                             surface.x_min(), surface.x_max()));
    }
    const double v00 = surface.at(row, node);
    const double v01 = surface.at(row, node + 1);
    const double v10 = surface.at(row + 1, node);
    const double v11 = surface.at(row + 1, node + 1);
    const double lower = v00 + wx * (v01 - v00);
    const double upper = v10 + wx * (v11 - v10);
    return lower + wt * (upper - lower);
}

double interpolate(const PriceSurface& surface, double t, double spot) {
    if (!(spot > 0.0)) throw ExtrapolationError("interpolate: spot must be > 0");
    return interpolate_log(surface, t, std::log(spot / surface.market().strike));
}

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

void write_surface_csv(const PriceSurface& surface, std::ostream& out) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "t,s,value\n");
    for (std::size_t i = 0; i < surface.n_rows(); ++i) {
        const double t = surface.time(i);
        for (std::size_t j = 0; j < surface.n_space(); ++j) {
            fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{:.17g}\n", t,
                           surface.spot(j), surface.at(i, j));
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write_surface_csv: stream write failed");
}

void write_surface_csv(const PriceSurface& surface, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_surface_csv(surface, out);
}

}  // namespace ratex
