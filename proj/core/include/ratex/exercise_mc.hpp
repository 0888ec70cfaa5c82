#pragma once

#include "ratex/intensity.hpp"
#include "ratex/market.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace ratex {

struct MCConfig {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 500;
    std::uint64_t seed = 42;
    bool antithetic = true;
    /// Worker threads; 0 picks hardware_concurrency(). Results do not depend on it.
    unsigned threads = 0;

    void validate() const;
};

struct MCEstimate {
    double price = 0.0;
    double std_error = 0.0;
    double exercise_fraction = 0.0;   ///< share of paths exercised before T
    double mean_exercise_time = 0.0;  ///< years, over exercised paths (0 if none)
};

/**
 * Running integral of a piecewise-linear intensity, compared against a unit
 * exponential draw. advance() returns the fraction of the current step at
 * which the integral first reaches the draw.
 */
class ExerciseClock {
public:
    explicit ExerciseClock(double unit_exponential) : threshold_(unit_exponential) {}

    /// Trapezoidal increment over one step of length dt with end-point
    /// intensities mu0, mu1. Returns the crossing fraction in [0, 1], if any.
    std::optional<double> advance(double mu0, double mu1, double dt);

    double integrated() const noexcept { return integral_; }

private:
    double threshold_;
    double integral_ = 0.0;
};

struct ExerciseEvent {
    double time;            ///< exercise time
    std::size_t step;       ///< step [times[step], times[step + 1]] containing it
    double fraction;        ///< position inside that step
};

/**
 * First time the integrated intensity reaches `unit_exponential`, with the
 * integral accumulated by trapezoids and inverted linearly inside the crossing
 * step. `intensities[k]` is the rate at `times[k]`. Returns nullopt when the
 * total integral stays below the draw.
 *
 * Throws InputError for negative intensities or mismatched lengths.
 */
std::optional<ExerciseEvent> sample_exercise_time(std::span<const double> times,
                                                  std::span<const double> intensities,
                                                  double unit_exponential);

/**
 * Monte Carlo price of the put exercised at the first jump of a point process
 * with intensity f_theta((K - S)^+ - P(t, S)), P read from `surface`.
 *
 * Paths use exact log-normal increments; the stock at the exercise time is
 * drawn from the Brownian bridge between the enclosing steps. Each path (or
 * antithetic pair) owns a random stream keyed by (seed, index), and the
 * reduction runs in index order, so the estimate is independent of `threads`.
 *
 * Throws InputError when surface.market() differs from `market`.
 */
MCEstimate mc_price(const MarketParams& market, const PriceSurface& surface,
                    const IntensityFamily& family, const MCConfig& mc, double s0);

}  // namespace ratex
