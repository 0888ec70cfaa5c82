#include "ratex/exercise_mc.hpp"

#include "ratex/errors.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace ratex {

void MCConfig::validate() const {
    if (n_paths < 1) throw ArgumentError("mc: n_paths must be >= 1");
    if (n_steps < 1) throw ArgumentError("mc: n_steps must be >= 1");
}

std::optional<double> ExerciseClock::advance(double mu0, double mu1, double dt) {
    const double before = integral_;
    const double increment = 0.5 * (mu0 + mu1) * dt;
    integral_ += increment;
    if (before >= threshold_) return 0.0;
    if (integral_ < threshold_) return std::nullopt;
    return std::clamp((threshold_ - before) / increment, 0.0, 1.0);
}

std::optional<ExerciseEvent> sample_exercise_time(std::span<const double> times,
                                                  std::span<const double> intensities,
                                                  double unit_exponential) {
    if (times.size() != intensities.size() || times.size() < 2) {
        throw InputError("sample_exercise_time: need >= 2 times and one intensity per time");
    }
    for (double mu : intensities) {
        if (!(mu >= 0.0)) throw InputError("sample_exercise_time: intensities must be >= 0");
    }
    if (unit_exponential <= 0.0) return ExerciseEvent{times[0], 0, 0.0};
    ExerciseClock clock(unit_exponential);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double dt = times[k + 1] - times[k];
        if (auto frac = clock.advance(intensities[k], intensities[k + 1], dt)) {
            return ExerciseEvent{times[k] + *frac * dt, k, *frac};
        }
    }
    return std::nullopt;
}

namespace {

// SplitMix64: a counter-driven generator, so every path index gets an
// independent, reproducible stream.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed);
    const std::uint64_t base = mixer();
    SplitMix64 keyed(base ^ (index * 0xD1B54A32D192ED03ULL));
    return SplitMix64(keyed());
}

// Uniform in the open interval (0, 1).
double open_uniform(SplitMix64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

struct Draws {
    std::vector<double> z;  // one standard normal per step
    double uniform = 0.5;   // for the exercise clock
    double bridge = 0.0;    // standard normal for the bridge point
};

struct PathOutcome {
    double discounted_payoff = 0.0;
    bool exercised = false;
    double exercise_time = 0.0;
};

struct ItemResult {
    double value = 0.0;  // path payoff, or the pair average
    int exercised = 0;
    double exercise_time_sum = 0.0;
};

class PathSimulator {
public:
    PathSimulator(const MarketParams& market, const PriceSurface& surface,
                  const IntensityFamily& family, std::size_t n_steps, double s0)
        : market_(market),
          family_(family),
          n_steps_(n_steps),
          dt_(market.expiry / static_cast<double>(n_steps)),
          drift_((market.r - 0.5 * market.sigma * market.sigma) * dt_),
          vol_(market.sigma * std::sqrt(dt_)),
          x0_(std::log(s0 / market.strike)),
          x_min_(surface.x_min()),
          x_max_(surface.x_max()),
          inv_dx_(1.0 / surface.grid().dx()),
          last_cell_(surface.n_space() - 2) {
        // Every path visits the same time levels, so the row bracketing each
        // level and its weight are resolved once.
        const double surface_dt = surface.dt();
        const std::size_t last_row = surface.grid().n_time - 1;
        for (std::size_t k = 0; k <= n_steps_; ++k) {
            const double t = k == n_steps_ ? market.expiry : static_cast<double>(k) * dt_;
            const double u = std::clamp(t / surface_dt, 0.0, static_cast<double>(last_row + 1));
            const std::size_t row = std::min(static_cast<std::size_t>(u), last_row);
            levels_.push_back({surface.row(row).data(), surface.row(row + 1).data(),
                               u - static_cast<double>(row)});
        }
    }

    // sign = +1 for the primary path, -1 for its antithetic twin.
    PathOutcome run(const Draws& d, double sign) const {
        const double unit_exp = -std::log(sign > 0.0 ? d.uniform : 1.0 - d.uniform);
        ExerciseClock clock(unit_exp);
        double x = x0_;
        double mu = intensity(0, x);
        for (std::size_t k = 0; k < n_steps_; ++k) {
            const double t0 = static_cast<double>(k) * dt_;
            const double t1 = k + 1 == n_steps_ ? market_.expiry : t0 + dt_;
            const double x_next = x + drift_ + vol_ * sign * d.z[k];
            const double mu_next = intensity(k + 1, x_next);
            if (auto frac = clock.advance(mu, mu_next, t1 - t0)) {
                const double f = *frac;
                const double tau = t0 + f * (t1 - t0);
                const double spread = market_.sigma * std::sqrt(f * (1.0 - f) * (t1 - t0));
                const double x_tau = x + f * (x_next - x) + spread * sign * d.bridge;
                return {std::exp(-market_.r * tau) * payoff(x_tau), true, tau};
            }
            x = x_next;
            mu = mu_next;
        }
        return {std::exp(-market_.r * market_.expiry) * payoff(x), false, 0.0};
    }

private:
    struct Level {
        const double* lower;  // row at or before the level
        const double* upper;  // next row
        double weight;        // position between them
    };

    double payoff(double x) const {
        return x < 0.0 ? market_.strike * -std::expm1(x) : 0.0;
    }

    // Bilinear lookup of P at time level k, with x clamped to the grid.
    double price(std::size_t k, double x) const {
        const double u = (std::clamp(x, x_min_, x_max_) - x_min_) * inv_dx_;
        const std::size_t j = std::min(static_cast<std::size_t>(u), last_cell_);
        const double w = u - static_cast<double>(j);
        const Level& lv = levels_[k];
        const double lo = lv.lower[j] + w * (lv.lower[j + 1] - lv.lower[j]);
        const double hi = lv.upper[j] + w * (lv.upper[j + 1] - lv.upper[j]);
        return lo + lv.weight * (hi - lo);
    }

    double intensity(std::size_t k, double x) const {
        return eval_f(family_, payoff(x) - price(k, x));
    }

    const MarketParams& market_;
    const IntensityFamily& family_;
    std::size_t n_steps_;
    double dt_;
    double drift_;
    double vol_;
    double x0_;
    double x_min_;
    double x_max_;
    double inv_dx_;
    std::size_t last_cell_;
    std::vector<Level> levels_;
};

}  // namespace

MCEstimate mc_price(const MarketParams& market, const PriceSurface& surface,
                    const IntensityFamily& family, const MCConfig& mc, double s0) {
    market.validate();
    family.validate();
    mc.validate();
    if (!(surface.market() == market)) throw InputError("mc_price: surface was solved for a different market");
    if (!(s0 > 0.0)) throw InputError("mc_price: s0 must be > 0");

    const std::size_t items = mc.antithetic ? (mc.n_paths + 1) / 2 : mc.n_paths;
    const std::size_t paths_per_item = mc.antithetic ? 2 : 1;
    std::vector<ItemResult> results(items);
    const PathSimulator sim(market, surface, family, mc.n_steps, s0);

    auto work = [&](std::size_t begin, std::size_t end) {
        Draws d;
        d.z.resize(mc.n_steps);
        for (std::size_t i = begin; i < end; ++i) {
            SplitMix64 rng = stream_for(mc.seed, i);
            boost::random::normal_distribution<double> normal;
            for (double& z : d.z) z = normal(rng);
            d.uniform = open_uniform(rng);
            d.bridge = normal(rng);

            ItemResult r;
            const PathOutcome a = sim.run(d, 1.0);
            r.value = a.discounted_payoff;
            if (a.exercised) {
                ++r.exercised;
                r.exercise_time_sum += a.exercise_time;
            }
            if (mc.antithetic) {
                const PathOutcome b = sim.run(d, -1.0);
                r.value = 0.5 * (r.value + b.discounted_payoff);
                if (b.exercised) {
                    ++r.exercised;
                    r.exercise_time_sum += b.exercise_time;
                }
            }
            results[i] = r;
        }
    };

    unsigned threads = mc.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : mc.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, items));
    if (threads <= 1) {
        work(0, items);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (items + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = std::min(items, w * chunk);
            const std::size_t end = std::min(items, begin + chunk);
            pool.emplace_back(work, begin, end);
        }
    }

    // Fixed-order reduction (Welford) keeps the result independent of threading.
    double mean = 0.0;
    double m2 = 0.0;
    long exercised = 0;
    double time_sum = 0.0;
    for (std::size_t i = 0; i < items; ++i) {
        const double delta = results[i].value - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (results[i].value - mean);
        exercised += results[i].exercised;
        time_sum += results[i].exercise_time_sum;
    }

    MCEstimate est;
    est.price = mean;
    est.std_error = items > 1 ? std::sqrt(m2 / static_cast<double>(items - 1) / static_cast<double>(items)) : 0.0;
    const double total_paths = static_cast<double>(items * paths_per_item);
    est.exercise_fraction = static_cast<double>(exercised) / total_paths;
    est.mean_exercise_time = exercised > 0 ? time_sum / static_cast<double>(exercised) : 0.0;
    return est;
}

}  // namespace ratex
