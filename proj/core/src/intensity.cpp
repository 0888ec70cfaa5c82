#include "ratex/intensity.hpp"

#include "ratex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ratex {

IntensityFamily IntensityFamily::exponential(double theta, double cap) {
    IntensityFamily f;
    f.kind = IntensityKind::Exponential;
    f.theta = theta;
    f.cap = cap;
    f.validate();
    return f;
}

IntensityFamily IntensityFamily::capped_exponential(double theta, double cap) {
    IntensityFamily f = exponential(theta, cap);
    f.kind = IntensityKind::CappedExponential;
    return f;
}

IntensityFamily IntensityFamily::constant(double level, double cap) {
    IntensityFamily f;
    f.kind = IntensityKind::Constant;
    f.level = level;
    f.cap = cap;
    f.validate();
    return f;
}

void IntensityFamily::validate() const {
    if (!(std::isfinite(theta) && theta >= 0.0)) throw ArgumentError("intensity: theta must be >= 0");
    if (!(cap > 0.0)) throw ArgumentError("intensity: cap must be > 0");
    if (kind == IntensityKind::Constant && !(std::isfinite(level) && level > 0.0)) {
        throw ArgumentError("intensity: constant level must be > 0");
    }
}

IntensityKind parse_intensity_kind(std::string_view name) {
    if (name == "exp" || name == "exponential") return IntensityKind::Exponential;
    if (name == "capped_exp") return IntensityKind::CappedExponential;
    if (name == "const" || name == "constant") return IntensityKind::Constant;
    throw ArgumentError("unknown intensity family '" + std::string(name) + "'");
}

std::string_view to_string(IntensityKind kind) {
    switch (kind) {
        case IntensityKind::Exponential: return "exp";
        case IntensityKind::CappedExponential: return "capped_exp";
        case IntensityKind::Constant: return "const";
    }
    return "?";
}

namespace {

// Below this exponent exp() cannot overflow, so the cap is a plain min().
constexpr double kSafeExponent = 700.0;

// theta * x with the 0 * inf case defined as 0 (theta = 0 means f == 1).
double exponent(const IntensityFamily& family, double x) {
    return family.theta == 0.0 ? 0.0 : family.theta * x;
}

bool is_nondecreasing(IntensityKind kind) {
    switch (kind) {
        case IntensityKind::Exponential:
        case IntensityKind::CappedExponential:
        case IntensityKind::Constant:
            return true;
    }
    return false;
}

}  // namespace

double eval_f(const IntensityFamily& family, double x) {
    switch (family.kind) {
        case IntensityKind::Constant:
            return std::min(family.level, family.cap);
        case IntensityKind::Exponential:
        case IntensityKind::CappedExponential: {
            const double e = exponent(family, x);
            if (e < kSafeExponent) return std::min(std::exp(e), family.cap);
            return e >= std::log(family.cap) ? family.cap : std::exp(e);
        }
    }
    return 0.0;
}

double eval_f_uncapped(const IntensityFamily& family, double x) {
    switch (family.kind) {
        case IntensityKind::Constant:
            return family.level;
        case IntensityKind::Exponential:
        case IntensityKind::CappedExponential:
            return std::exp(exponent(family, x));
    }
    return 0.0;
}

double eval_df(const IntensityFamily& family, double x) {
    switch (family.kind) {
        case IntensityKind::Constant:
            return 0.0;
        case IntensityKind::Exponential:
        case IntensityKind::CappedExponential: {
            const double e = exponent(family, x);
            if (e >= kSafeExponent) return e < std::log(family.cap) ? family.theta * std::exp(e) : 0.0;
            const double f = std::exp(e);
            return f >= family.cap ? 0.0 : family.theta * f;
        }
    }
    return 0.0;
}

double envelope_by_probing(const std::function<double(double)>& f, double x, double bound,
                           int probes) {
    const bool below = x < 0.0;
    // Interval [lo, hi] over which the sup (below) or inf (above) is taken.
    const double span = below ? x + bound : bound - x;
    double best = f(x);
    if (!(span > 0.0) || probes < 2) return best;
    const double first = std::min(kOneSidedProbe, span);
    const double ratio = std::pow(span / first, 1.0 / static_cast<double>(probes - 1));
    double offset = first;
    for (int k = 0; k < probes; ++k) {
        const double y = below ? x - offset : x + offset;
        const double v = f(y);
        best = below ? std::max(best, v) : std::min(best, v);
        offset = (k == probes - 2) ? span : offset * ratio;
    }
    return best;
}

namespace {

template <typename F>
double envelope(const IntensityFamily& family, double x, F&& f) {
    if (is_nondecreasing(family.kind)) return f(family, x);
    // Gap values are bounded by the strike scale; 1e3 covers any K used here.
    return envelope_by_probing([&](double y) { return f(family, y); }, x, 1e3);
}

}  // namespace

double eval_nu(const IntensityFamily& family, double x) {
    return envelope(family, x, [](const IntensityFamily& f, double y) { return eval_f(f, y); });
}

double eval_nu_uncapped(const IntensityFamily& family, double x) {
    return envelope(family, x,
                    [](const IntensityFamily& f, double y) { return eval_f_uncapped(f, y); });
}

double default_epsilon_rule(double theta) {
    if (theta <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(theta);
}

ConditionReport check_conditions(const std::function<IntensityFamily(double)>& family_at,
                                 std::span<const double> theta_ladder,
                                 const std::function<double(double)>& epsilon_rule,
                                 double vanish_ratio) {
    if (theta_ladder.size() < 3) throw ArgumentError("check_conditions: ladder needs >= 3 entries");
    for (std::size_t i = 1; i < theta_ladder.size(); ++i) {
        if (!(theta_ladder[i] > theta_ladder[i - 1])) {
            throw ArgumentError("check_conditions: theta ladder must be strictly increasing");
        }
    }

    ConditionReport report;
    for (double theta : theta_ladder) {
        const IntensityFamily family = family_at(theta);
        const double eps = epsilon_rule(theta);
        if (!(eps > 0.0)) throw ArgumentError("check_conditions: epsilon rule must be > 0");
        ConditionRow row;
        row.theta = theta;
        row.epsilon_of_theta = eps;
        row.nu_at_zero_plus = eval_nu_uncapped(family, kOneSidedProbe);
        row.term_bad = eval_nu_uncapped(family, -eps);
        row.term_ok = eps * eval_nu_uncapped(family, -kOneSidedProbe);
        report.rows.push_back(row);
    }

    const auto& rows = report.rows;
    bool unbounded = true;
    double prev_increment = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double inc = rows[i].nu_at_zero_plus - rows[i - 1].nu_at_zero_plus;
        if (!(inc > 0.0)) unbounded = false;
        if (i > 1 && inc < prev_increment) unbounded = false;
        prev_increment = inc;
    }

    auto vanishes = [&](auto member) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(rows[i].*member < rows[i - 1].*member)) return false;
        }
        return rows.back().*member <= vanish_ratio * rows.front().*member;
    };

    report.nu_unbounded = unbounded;
    report.term_bad_vanishes = vanishes(&ConditionRow::term_bad);
    report.term_ok_vanishes = vanishes(&ConditionRow::term_ok);
    report.passes = report.nu_unbounded && report.term_bad_vanishes && report.term_ok_vanishes;
    return report;
}

VanishingTerms vanishing_terms(const IntensityFamily& family, double epsilon1, double horizon,
                               double strike) {
    if (!(epsilon1 > 0.0)) throw ArgumentError("vanishing_terms: epsilon1 must be > 0");
    if (!(horizon >= 0.0)) throw ArgumentError("vanishing_terms: horizon must be >= 0");
    if (horizon == 0.0) return {};
    VanishingTerms out;
    out.term_bad_regret = -strike * std::expm1(-horizon * eval_nu(family, -epsilon1));
    out.term_ok_regret = epsilon1 * horizon * eval_nu(family, -kOneSidedProbe);
    return out;
}

}  // namespace ratex
