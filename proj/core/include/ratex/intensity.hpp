#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace ratex {

enum class IntensityKind { Exponential, Constant, CappedExponential };

/// Default ceiling applied to every evaluated intensity, per year.
inline constexpr double kDefaultIntensityCap = 1e12;

/**
 * Exercise-intensity family f_theta(x), where x is the gap between the
 * immediate payoff and the option value, (K - s)^+ - P.
 *
 *   Exponential        f(x) = exp(theta * x), capped at `cap`
 *   CappedExponential  same formula, with a model-level cap chosen by the user
 *   Constant           f(x) = level
 *
 * theta is the rationality parameter; larger theta makes exercise more
 * sensitive to the sign of the gap.
 */
struct IntensityFamily {
    IntensityKind kind = IntensityKind::Exponential;
    double theta = 0.0;
    double level = 1.0;
    double cap = kDefaultIntensityCap;

    static IntensityFamily exponential(double theta, double cap = kDefaultIntensityCap);
    static IntensityFamily capped_exponential(double theta, double cap);
    static IntensityFamily constant(double level, double cap = kDefaultIntensityCap);

    void validate() const;
};

/// Parses "exp" | "capped_exp" | "const".
IntensityKind parse_intensity_kind(std::string_view name);
std::string_view to_string(IntensityKind kind);

/// min(f_theta(x), cap). The exponential is formed as exp(min(theta*x, ln cap))
/// so it never overflows.
double eval_f(const IntensityFamily& family, double x);

/// f_theta(x) without the cap; may return +inf.
double eval_f_uncapped(const IntensityFamily& family, double x);

/// d/dx of eval_f (zero where the cap is active).
double eval_df(const IntensityFamily& family, double x);

/// Monotone envelope nu(x): sup_{y<=x} f(y) for x < 0, inf_{y>=x} f(y) for x >= 0.
/// Nondecreasing families reduce to f itself.
double eval_nu(const IntensityFamily& family, double x);
double eval_nu_uncapped(const IntensityFamily& family, double x);

/**
 * Envelope of an arbitrary intensity function by brute-force probing. The sup
 * (x < 0) is taken over [-bound, x], the inf (x >= 0) over [x, bound], on a
 * geometric ladder of offsets from x that resolves the neighbourhood of x
 * down to 1e-12 and also includes both interval ends.
 */
double envelope_by_probing(const std::function<double(double)>& f, double x, double bound,
                           int probes = 400);

/// The one-sided probe used for nu(0+) and nu(0-).
inline constexpr double kOneSidedProbe = 1e-12;

/// Default epsilon(theta) = theta^(-1/2).
double default_epsilon_rule(double theta);

struct ConditionRow {
    double theta = 0.0;
    double nu_at_zero_plus = 0.0;
    double epsilon_of_theta = 0.0;
    double term_bad = 0.0;  ///< nu(-epsilon(theta))
    double term_ok = 0.0;   ///< epsilon(theta) * nu(0-)
};

struct ConditionReport {
    std::vector<ConditionRow> rows;
    bool nu_unbounded = false;
    bool term_bad_vanishes = false;
    bool term_ok_vanishes = false;
    bool passes = false;
};

/**
 * Checks the two convergence conditions on a finite ladder of theta values.
 *
 * nu(0+) counts as unbounded when it is strictly increasing and its increments
 * do not shrink along the ladder. A term counts as vanishing when it is strictly
 * decreasing and its last value is at most `vanish_ratio` times its first. The
 * envelope is evaluated on the uncapped family.
 *
 * Throws ArgumentError for fewer than 3 rungs, a non-increasing ladder, or a
 * non-positive epsilon.
 */
ConditionReport check_conditions(const std::function<IntensityFamily(double)>& family_at,
                                 std::span<const double> theta_ladder,
                                 const std::function<double(double)>& epsilon_rule,
                                 double vanish_ratio = 0.1);

/// The two theta-dependent regret terms of the convergence bound.
struct VanishingTerms {
    double term_bad_regret = 0.0;  ///< K (1 - exp(-(T-t) nu(-eps1)))
    double term_ok_regret = 0.0;   ///< eps1 (T-t) nu(0-)
};

VanishingTerms vanishing_terms(const IntensityFamily& family, double epsilon1, double horizon,
                               double strike);

}  // namespace ratex
