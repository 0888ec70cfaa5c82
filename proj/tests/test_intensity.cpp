#include "ratex/errors.hpp"
#include "ratex/intensity.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace ratex;

TEST_CASE("intensity examples") {
    const auto e10 = IntensityFamily::exponential(10.0);
    CHECK(eval_f(e10, 0.0) == 1.0);
    CHECK(eval_f(e10, -0.1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(eval_f(IntensityFamily::constant(2.0), 5.0) == 2.0);
    CHECK(eval_nu(e10, -0.1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(eval_nu(e10, 0.0) == 1.0);
    for (double x : {-50.0, -1.0, 0.0, 3.0, 80.0}) CHECK(eval_nu(IntensityFamily::constant(2.0), x) == 2.0);
}

TEST_CASE("theta = 0 gives the unit rate") {
    const auto e0 = IntensityFamily::exponential(0.0);
    for (double x : {-100.0, -1e-3, 0.0, 7.0, 1e300}) CHECK(eval_f(e0, x) == 1.0);
}

TEST_CASE("cap bounds the exponential without overflow") {
    const auto big = IntensityFamily::exponential(1e4);
    CHECK(eval_f(big, 100.0) == kDefaultIntensityCap);
    CHECK(std::isfinite(eval_f(big, 1e6)));
    CHECK(eval_f(big, -1e6) == 0.0);
    const auto capped = IntensityFamily::capped_exponential(1.0, 50.0);
    CHECK(eval_f(capped, std::log(50.0) + 1.0) == 50.0);
    CHECK(eval_f(capped, 1.0) == doctest::Approx(std::exp(1.0)));
    CHECK(eval_df(capped, 10.0) == 0.0);
    CHECK(eval_df(IntensityFamily::exponential(3.0), 0.5) == doctest::Approx(3.0 * std::exp(1.5)));
}

TEST_CASE("family parsing and validation") {
    CHECK(parse_intensity_kind("exp") == IntensityKind::Exponential);
    CHECK(parse_intensity_kind("const") == IntensityKind::Constant);
    CHECK(parse_intensity_kind("capped_exp") == IntensityKind::CappedExponential);
    CHECK(parse_intensity_kind(to_string(IntensityKind::Constant)) == IntensityKind::Constant);
    CHECK_THROWS_AS(parse_intensity_kind("linear"), ArgumentError);
    CHECK_THROWS_AS(IntensityFamily::exponential(-1.0).validate(), ArgumentError);
    CHECK_THROWS_AS(IntensityFamily::constant(0.0).validate(), ArgumentError);
    CHECK_THROWS_AS(IntensityFamily::exponential(1.0, 0.0).validate(), ArgumentError);
}

TEST_CASE("bounds and envelope properties over random points") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xs(-100.0, 100.0);
    const std::vector<IntensityFamily> families{IntensityFamily::exponential(0.5),
                                                IntensityFamily::exponential(10.0),
                                                IntensityFamily::capped_exponential(2.0, 1e3),
                                                IntensityFamily::constant(0.7)};
    for (const auto& fam : families) {
        double prev_x = -100.0;
        double prev_nu = eval_nu(fam, prev_x);
        std::vector<double> sorted;
        for (int i = 0; i < 500; ++i) sorted.push_back(xs(rng));
        std::sort(sorted.begin(), sorted.end());
        for (double x : sorted) {
            const double f = eval_f(fam, x);
            CHECK(f >= 0.0);
            CHECK(f <= fam.cap);
            if (fam.kind == IntensityKind::Exponential && fam.theta * x < 700.0) {
                CHECK(eval_nu_uncapped(fam, x) == doctest::Approx(std::exp(fam.theta * x)));
            }
            const double nu = eval_nu(fam, x);
            CHECK(nu >= prev_nu);
            prev_nu = nu;
            prev_x = x;
        }
    }
}

TEST_CASE("probing envelope agrees with the closed form for monotone families") {
    const auto fam = IntensityFamily::exponential(4.0);
    auto f = [&](double x) { return eval_f(fam, x); };
    CHECK(envelope_by_probing(f, -0.3, 0.0) == doctest::Approx(eval_nu(fam, -0.3)).epsilon(1e-9));
    CHECK(envelope_by_probing(f, 0.2, 10.0) == doctest::Approx(eval_nu(fam, 0.2)).epsilon(1e-9));
    // Non-monotone input: sup over y <= x below zero, inf over y >= x above it.
    auto bump = [](double x) { return std::exp(-(x + 1.0) * (x + 1.0)); };
    CHECK(envelope_by_probing(bump, -0.5, 10.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(envelope_by_probing(bump, -3.0, 10.0) == doctest::Approx(bump(-3.0)).epsilon(1e-12));
    CHECK(envelope_by_probing(bump, 1.0, 50.0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("condition checker verdicts") {
    const std::vector<double> ladder{1.0, 10.0, 100.0, 1000.0};
    auto exp_at = [](double th) { return IntensityFamily::exponential(th); };
    auto const_at = [](double) { return IntensityFamily::constant(1.0); };

    const auto good = check_conditions(exp_at, ladder, default_epsilon_rule);
    CHECK(good.nu_unbounded);
    CHECK(good.term_bad_vanishes);
    CHECK(good.term_ok_vanishes);
    CHECK(good.passes);
    CHECK(good.rows.size() == ladder.size());
    CHECK(good.rows[2].term_bad == doctest::Approx(std::exp(-10.0)).epsilon(1e-9));

    CHECK_FALSE(check_conditions(const_at, ladder, default_epsilon_rule).passes);
    CHECK_FALSE(check_conditions(const_at, ladder, default_epsilon_rule).nu_unbounded);

    const auto fixed = check_conditions(exp_at, ladder, [](double) { return 1.0; });
    CHECK(fixed.term_bad_vanishes);
    CHECK_FALSE(fixed.term_ok_vanishes);
    CHECK_FALSE(fixed.passes);

    CHECK_THROWS_AS(check_conditions(exp_at, std::vector<double>{1.0, 2.0}, default_epsilon_rule),
                    ArgumentError);
    CHECK_THROWS_AS(check_conditions(exp_at, std::vector<double>{1.0, 3.0, 2.0}, default_epsilon_rule),
                    ArgumentError);
}

TEST_CASE("vanishing terms") {
    const auto t = vanishing_terms(IntensityFamily::exponential(100.0), 0.1, 1.0, 100.0);
    CHECK(t.term_bad_regret == doctest::Approx(0.00453988992012988).epsilon(1e-10));
    CHECK(t.term_ok_regret == doctest::Approx(0.09999999999).epsilon(1e-10));

    const auto zero = vanishing_terms(IntensityFamily::exponential(5.0), 0.3, 0.0, 100.0);
    CHECK(zero.term_bad_regret == 0.0);
    CHECK(zero.term_ok_regret == 0.0);

    const auto c = vanishing_terms(IntensityFamily::constant(0.5), 0.2, 2.0, 100.0);
    CHECK(c.term_bad_regret == doctest::Approx(100.0 * (1.0 - std::exp(-1.0))));
    CHECK(c.term_ok_regret == doctest::Approx(0.2 * 2.0 * 0.5));

    CHECK_THROWS_AS(vanishing_terms(IntensityFamily::constant(0.5), 0.0, 1.0, 100.0), ArgumentError);
    CHECK_THROWS_AS(vanishing_terms(IntensityFamily::constant(0.5), 0.1, -1.0, 100.0), ArgumentError);
}

TEST_CASE("vanishing terms are nonnegative and nondecreasing in horizon") {
    for (const auto& fam : {IntensityFamily::exponential(3.0), IntensityFamily::constant(2.0)}) {
        double prev_bad = 0.0;
        double prev_ok = 0.0;
        for (double h = 0.0; h <= 3.0; h += 0.25) {
            const auto v = vanishing_terms(fam, 0.4, h, 100.0);
            CHECK(v.term_bad_regret >= prev_bad);
            CHECK(v.term_ok_regret >= prev_ok);
            prev_bad = v.term_bad_regret;
            prev_ok = v.term_ok_regret;
        }
    }
}

TEST_CASE("both terms shrink along the ladder for the default epsilon rule") {
    double prev_bad = std::numeric_limits<double>::infinity();
    double prev_ok = std::numeric_limits<double>::infinity();
    for (double th : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
        const auto v = vanishing_terms(IntensityFamily::exponential(th), default_epsilon_rule(th), 1.0, 100.0);
        CHECK(v.term_bad_regret < prev_bad);
        CHECK(v.term_ok_regret < prev_ok);
        prev_bad = v.term_bad_regret;
        prev_ok = v.term_ok_regret;
    }
}
