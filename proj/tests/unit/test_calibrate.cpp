#include "doctest.h"

#include "alphaconc/calibrate.hpp"

#include <cmath>
#include <limits>

using namespace alphaconc;

namespace {

TailEstimate estimate_with_ci_high(const std::vector<double>& t, const std::vector<double>& ci_high,
                                   Sidedness sidedness = Sidedness::two_sided) {
    TailEstimate e;
    e.t_grid = t;
    e.ci_high = ci_high;
    e.ci_low.assign(t.size(), 0.0);
    e.p_hat = ci_high;
    e.counts.assign(t.size(), 1);
    e.N = 1000;
    e.sidedness = sidedness;
    return e;
}

// 2 exp(-(t / scale)^power / C)
TailBoundCurve inverse_rate_curve(double scale, double power, double valid_hi = INFINITY) {
    TailBoundCurve c;
    c.family = BoundFamily::euclid_norm;
    c.constants = {{"scale", scale}, {"power", power}};
    c.prefactor = 2.0;
    c.knob_name = "C";
    c.knob = 1.0;
    c.knob_mode = KnobMode::inverse_rate;
    c.valid_hi = valid_hi;
    return c;
}

}  // namespace

TEST_CASE("minimal constant against an exponential tail") {
    std::vector<double> t, ci;
    for (int i = 1; i <= 10; ++i) {
        t.push_back(i);
        ci.push_back(std::exp(-double(i)));
    }
    const auto r = min_dominating_constant(estimate_with_ci_high(t, ci), inverse_rate_curve(1.0, 1.0), 1e-3, 1e3);
    // binding point t = 10: t / C <= t + log 2
    const double exact = 10.0 / (10.0 + std::log(2.0));
    CHECK(r.status == CalibrationStatus::dominated);
    CHECK(r.constant_name == "C");
    CHECK(r.value >= exact * (1.0 - 1e-12));
    CHECK(r.value <= exact * (1.0 + kCalibrationTolerance));
    CHECK(r.value == doctest::Approx(0.93511).epsilon(1e-3));
    CHECK(r.rate == doctest::Approx(1.0 / r.value));
    CHECK(!r.at_search_limit);
    CHECK(r.report.violating_t.empty());
}

TEST_CASE("calibrated knob is tight") {
    std::vector<double> t, ci;
    for (int i = 1; i <= 20; ++i) {
        t.push_back(0.25 * i);
        ci.push_back(std::exp(-std::pow(0.25 * i, 1.5)) * 0.9);
    }
    const auto est = estimate_with_ci_high(t, ci);
    for (KnobMode mode : {KnobMode::rate, KnobMode::inverse_rate}) {
        auto curve = inverse_rate_curve(1.0, 1.5);
        curve.knob_mode = mode;
        const auto r = min_dominating_constant(est, curve, 1e-3, 1e3);
        REQUIRE(r.status == CalibrationStatus::dominated);
        CHECK(domination_report(est, curve.with_knob(r.value)).verdict == CalibrationStatus::dominated);
        const auto stronger = curve.with_rate(r.rate * (1.0 + 2.0 * kCalibrationTolerance));
        CHECK(domination_report(est, stronger).verdict == CalibrationStatus::violated);
    }
}

TEST_CASE("zero counts calibrate to a strong constant") {
    const std::vector<double> t{1, 2, 3};
    const std::vector<double> ci(3, 3e-6);
    const auto r = min_dominating_constant(estimate_with_ci_high(t, ci), inverse_rate_curve(1.0, 1.0), 1e-3, 1e3);
    CHECK(r.status == CalibrationStatus::dominated);
    // binding point t = 3: C = 3 / log(2 / 3e-6), well below the neutral 1
    CHECK(r.value == doctest::Approx(3.0 / std::log(2.0 / 3e-6)).epsilon(2e-3));
    CHECK(r.value < 0.25);
}

TEST_CASE("search limit is flagged") {
    const std::vector<double> t{1, 2};
    const std::vector<double> ci(2, 1e-300);
    const auto r = min_dominating_constant(estimate_with_ci_high(t, ci), inverse_rate_curve(1e6, 1.0), 1e-3, 1e3);
    CHECK(r.status == CalibrationStatus::dominated);
    CHECK(r.at_search_limit);
    CHECK(r.value == doctest::Approx(1e-3));
}

TEST_CASE("no dominating value in the interval") {
    const std::vector<double> t{1.0};
    const std::vector<double> ci{1.0};
    auto curve = inverse_rate_curve(1.0, 1.0);
    curve.prefactor = 1.0;
    const auto r = min_dominating_constant(estimate_with_ci_high(t, ci), curve, 1e-3, 1e3);
    CHECK(r.status == CalibrationStatus::out_of_grid);
    CHECK(r.report.violating_t == std::vector<double>{1.0});
}

TEST_CASE("points beyond validity are excluded") {
    const std::vector<double> t{0.5, 3.0};
    const std::vector<double> ci{0.01, 1.0};
    const auto est = estimate_with_ci_high(t, ci);
    const auto rep = domination_report(est, inverse_rate_curve(1.0, 1.0, 2.0));
    CHECK(rep.verdict == CalibrationStatus::dominated);
    CHECK(rep.excluded_t == std::vector<double>{3.0});
    CHECK(!rep.margins[1].has_value());
    CHECK(rep.margins[0].value() > 0.0);
}

TEST_CASE("trivial curves") {
    const std::vector<double> t{0.0, 1.0, 5.0};
    const auto est = estimate_with_ci_high(t, {1.0, 0.5, 0.1});
    CHECK(domination_report(est, inverse_rate_curve(INFINITY, 1.0)).verdict == CalibrationStatus::dominated);
    CHECK(domination_report(est, inverse_rate_curve(0.0, 1.0)).verdict == CalibrationStatus::violated);
}

TEST_CASE("sidedness must agree") {
    const auto est = estimate_with_ci_high({1.0}, {0.1}, Sidedness::upper);
    CHECK_THROWS_AS(domination_report(est, inverse_rate_curve(1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("pilot centering error shifts the comparison point") {
    auto est = estimate_with_ci_high({2.0}, {2.0 * std::exp(-1.95)});
    const auto curve = inverse_rate_curve(1.0, 1.0);
    CHECK(domination_report(est, curve).verdict == CalibrationStatus::violated);
    est.center_se = 0.05;  // curve read at t - 0.1
    CHECK(domination_report(est, curve).verdict == CalibrationStatus::dominated);
}

TEST_CASE("calibration json") {
    const auto r = min_dominating_constant(estimate_with_ci_high({1.0}, {0.1}), inverse_rate_curve(1.0, 1.0), 1e-3, 1e3);
    const auto j = r.to_json();
    CHECK(j.at("status") == "dominated");
    CHECK(j.at("constant") == "C");
    CHECK(j.at("value").get<double>() == r.value);
}
