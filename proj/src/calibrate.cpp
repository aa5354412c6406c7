#include "alphaconc/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alphaconc {

std::string to_string(CalibrationStatus s) {
    switch (s) {
        case CalibrationStatus::dominated: return "dominated";
        case CalibrationStatus::violated: return "violated";
        case CalibrationStatus::out_of_grid: return "out-of-grid";
    }
    return "unknown";
}

nlohmann::json DominationReport::to_json() const {
    nlohmann::json j;
    j["verdict"] = to_string(verdict);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        rows.push_back({{"t", t[i]},
                        {"margin", margins[i] ? nlohmann::json(*margins[i]) : nlohmann::json(nullptr)},
                        {"in_validity", margins[i].has_value()}});
    }
    j["margins"] = rows;
    j["excluded_t"] = excluded_t;
    j["violating_t"] = violating_t;
    return j;
}

DominationReport domination_report(const TailEstimate& estimate, const TailBoundCurve& curve) {
    if (estimate.sidedness != curve.sidedness) {
        throw std::invalid_argument("estimate is " + to_string(estimate.sidedness) + " but the bound is " +
                                    to_string(curve.sidedness));
    }
    const double shift = 2.0 * estimate.center_se / estimate.scale;
    DominationReport r;
    r.t = estimate.t_grid;
    for (std::size_t i = 0; i < estimate.t_grid.size(); ++i) {
        const double t = estimate.t_grid[i];
        if (t < 0.0 || !curve.in_validity(t)) {
            r.margins.push_back(std::nullopt);
            r.excluded_t.push_back(t);
            continue;
        }
        const double bound = *curve.evaluate(std::max(0.0, t - shift));
        const double margin = bound - estimate.ci_high[i];
        r.margins.push_back(margin);
        if (margin < 0.0) r.violating_t.push_back(t);
    }
    r.verdict = r.violating_t.empty() ? CalibrationStatus::dominated : CalibrationStatus::violated;
    return r;
}

nlohmann::json CalibrationResult::to_json() const {
    return {{"family", family},
            {"constant", constant_name},
            {"value", value},
            {"rate", rate},
            {"at_search_limit", at_search_limit},
            {"status", to_string(status)},
            {"tolerance", kCalibrationTolerance},
            {"report", report.to_json()}};
}

CalibrationResult min_dominating_constant(const TailEstimate& estimate, const TailBoundCurve& curve,
                                          double knob_lo, double knob_hi) {
    if (!(knob_lo > 0.0 && knob_hi >= knob_lo) || !std::isfinite(knob_hi)) {
        throw std::invalid_argument("calibration search interval must be positive and ordered");
    }
    const double r_a = curve.knob_mode == KnobMode::rate ? knob_lo : 1.0 / knob_hi;
    const double r_b = curve.knob_mode == KnobMode::rate ? knob_hi : 1.0 / knob_lo;
    double weak = std::min(r_a, r_b), strong = std::max(r_a, r_b);

    const auto dominated = [&](double rate) {
        return domination_report(estimate, curve.with_rate(rate)).verdict == CalibrationStatus::dominated;
    };

    CalibrationResult out;
    out.family = to_string(curve.family);
    out.constant_name = curve.knob_name;
    const auto finish = [&](double rate, CalibrationStatus status) {
        out.rate = rate;
        out.value = curve.knob_for_rate(rate);
        out.status = status;
        out.report = domination_report(estimate, curve.with_rate(rate));
        return out;
    };

    if (!dominated(weak)) return finish(weak, CalibrationStatus::out_of_grid);
    if (dominated(strong)) {
        out.at_search_limit = true;
        return finish(strong, CalibrationStatus::dominated);
    }
    // weak dominates, strong violates; bisect geometrically.
    while (strong > weak * (1.0 + kCalibrationTolerance)) {
        const double mid = std::sqrt(weak * strong);
        if (dominated(mid)) {
            weak = mid;
        } else {
            strong = mid;
        }
    }
    return finish(weak, CalibrationStatus::dominated);
}

}  // namespace alphaconc
