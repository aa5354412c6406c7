#pragma once

#include "alphaconc/bounds.hpp"
#include "alphaconc/montecarlo.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace alphaconc {

enum class CalibrationStatus { dominated, violated, out_of_grid };

std::string to_string(CalibrationStatus s);

inline constexpr double kCalibrationTolerance = 1e-3;

/// Per-grid-point comparison of a curve with the upper confidence limits of an
/// estimate. When the estimate carries a pilot-centering error, the curve is
/// read at t - 2 SE / scale.
struct DominationReport {
    std::vector<double> t;
    std::vector<std::optional<double>> margins;  // bound - ci_high; nullopt outside validity
    std::vector<double> excluded_t;
    std::vector<double> violating_t;
    CalibrationStatus verdict = CalibrationStatus::dominated;

    nlohmann::json to_json() const;
};

/// Rejects a sidedness mismatch between estimate and curve.
DominationReport domination_report(const TailEstimate& estimate, const TailBoundCurve& curve);

struct CalibrationResult {
    std::string family;
    std::string constant_name;
    double value = 0.0;  // knob in the curve's own units (C or c)
    double rate = 0.0;   // the same knob as an exponent rate
    bool at_search_limit = false;  // the strongest knob in the interval already dominates
    CalibrationStatus status = CalibrationStatus::dominated;
    DominationReport report;  // at `value`

    nlohmann::json to_json() const;
};

/// Strongest knob in [knob_lo, knob_hi] whose curve dominates ci_high at every
/// in-validity grid point, located by bisection to kCalibrationTolerance relative.
/// Unless at_search_limit, the knob whose rate is larger by that factor violates.
CalibrationResult min_dominating_constant(const TailEstimate& estimate, const TailBoundCurve& curve,
                                          double knob_lo, double knob_hi);

}  // namespace alphaconc
