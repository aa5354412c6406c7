#pragma once

#include "alphaconc/bounds.hpp"
#include "alphaconc/calibrate.hpp"
#include "alphaconc/config.hpp"
#include "alphaconc/montecarlo.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace alphaconc {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::uint64_t kMatrixStream = 2;

/// Everything an experiment kind resolves to before simulation.
struct ExperimentPlan {
    DistributionSpec coord;
    StatisticSpec stat;
    TailBoundCurve curve;
    double unit_scale = 1.0;  // what t_grid.unit = scale multiplies by
    std::vector<double> t_grid;
    std::optional<double> center;
    nlohmann::json parameters;  // derived constants (K, norms, ...) for the report
};

ExperimentPlan plan_experiment(const ExperimentConfig& config);

struct ExperimentOutcome {
    TailEstimate estimate;
    TailBoundCurve curve;  // at the calibrated knob when calibration ran
    std::optional<CalibrationResult> calibration;
    DominationReport domination;
    int exit_code = 0;  // 0 dominated, 2 violated or out-of-grid
    std::string output_dir;
};

/// Directory for reports: $ALPHACONC_OUTPUT_ROOT, else "alphaconc-out".
std::string default_output_root();

/// Runs the pipeline and writes estimate.csv, bound.json, calibration.json,
/// plot.csv and report.json under <root>/<config hash>.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::string& output_root,
                                 bool force_calibration = false);

}  // namespace alphaconc
