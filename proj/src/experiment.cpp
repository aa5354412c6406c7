#include "alphaconc/experiment.hpp"

#include "alphaconc/errors.hpp"
#include "alphaconc/orlicz.hpp"
#include "alphaconc/specnorms.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <fstream>
#include <stdexcept>

namespace alphaconc {

namespace {

double resolve_K(const ExperimentConfig& config, const DistributionSpec& coord, AlphaParam alpha) {
    if (config.bound_K) return *config.bound_K;
    if (auto k = orlicz_norm_analytic(coord, alpha)) return k->value;
    if (auto k = orlicz_norm_quadrature(coord, alpha)) return k->value;
    throw std::invalid_argument("bound.K must be set: no analytic Orlicz norm for " + coord.describe());
}

SymMatrix load_or_sample_matrix(const ExperimentConfig& config, std::uint64_t index) {
    if (config.matrix_file) return SymMatrix(read_matrix_file(*config.matrix_file));
    return sample_ensemble(parse_ensemble(config.matrix_ensemble), config.n,
                           {*config.seed, kMatrixStream + index}, config.matrix_density);
}

std::uint64_t pilot_size(const ExperimentConfig& config) {
    return config.pilot_N ? config.pilot_N : std::max<std::uint64_t>(100000, 10 * config.t_points);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentPlan plan_experiment(const ExperimentConfig& config) {
    validate_config(config);
    const AlphaParam alpha(config.alpha);
    const std::string& kind = config.kind;
    const std::size_t n = config.n, d = config.d;
    const double c = config.bound_c.value_or(1.0);
    const double C = config.bound_C.value_or(1.0);

    ExperimentPlan plan;
    plan.coord = config.distribution();
    plan.parameters["alpha"] = config.alpha;

    if (kind == "hanson-wright") {
        const SymMatrix a = load_or_sample_matrix(config, 0);
        const NormBundle norms = norm_bundle(a);
        const Eigen::VectorXd vars = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(a.n()), plan.coord.variance());
        const double K = resolve_K(config, plan.coord, alpha);
        plan.stat = StatisticSpec::quadratic_form(a, vars);
        plan.curve = hanson_wright_curve(K, norms.hs, norms.op, alpha, C);
        plan.unit_scale = K * K * norms.hs;
        plan.parameters.update({{"K", K}, {"n", a.n()}, {"hs", norms.hs}, {"op", norms.op}, {"row_max", norms.row_max}});
    } else if (kind == "uniform-hw") {
        std::vector<SymMatrix> family;
        const std::uint64_t size = config.matrix_file ? 1 : config.family_size;
        for (std::uint64_t i = 0; i < size; ++i) family.push_back(load_or_sample_matrix(config, i));
        double sup_op = 0.0;
        for (const auto& a : family) sup_op = std::max(sup_op, operator_norm(a));
        const std::size_t dim = family.front().n();
        const Eigen::VectorXd vars = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), plan.coord.variance());
        const double K = resolve_K(config, plan.coord, alpha);
        const double k_star = max_orlicz_bound(dim, K, alpha);
        const MeanEstimate e_sup = center_estimate(plan.coord, StatisticSpec::sup_matrix_norm(family),
                                                   pilot_size(config), *config.seed,
                                                   static_cast<unsigned>(config.workers));
        plan.stat = StatisticSpec::sup_quadratic_forms(family, vars);
        plan.curve = uniform_hw_curve(k_star, e_sup.mean, sup_op, alpha, C);
        plan.parameters.update({{"K", K}, {"K_star", k_star}, {"E_sup_AX", e_sup.mean}, {"E_sup_AX_se", e_sup.std_error},
                                {"sup_op", sup_op}, {"family_size", family.size()}});
    } else if (kind == "convex-conc") {
        const double K = resolve_K(config, plan.coord, alpha);
        const double k_star = max_orlicz_bound(config.m * n, K, alpha);
        plan.stat = StatisticSpec::largest_singular_value(config.m, n);
        ConvexParams params;
        params.k_star = k_star;
        params.alpha = alpha;
        params.c = c;
        plan.curve = convex_concentration_curve(ConvexMode::convex_orlicz, params);
        plan.parameters.update({{"K", K}, {"K_star", k_star}, {"m", config.m}, {"n", n}});
    } else if (kind == "classical-convex") {
        const double bound = plan.coord.magnitude_bound();
        if (!std::isfinite(bound)) throw std::invalid_argument("classical-convex needs a bounded coordinate law");
        const Eigen::MatrixXd row = Eigen::MatrixXd::Constant(1, static_cast<Eigen::Index>(n), 1.0 / std::sqrt(double(n)));
        plan.stat = StatisticSpec::random_series_norm(row, SeriesNorm::sup_linear);
        ConvexParams params;
        params.a = -bound;
        params.b = bound;
        params.c = c;
        plan.curve = convex_concentration_curve(ConvexMode::bounded_classical, params);
        plan.parameters.update({{"a", -bound}, {"b", bound}, {"n", n}});
    } else if (kind == "tensor" || kind == "tensor-pi" || kind == "tensor-lsi") {
        plan.coord = TensorSpec{n, d, plan.coord}.unit_coordinate();
        plan.stat = StatisticSpec::tensor_lipschitz(n, d, TensorFunction::euclidean_norm, config.memory_budget);
        if (kind == "tensor") {
            const double K = resolve_K(config, plan.coord, alpha);
            plan.curve = tensor_curve(n, d, K, alpha, c, config.bound_C_range);
            plan.parameters["K"] = K;
        } else {
            const auto which = kind == "tensor-lsi" ? FunctionalInequality::lsi : FunctionalInequality::poincare;
            plan.curve = tensor_functional_curve(n, d, config.bound_sigma, which, c, config.bound_C_range);
            plan.parameters["sigma"] = config.bound_sigma;
        }
        plan.parameters.update({{"n", n}, {"d", d}});
    } else if (kind == "euclid-norm") {
        const double K = resolve_K(config, plan.coord, alpha);
        plan.stat = StatisticSpec::norm_deviation(n);
        plan.stat.scale = K * K;
        plan.curve = euclidean_norm_curve(alpha, c);
        plan.parameters.update({{"K", K}, {"n", n}});
    } else if (kind == "product-tail" || kind == "max-product-tail") {
        plan.coord = TensorSpec{n, d, plan.coord}.unit_coordinate();
        const double K = resolve_K(config, plan.coord, alpha);
        if (kind == "product-tail") {
            plan.stat = StatisticSpec::product_of_norms(n, d);
            plan.curve = product_tail_curve(n, d, K, alpha, c);
        } else {
            plan.stat = StatisticSpec::max_product(n, d);
            plan.curve = max_product_tail_curve(n, d, K, alpha, c);
        }
        plan.parameters.update({{"K", K}, {"n", n}, {"d", d}});
    } else if (kind == "max-tail") {
        const double K = resolve_K(config, plan.coord, alpha);
        plan.coord = plan.coord.scaled(1.0 / K);
        plan.stat = StatisticSpec::max_abs(n);
        plan.center = max_tail_shift(n, alpha);
        plan.curve = max_tail_curve(n, alpha);
        if (config.bound_c) plan.curve = plan.curve.with_knob(c);
        plan.parameters.update({{"K", K}, {"n", n}, {"shift", *plan.center}});
    } else {
        throw ParseError("unsupported experiment kind", 0, "experiment.kind");
    }

    plan.t_grid = config.t_grid(config.t_unit == "scale" ? plan.unit_scale : 1.0);
    plan.parameters["unit_scale"] = plan.unit_scale;
    return plan;
}

std::string default_output_root() {
    const char* env = std::getenv("ALPHACONC_OUTPUT_ROOT");
    return env && *env ? env : "alphaconc-out";
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::string& output_root,
                                 bool force_calibration) {
    const ExperimentPlan plan = plan_experiment(config);
    TailOptions options;
    options.N = config.N;
    options.seed = *config.seed;
    options.conf_level = config.conf_level;
    options.workers = static_cast<unsigned>(config.workers);
    options.center = plan.center;
    options.pilot_N = config.pilot_N;

    ExperimentOutcome out;
    out.estimate = empirical_tail(plan.coord, plan.stat, plan.t_grid, options);
    out.curve = plan.curve;
    const bool calibrate = config.calibration_enabled || force_calibration;
    CalibrationStatus verdict;
    if (calibrate) {
        out.calibration =
            min_dominating_constant(out.estimate, plan.curve, config.calibration_min, config.calibration_max);
        out.curve = plan.curve.with_knob(out.calibration->value);
        out.domination = out.calibration->report;
        verdict = out.calibration->status;
    } else {
        out.domination = domination_report(out.estimate, plan.curve);
        verdict = out.domination.verdict;
    }
    out.exit_code = verdict == CalibrationStatus::dominated ? 0 : 2;

    const std::filesystem::path dir = std::filesystem::path(output_root) / config_hash(config);
    std::filesystem::create_directories(dir);
    out.output_dir = dir.string();

    std::ostringstream csv;
    out.estimate.write_csv(csv);
    write_text(dir / "estimate.csv", csv.str());
    write_text(dir / "bound.json", out.curve.to_json().dump(2) + "\n");

    nlohmann::json calibration_json;
    if (out.calibration) {
        calibration_json = out.calibration->to_json();
        calibration_json["enabled"] = true;
    } else {
        calibration_json = {{"enabled", false}, {"report", out.domination.to_json()}};
    }
    write_text(dir / "calibration.json", calibration_json.dump(2) + "\n");

    std::ostringstream plot;
    plot << "t,p_hat,ci_high,bound\n";
    for (std::size_t i = 0; i < out.estimate.t_grid.size(); ++i) {
        const double t = out.estimate.t_grid[i];
        const auto b = out.curve.in_validity(t) ? out.curve.evaluate(t) : std::nullopt;
        plot << format_double(t) << ',' << format_double(out.estimate.p_hat[i]) << ','
             << format_double(out.estimate.ci_high[i]) << ',' << (b ? format_double(*b) : "") << '\n';
    }
    write_text(dir / "plot.csv", plot.str());

    // workers is left out so the report is identical at any thread count
    nlohmann::json cfg;
    for (const auto& key : config_keys()) {
        if (key == "workers") continue;
        if (const auto v = get_config_value(config, key)) cfg[key] = *v;
    }
    nlohmann::json report = {{"schema_version", kReportSchemaVersion},
                             {"config", cfg},
                             {"config_hash", config_hash(config)},
                             {"parameters", plan.parameters},
                             {"estimate", out.estimate.to_json()},
                             {"bound", out.curve.to_json()},
                             {"calibration", calibration_json},
                             {"verdict", to_string(verdict)},
                             {"exit_code", out.exit_code}};
    write_text(dir / "report.json", report.dump(2) + "\n");
    return out;
}

}  // namespace alphaconc
