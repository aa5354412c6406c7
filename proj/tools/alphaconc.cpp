#include "alphaconc/bounds.hpp"
#include "alphaconc/config.hpp"
#include "alphaconc/distributions.hpp"
#include "alphaconc/errors.hpp"
#include "alphaconc/experiment.hpp"
#include "alphaconc/orlicz.hpp"
#include "alphaconc/specnorms.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace alphaconc;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct DistOptions {
    std::string family = "gaussian";
    double value = 0.0, a = -1.0, b = 1.0, shape = 2.0, scale = 1.0;

    void add_to(CLI::App* app) {
        app->add_option("--family", family, "constant | rademacher | uniform | gaussian | weibull");
        app->add_option("--value", value, "constant value");
        app->add_option("--a", a, "uniform lower end");
        app->add_option("--b", b, "uniform upper end");
        app->add_option("--shape", shape, "weibull shape");
        app->add_option("--scale", scale, "overall scale");
    }

    DistributionSpec spec() const {
        ExperimentConfig c;
        c.dist_family = family;
        c.dist_value = value;
        c.dist_a = a;
        c.dist_b = b;
        c.dist_shape = shape;
        c.dist_scale = scale;
        return c.distribution();
    }
};

// Config file plus one --<key> flag per config key.
struct ConfigOptions {
    std::string path;
    std::string out_root;
    std::map<std::string, std::string> overrides;

    void add_to(CLI::App* app) {
        app->add_option("config", path, "experiment config file")->required();
        app->add_option("--out", out_root, "output root (default: $ALPHACONC_OUTPUT_ROOT or alphaconc-out)");
        for (const auto& key : config_keys()) {
            app->add_option_function<std::string>(
                "--" + key, [this, key](const std::string& v) { overrides[key] = v; }, "override " + key);
        }
    }

    ExperimentConfig load() const {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open config file '" + path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        std::istringstream lines(text.str());
        std::string kept, line;
        // Blank out file lines for overridden keys so line numbers stay valid.
        while (std::getline(lines, line)) {
            std::string key = line.substr(0, line.find('='));
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t\r") + 1);
            kept += overrides.count(key) ? "\n" : line + "\n";
        }
        for (const auto& [key, value] : overrides) kept += key + " = " + value + "\n";
        return parse_config_text(kept);
    }

    std::string root() const { return out_root.empty() ? default_output_root() : out_root; }
};

int print_report(const std::filesystem::path& dir) {
    std::ifstream in(dir / "report.json");
    if (!in) throw std::runtime_error("no report.json in " + dir.string());
    const auto report = nlohmann::json::parse(in);
    std::cout << "kind: " << report["config"]["experiment.kind"].get<std::string>() << "\n";
    std::cout << "verdict: " << report["verdict"].get<std::string>() << "\n";
    const auto& cal = report["calibration"];
    if (cal.value("enabled", false)) {
        std::cout << "calibrated " << cal["constant"].get<std::string>() << " = " << fmt(cal["value"].get<double>())
                  << " (" << cal["status"].get<std::string>() << ")\n";
    }
    std::ifstream plot(dir / "plot.csv");
    std::cout << plot.rdbuf();
    return report["exit_code"].get<int>();
}

int run_pipeline(const ConfigOptions& opts, bool force_calibration) {
    const ExperimentConfig config = opts.load();
    const ExperimentOutcome outcome = run_experiment(config, opts.root(), force_calibration);
    std::cout << "output: " << outcome.output_dir << "\n";
    std::cout << "verdict: " << to_string(outcome.domination.verdict) << "\n";
    if (outcome.calibration) {
        std::cout << "calibrated " << outcome.calibration->constant_name << " = " << fmt(outcome.calibration->value)
                  << " (" << to_string(outcome.calibration->status) << ")\n";
    }
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concentration bounds for alpha-subexponential random variables"};
    app.require_subcommand(1);
    int exit_code = 0;

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "draw i.i.d. samples, one per line");
    DistOptions sample_dist;
    sample_dist.add_to(sample_cmd);
    std::uint64_t sample_count = 10, sample_seed = 0;
    unsigned sample_workers = 1;
    sample_cmd->add_option("--count", sample_count, "number of draws");
    sample_cmd->add_option("--seed", sample_seed, "seed")->required();
    sample_cmd->add_option("--workers", sample_workers, "worker threads");
    sample_cmd->callback([&] {
        const auto draws = sample(sample_dist.spec(), sample_count, {sample_seed, 0}, sample_workers);
        char buf[32];
        for (double x : draws) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            std::cout << buf << "\n";
        }
    });

    // orlicz
    auto* orlicz_cmd = app.add_subcommand("orlicz", "Psi_alpha norm of a sample file or a distribution");
    DistOptions orlicz_dist;
    orlicz_dist.add_to(orlicz_cmd);
    double orlicz_alpha = 2.0;
    std::string orlicz_file;
    std::uint64_t orlicz_count = 1000000, orlicz_seed = 1;
    orlicz_cmd->add_option("--alpha", orlicz_alpha, "tail order in (0, 2]");
    orlicz_cmd->add_option("--file", orlicz_file, "sample file (one value per line)");
    orlicz_cmd->add_option("--count", orlicz_count, "draws for the empirical estimate of a distribution");
    orlicz_cmd->add_option("--seed", orlicz_seed, "seed for the empirical estimate");
    orlicz_cmd->callback([&] {
        const AlphaParam alpha(orlicz_alpha);
        if (!orlicz_file.empty()) {
            std::ifstream in(orlicz_file);
            if (!in) throw ParseError("cannot open sample file '" + orlicz_file + "'");
            std::vector<double> xs;
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                char* end = nullptr;
                const double v = std::strtod(line.c_str(), &end);
                if (end == line.c_str()) throw ParseError("bad sample value", line_no);
                xs.push_back(v);
            }
            const auto v = orlicz_norm_empirical(xs, alpha);
            std::cout << "empirical " << fmt(v.value) << "\n";
            return;
        }
        const DistributionSpec spec = orlicz_dist.spec();
        if (auto v = orlicz_norm_analytic(spec, alpha)) std::cout << "analytic " << fmt(v->value) << "\n";
        if (auto v = orlicz_norm_quadrature(spec, alpha)) std::cout << "quadrature " << fmt(v->value) << "\n";
        const auto xs = sample(spec, orlicz_count, {orlicz_seed, 0});
        std::cout << "empirical " << fmt(orlicz_norm_empirical(xs, alpha).value) << "\n";
    });

    // norms
    auto* norms_cmd = app.add_subcommand("norms", "matrix norms and AL12 norms of a matrix file");
    std::string norms_file;
    double norms_p = 2.0, norms_alpha = 2.0;
    norms_cmd->add_option("file", norms_file, "matrix file (text/CSV, or .bin)")->required();
    norms_cmd->add_option("--p", norms_p, "moment order for the AL12 norms (>= 2)");
    norms_cmd->add_option("--alpha", norms_alpha, "tail order for the AL12 norms, in (1, 2]");
    norms_cmd->callback([&] {
        const SymMatrix a(read_matrix_file(norms_file));
        const NormBundle b = norm_bundle(a);
        if (a.symmetrized()) std::cout << "note: input was not symmetric; using (A + A^T)/2\n";
        std::cout << "hs " << fmt(b.hs) << "\nop " << fmt(b.op) << "\nrow_max " << fmt(b.row_max) << "\ndiag_hs "
                  << fmt(b.diag_hs) << "\nmax_abs_diag " << fmt(b.max_abs_diag) << "\n";
        if (a.n() <= kAl12MaxDimension && norms_alpha > 1.0) {
            const AlphaParam alpha(norms_alpha);
            std::cout << "al12_coupled " << fmt(al12_norm_coupled(a.matrix(), norms_p, alpha)) << " (upper "
                      << fmt(al12_coupled_upper(a.matrix(), norms_p)) << ")\n";
            std::cout << "al12_decoupled " << fmt(al12_norm_decoupled(a.matrix(), norms_p, alpha)) << " (upper "
                      << fmt(al12_decoupled_upper(a.matrix(), norms_p, alpha)) << ")\n";
        }
    });

    // bound
    auto* bound_cmd = app.add_subcommand("bound", "print a tail bound curve at given t values");
    std::string bound_family = "hanson-wright";
    std::vector<double> bound_t{0.0, 1.0, 2.0};
    double b_alpha = 2.0, b_K = 1.0, b_hs = 1.0, b_op = 1.0, b_C = 1.0, b_c = 1.0, b_a = -1.0, b_b = 1.0;
    double b_kstar = 1.0, b_esup = 1.0, b_supop = 1.0, b_sigma = 1.0, b_gamma = 1.0, b_range = 1.0;
    std::size_t b_n = 10, b_d = 1;
    int b_mode = 1;
    bound_cmd->add_option("--family", bound_family, "bound family");
    bound_cmd->add_option("--t", bound_t, "t values")->delimiter(',');
    bound_cmd->add_option("--alpha", b_alpha);
    bound_cmd->add_option("--K", b_K);
    bound_cmd->add_option("--hs", b_hs);
    bound_cmd->add_option("--op", b_op);
    bound_cmd->add_option("--C", b_C);
    bound_cmd->add_option("--c", b_c);
    bound_cmd->add_option("--a", b_a);
    bound_cmd->add_option("--b", b_b);
    bound_cmd->add_option("--mode", b_mode, "classical-convex mode: 1 (two-sided) or 2 (separately convex)");
    bound_cmd->add_option("--k-star", b_kstar);
    bound_cmd->add_option("--e-sup", b_esup);
    bound_cmd->add_option("--sup-op", b_supop);
    bound_cmd->add_option("--sigma", b_sigma);
    bound_cmd->add_option("--gamma", b_gamma);
    bound_cmd->add_option("--C-range", b_range);
    bound_cmd->add_option("--n", b_n);
    bound_cmd->add_option("--d", b_d);
    bound_cmd->callback([&] {
        const AlphaParam alpha(b_alpha);
        TailBoundCurve curve;
        ConvexParams cp;
        cp.a = b_a;
        cp.b = b_b;
        cp.k_star = b_kstar;
        cp.alpha = alpha;
        cp.c = b_c;
        switch (parse_bound_family(bound_family)) {
            case BoundFamily::hanson_wright: curve = hanson_wright_curve(b_K, b_hs, b_op, alpha, b_C); break;
            case BoundFamily::convex_conc: curve = convex_concentration_curve(ConvexMode::convex_orlicz, cp); break;
            case BoundFamily::classical_convex:
                curve = convex_concentration_curve(
                    b_mode == 2 ? ConvexMode::separately_convex_bounded : ConvexMode::bounded_classical, cp);
                break;
            case BoundFamily::uniform_hw: curve = uniform_hw_curve(b_kstar, b_esup, b_supop, alpha, b_C); break;
            case BoundFamily::tensor: curve = tensor_curve(b_n, b_d, b_K, alpha, b_c, b_range); break;
            case BoundFamily::tensor_sharp:
                throw std::invalid_argument("tensor-sharp needs per-factor norms; use the library API");
            case BoundFamily::tensor_pi:
                curve = tensor_functional_curve(b_n, b_d, b_sigma, FunctionalInequality::poincare, b_c, b_range);
                break;
            case BoundFamily::tensor_lsi:
                curve = tensor_functional_curve(b_n, b_d, b_sigma, FunctionalInequality::lsi, b_c, b_range);
                break;
            case BoundFamily::euclid_norm: curve = euclidean_norm_curve(alpha, b_c); break;
            case BoundFamily::product_tail: curve = product_tail_curve(b_n, b_d, b_K, alpha, b_c); break;
            case BoundFamily::max_product_tail: curve = max_product_tail_curve(b_n, b_d, b_K, alpha, b_c); break;
            case BoundFamily::max_orlicz_shift: curve = max_tail_curve(b_n, alpha); break;
            case BoundFamily::subgaussian_alpha: curve = subgaussian_to_alpha(b_gamma, alpha); break;
        }
        std::cout << "t,bound\n";
        for (double t : bound_t) {
            const auto v = curve.evaluate(t);
            std::cout << fmt(t) << "," << (v ? fmt(*v) : "out-of-range") << "\n";
        }
    });

    // simulate / calibrate / report
    auto* simulate_cmd = app.add_subcommand("simulate", "run an experiment config and write reports");
    ConfigOptions simulate_opts;
    simulate_opts.add_to(simulate_cmd);
    simulate_cmd->callback([&] { exit_code = run_pipeline(simulate_opts, false); });

    auto* calibrate_cmd = app.add_subcommand("calibrate", "run an experiment with calibration enabled");
    ConfigOptions calibrate_opts;
    calibrate_opts.add_to(calibrate_cmd);
    calibrate_cmd->callback([&] { exit_code = run_pipeline(calibrate_opts, true); });

    auto* report_cmd = app.add_subcommand("report", "summarize an output directory or the run of a config");
    std::string report_target, report_root;
    report_cmd->add_option("target", report_target, "output directory or config file")->required();
    report_cmd->add_option("--out", report_root, "output root used to locate a config's directory");
    report_cmd->callback([&] {
        std::filesystem::path dir = report_target;
        if (!std::filesystem::is_directory(dir)) {
            const ExperimentConfig config = load_config(report_target);
            dir = std::filesystem::path(report_root.empty() ? default_output_root() : report_root) /
                  config_hash(config);
        }
        exit_code = print_report(dir);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const ParseError& e) {
        std::cerr << "config error";
        if (e.line()) std::cerr << " at line " << e.line();
        if (!e.key().empty()) std::cerr << " (key '" << e.key() << "')";
        std::cerr << ": " << e.what() << "\n";
        return 1;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
