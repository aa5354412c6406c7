// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include "alphaconc/bounds.hpp"
#include "alphaconc/calibrate.hpp"
#include "alphaconc/config.hpp"
#include "alphaconc/distributions.hpp"
#include "alphaconc/experiment.hpp"
#include "alphaconc/montecarlo.hpp"
#include "alphaconc/orlicz.hpp"
#include "alphaconc/specnorms.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace alphaconc;

namespace {

// Tolerances and budgets.
constexpr double kOrliczRelTol = 0.05;            // 1
constexpr double kOrliczTimeLimit = 30.0;         // 1, seconds
constexpr std::size_t kOrliczDraws = 1000000;     // 1
constexpr std::size_t kMaxDraws = 100000;         // 2
constexpr std::size_t kMomentDraws = 1000000;     // 3
constexpr double kMomentSlackSE = 2.0;            // 3
constexpr std::uint64_t kHwN = 200000;            // 4
constexpr double kHwMaxC = 50.0;                  // 4
constexpr double kHwMaxDrift = 0.15;              // 4
constexpr double kHwTimeLimit = 120.0;            // 4, seconds per (alpha, ensemble)
constexpr std::size_t kAl12Matrices = 50;         // 5
constexpr double kAl12Tol = 1e-3;                 // 5
constexpr double kEuclidMinC = 0.05;              // 6
constexpr double kCompositionTol = 1e-12;         // 11

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i) t[i] = lo * std::pow(hi / lo, double(i) / (points - 1));
    t.back() = hi;
    return t;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i) t[i] = lo + (hi - lo) * double(i) / (points - 1);
    t.back() = hi;
    return t;
}

TailEstimate run_tail(const DistributionSpec& coord, const StatisticSpec& stat, const std::vector<double>& grid,
                      std::uint64_t N, std::uint64_t seed, std::uint64_t pilot_N = 0) {
    TailOptions opt;
    opt.N = N;
    opt.seed = seed;
    opt.pilot_N = pilot_N;
    return empirical_tail(coord, stat, grid, opt);
}

// 1. Closed-form Orlicz norms recovered from samples.
void orlicz_closed_forms(Outcome& out) {
    const auto start = Clock::now();
    for (double a : {0.5, 1.0, 1.5, 2.0}) {
        const auto x = sample(DistributionSpec::weibull(a), kOrliczDraws, {101, static_cast<std::uint64_t>(a * 10)});
        const double est = orlicz_norm_empirical(x, AlphaParam(a)).value;
        const double exact = std::pow(2.0, 1.0 / a);
        out.detail << " weibull(" << a << ")=" << fmt(est) << "/" << fmt(exact);
        out.require(std::abs(est / exact - 1.0) <= kOrliczRelTol, "weibull " + fmt(a));
    }
    const auto g = sample(DistributionSpec::gaussian(), kOrliczDraws, {102, 0});
    const double est = orlicz_norm_empirical(g, AlphaParam(2.0)).value;
    const double exact = std::sqrt(8.0 / 3.0);
    out.detail << " gaussian=" << fmt(est) << "/" << fmt(exact);
    out.require(std::abs(est / exact - 1.0) <= kOrliczRelTol, "gaussian");
    const double elapsed = seconds_since(start);
    out.detail << " time=" << fmt(elapsed, 3) << "s";
    out.require(elapsed < kOrliczTimeLimit, "runtime");
}

// 2. Empirical norm of the maximum against the explicit maximal bound.
void maximal_norm_bound(Outcome& out) {
    int violations = 0;
    for (std::size_t n : {10, 100, 1000}) {
        // maxima of |G| once per n, rescaled per alpha
        const auto maxima = sample_statistic(DistributionSpec::gaussian(), StatisticSpec::max_abs(n), kMaxDraws,
                                             {200, n});
        for (double a : {0.5, 1.0, 2.0}) {
            const AlphaParam alpha(a);
            const auto K = a == 2.0 ? orlicz_norm_analytic(DistributionSpec::gaussian(), alpha)
                                    : orlicz_norm_quadrature(DistributionSpec::gaussian(), alpha);
            std::vector<double> scaled(maxima.size());
            for (std::size_t i = 0; i < maxima.size(); ++i) scaled[i] = maxima[i] / K->value;
            const double est = orlicz_norm_empirical(scaled, alpha).value;
            const double bound = max_orlicz_bound(n, 1.0, alpha);
            if (est > bound) ++violations;
            out.detail << " n=" << n << ",a=" << a << ":" << fmt(est, 3) << "<=" << fmt(bound, 3);
        }
    }
    out.require(violations == 0, std::to_string(violations) + " violations");
}

// 3. L^p growth constant of the tail/moment equivalence.
void moment_growth(Outcome& out) {
    for (double a : {0.5, 1.0, 1.5, 2.0}) {
        const AlphaParam alpha(a);
        const double k2 = equivalence_constants(alpha, 1.0).k2();
        const auto x = sample(DistributionSpec::weibull(a), kMomentDraws, {300, static_cast<std::uint64_t>(a * 10)});
        double worst = 0.0;
        for (double p : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const auto est = lp_norm_estimate(x, p);
            const double bound = k2 * std::pow(p, 1.0 / a);
            worst = std::max(worst, (est.value - kMomentSlackSE * est.std_error) / bound);
            out.require(est.value - kMomentSlackSE * est.std_error <= bound, "a=" + fmt(a) + ",p=" + fmt(p));
        }
        out.detail << " a=" << a << ":max(est-2SE)/bound=" << fmt(worst, 3);
    }
}

// 4. Quadratic forms: calibrated constant, its size and its stability in N.
void hanson_wright(Outcome& out) {
    const std::size_t n = 100;
    for (double a : {0.5, 1.0, 2.0}) {
        for (Ensemble e : {Ensemble::goe, Ensemble::sparse_sign}) {
            const auto start = Clock::now();
            const AlphaParam alpha(a);
            const auto coord = DistributionSpec::weibull(a);
            const double K = orlicz_norm_analytic(coord, alpha)->value;
            const SymMatrix A = sample_ensemble(e, n, {400, 2}, 0.1);
            const NormBundle norms = norm_bundle(A);
            const auto stat = StatisticSpec::quadratic_form(A, Eigen::VectorXd::Constant(n, coord.variance()));
            const auto grid = log_grid(0.1 * K * K * norms.hs, 20.0 * K * K * norms.hs, 30);
            const auto curve = hanson_wright_curve(K, norms.hs, norms.op, alpha);

            const auto base = run_tail(coord, stat, grid, kHwN, 401);
            const auto cal = min_dominating_constant(base, curve, 1e-3, 1e3);
            const auto twice = run_tail(coord, stat, grid, 2 * kHwN, 401);
            const auto cal2 = min_dominating_constant(twice, curve, 1e-3, 1e3);
            const double drift = std::abs(cal2.value - cal.value) / cal.value;
            const double elapsed = seconds_since(start);

            const std::string tag = "a=" + fmt(a) + "," + to_string(e);
            out.detail << " " << tag << ":C=" << fmt(cal.value) << "->" << fmt(cal2.value) << ",drift="
                       << fmt(100 * drift, 3) << "%," << fmt(elapsed, 3) << "s";
            out.require(cal.status == CalibrationStatus::dominated, tag + " status " + to_string(cal.status));
            out.require(cal.value <= kHwMaxC, tag + " C > 50");
            out.require(drift < kHwMaxDrift, tag + " drift");
            out.require(elapsed < kHwTimeLimit, tag + " runtime");
        }
    }
}

// 5. AL12 norms between the grid oracle and the stated upper bounds; the
// raw-entry formulation agrees with the radial reduction.
void al12_sandwich(Outcome& out) {
    std::mt19937_64 rng(500);
    std::normal_distribution<double> normal;
    int checks = 0, failures = 0;
    double worst_reparam = 0.0, worst_grid = 0.0;
    for (std::size_t m = 0; m < kAl12Matrices; ++m) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(m % 4);
        Eigen::MatrixXd A(n, n);
        for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = normal(rng);
        for (double p : {2.0, 4.0, 8.0}) {
            for (double a : {1.5, 2.0}) {
                const AlphaParam alpha(a);
                const auto coupled = al12_norm_coupled_detailed(A, p, alpha);
                const double decoupled = al12_norm_decoupled(A, p, alpha);
                const double grid_c = oracle::al12_coupled_grid(A, p, a);
                const double grid_d = oracle::al12_decoupled_grid(A, p, a);
                worst_grid = std::min({worst_grid, coupled.value - grid_c, decoupled - grid_d});

                // raw entries x_ij = z_i a_ij / |a_i.| built from the radial solution
                Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
                double cost = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double r = A.row(i).norm();
                    if (r > 0.0) x.row(i) = coupled.x[i] * A.row(i) / r;
                    cost += oracle::phi(x.row(i).norm(), a);
                }
                const double lifted = 2.0 * (A.array() * x.array()).sum();
                const double raw = oracle::al12_raw_entries(A, p, a, 1000 * m + static_cast<std::uint64_t>(p));
                const double scale = std::max(1.0, coupled.value);
                worst_reparam = std::max({worst_reparam, std::abs(lifted - coupled.value) / scale,
                                          std::max(0.0, coupled.value - raw) / scale,
                                          std::max(0.0, raw - coupled.value) / scale});

                const bool ok = coupled.value <= al12_coupled_upper(A, p) && decoupled <= al12_decoupled_upper(A, p, alpha) &&
                                coupled.value >= grid_c - kAl12Tol && decoupled >= grid_d - kAl12Tol &&
                                cost <= p * (1.0 + 1e-9) && std::abs(lifted - coupled.value) <= kAl12Tol * scale &&
                                raw <= coupled.value + kAl12Tol * scale && raw >= coupled.value - kAl12Tol * scale;
                ++checks;
                if (!ok) {
                    ++failures;
                    out.detail << " fail(m=" << m << ",p=" << p << ",a=" << a << ":c=" << fmt(coupled.value, 8)
                               << ",gc=" << fmt(grid_c, 8) << ",d=" << fmt(decoupled, 8) << ",gd=" << fmt(grid_d, 8)
                               << ",raw=" << fmt(raw, 8) << ")";
                }
            }
        }
    }
    out.detail << " checks=" << checks << " min(opt-grid)=" << fmt(worst_grid, 3)
               << " max reparam gap=" << fmt(worst_reparam, 3);
    out.require(failures == 0, std::to_string(failures) + " failures");
}

// 6. Euclidean norm fluctuation of a gaussian vector.
void euclidean_norm(Outcome& out) {
    const std::size_t n = 400;
    const auto coord = DistributionSpec::gaussian();
    const double K = orlicz_norm_analytic(coord, AlphaParam(2.0))->value;
    auto stat = StatisticSpec::norm_deviation(n);
    stat.scale = K * K;
    const auto est = run_tail(coord, stat, log_grid(0.05, 3.0, 30), 200000, 600);
    const auto cal = min_dominating_constant(est, euclidean_norm_curve(AlphaParam(2.0)), 1e-3, 1e3);
    out.detail << " c=" << fmt(cal.value) << " status=" << to_string(cal.status);
    out.require(cal.status == CalibrationStatus::dominated, "status");
    out.require(cal.value >= kEuclidMinC, "c < 0.05");
}

// 7. Product and max-product tails of tensor factor norms.
void tensor_maximal(Outcome& out) {
    const std::size_t n = 50, d = 3;
    const auto coord = DistributionSpec::gaussian();
    const AlphaParam alpha(2.0);
    const double K = orlicz_norm_analytic(coord, alpha)->value;
    const double hi = 2.0 * std::pow(double(n), d / 2.0);

    const auto prod = run_tail(coord, StatisticSpec::product_of_norms(n, d), linear_grid(0.0, hi, 40), 100000, 700);
    const auto cal_p = min_dominating_constant(prod, product_tail_curve(n, d, K, alpha), 1e-4, 1e4);
    const auto maxp = run_tail(coord, StatisticSpec::max_product(n, d), linear_grid(0.0, 2.0, 40), 100000, 701);
    const auto cal_m = min_dominating_constant(maxp, max_product_tail_curve(n, d, K, alpha), 1e-4, 1e4);
    out.detail << " product c=" << fmt(cal_p.value) << " (" << to_string(cal_p.status) << "), max-product c="
               << fmt(cal_m.value) << " (" << to_string(cal_m.status) << ")";
    out.require(cal_p.status == CalibrationStatus::dominated && cal_p.report.excluded_t.empty(), "product");
    out.require(cal_m.status == CalibrationStatus::dominated && cal_m.report.excluded_t.empty(), "max-product");
}

// 8. Convex concentration: singular value, tensor Lipschitz function and the
// classical bounded case at its exact constants.
void convex_concentration(Outcome& out) {
    const auto coord = DistributionSpec::gaussian();
    const AlphaParam alpha(2.0);
    const double K = orlicz_norm_analytic(coord, alpha)->value;

    ConvexParams params;
    params.k_star = max_orlicz_bound(30 * 30, K, alpha);
    params.alpha = alpha;
    const auto sv = run_tail(coord, StatisticSpec::largest_singular_value(30, 30), log_grid(0.05, 5.0, 25), 50000,
                             800, 50000);
    const auto cal_sv = min_dominating_constant(sv, convex_concentration_curve(ConvexMode::convex_orlicz, params),
                                                1e-3, 1e3);
    out.detail << " sigma_max c=" << fmt(cal_sv.value) << " (" << to_string(cal_sv.status) << ")";
    out.require(cal_sv.status == CalibrationStatus::dominated, "singular value");

    const std::size_t n = 10, d = 3;
    const auto unit = TensorSpec{n, d, coord}.unit_coordinate();
    const auto tcurve = tensor_curve(n, d, K, alpha);
    const auto grid = linear_grid(0.25, 1.2 * tcurve.valid_hi, 30);
    const auto ten = run_tail(unit, StatisticSpec::tensor_lipschitz(n, d, TensorFunction::euclidean_norm), grid,
                              100000, 801);
    const auto cal_t = min_dominating_constant(ten, tcurve, 1e-3, 1e3);
    out.detail << " tensor c=" << fmt(cal_t.value) << " (" << to_string(cal_t.status) << ", "
               << cal_t.report.excluded_t.size() << " points beyond validity)";
    out.require(cal_t.status == CalibrationStatus::dominated, "tensor");

    const std::size_t m = 100;
    const Eigen::MatrixXd row = Eigen::MatrixXd::Constant(1, m, 1.0 / std::sqrt(double(m)));
    ConvexParams bounded;
    bounded.a = -1.0;
    bounded.b = 1.0;
    const auto sum = run_tail(DistributionSpec::rademacher(), StatisticSpec::random_series_norm(row, SeriesNorm::sup_linear),
                              linear_grid(0.1, 6.0, 30), 100000, 802);
    const auto rep = domination_report(sum, convex_concentration_curve(ConvexMode::bounded_classical, bounded));
    double min_margin = 1.0;
    for (const auto& mgn : rep.margins) min_margin = std::min(min_margin, mgn.value_or(1.0));
    out.detail << " classical: " << to_string(rep.verdict) << " min margin=" << fmt(min_margin, 3);
    out.require(rep.verdict == CalibrationStatus::dominated, "classical bounded case");
}

// 9. Diagonal comparison on random finite families.
void diag_comparison(Outcome& out) {
    const std::size_t n = 20;
    int passed = 0;
    for (std::uint64_t f = 0; f < 20; ++f) {
        std::vector<SymMatrix> family;
        const std::size_t size = 2 + f % 4;
        for (std::size_t i = 0; i < size; ++i) {
            const Ensemble e = static_cast<Ensemble>((f + i) % 3);
            family.push_back(sample_ensemble(e, n, {900 + f, 2 + i}, 0.2));
        }
        const auto coord = f % 2 ? DistributionSpec::rademacher() : DistributionSpec::weibull(1.0);
        const auto r = diag_comparison_check(family, coord, 20000, 950 + f);
        if (r.pass) ++passed;
    }
    out.detail << " " << passed << "/20 families pass";
    out.require(passed == 20, "family failures");
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// 10. Byte-identical outputs at 1 and 8 workers.
void determinism(Outcome& out) {
    const auto root = std::filesystem::temp_directory_path() / "alphaconc-acceptance-determinism";
    std::filesystem::remove_all(root);
    const std::vector<std::string> configs = {
        "experiment.kind = hanson-wright\nseed = 11\nn = 40\nN = 30000\nalpha = 1\ndistribution.family = weibull\n"
        "t_grid.unit = scale\nt_grid.min = 0.1\nt_grid.max = 10\ncalibration.enabled = true\n",
        "experiment.kind = convex-conc\nseed = 12\nn = 8\nm = 6\nN = 20000\npilot_N = 20000\n"
        "t_grid.min = 0.05\nt_grid.max = 4\n",
        "experiment.kind = max-tail\nseed = 13\nn = 30\nN = 20000\nalpha = 1\ndistribution.family = weibull\n"
        "t_grid.scale = linear\nt_grid.min = 0\nt_grid.max = 8\n",
    };
    int identical = 0;
    for (const auto& text : configs) {
        auto config = parse_config_text(text);
        config.workers = 1;
        const auto one = run_experiment(config, (root / "w1").string());
        config.workers = 8;
        const auto eight = run_experiment(config, (root / "w8").string());
        bool same = true;
        for (const char* f : {"estimate.csv", "plot.csv", "bound.json", "calibration.json", "report.json"}) {
            same = same && read_file(std::filesystem::path(one.output_dir) / f) ==
                               read_file(std::filesystem::path(eight.output_dir) / f);
        }
        if (same) ++identical;
        out.detail << " " << config.kind << (same ? ":identical" : ":DIFFERENT");
    }
    out.require(identical == int(configs.size()), "outputs differ");
}

// 11. Structural identities between formulas.
void structural_identities(Outcome& out) {
    double worst = 0.0;
    for (std::size_t n : {1, 10, 1000}) {
        for (double a : {0.5, 1.0, 2.0}) {
            const AlphaParam alpha(a);
            const auto tail = max_tail_curve(n, alpha);
            const double c = tail.constants.at("c_alpha") * tail.rate();
            const double composed =
                std::pow(c, -1.0 / a) * shifted_tail_to_orlicz(std::pow(c, 1.0 / a) * tail.constants.at("shift"), alpha);
            const double direct = max_orlicz_bound(n, 1.0, alpha);
            worst = std::max(worst, std::abs(composed - direct) / direct);
        }
    }
    out.detail << " composition rel err=" << fmt(worst, 3);
    out.require(worst <= kCompositionTol, "composition");

    const double K = 1.1, hs = 3.0, op = 0.9;
    double hw_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double t = 0.15 * i;
        const double classical = std::min(t * t / (std::pow(K, 4) * hs * hs), t / (K * K * op));
        hw_worst = std::max(hw_worst, std::abs(hanson_wright_curve(K, hs, op, AlphaParam(2.0)).exponent(t) - classical));
    }
    out.detail << " HW exponent max diff=" << fmt(hw_worst, 3);
    out.require(hw_worst <= 1e-12, "hanson-wright exponent");

    std::mt19937_64 rng(1100);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        const double c2 = 1.0 + 4.0 * u(rng) + 1e-6;
        const double c1 = c2 * (1.0 + 4.0 * u(rng)) + 1e-6;
        const double c = 0.05 + 4.0 * u(rng);
        const double r = std::log(c1) / c * (1.0 + 5.0 * u(rng));  // c1 exp(-c r) <= 1
        if (c1 * std::exp(-c * r) > c2 * std::exp(-prefactor_adjust(c1, c2, c) * r) * (1.0 + 1e-12)) ++bad;
    }
    out.detail << " prefactor violations=" << bad << "/100";
    out.require(bad == 0, "prefactor_adjust");
}

struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "orlicz closed forms", orlicz_closed_forms},
        {2, "explicit maximal norm bound", maximal_norm_bound},
        {3, "moment growth constant", moment_growth},
        {4, "generalized hanson-wright", hanson_wright},
        {5, "AL12 norm sandwich", al12_sandwich},
        {6, "euclidean norm fluctuation", euclidean_norm},
        {7, "tensor maximal bounds", tensor_maximal},
        {8, "convex concentration", convex_concentration},
        {9, "diagonal comparison", diag_comparison},
        {10, "worker determinism", determinism},
        {11, "structural identities", structural_identities},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Outcome out;
        const auto start = Clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        if (!out.pass) ++failed;
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", "
                  << fmt(seconds_since(start), 3) << "s):" << out.detail.str() << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
