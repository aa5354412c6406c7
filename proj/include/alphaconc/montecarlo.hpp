#pragma once

#include "alphaconc/bounds.hpp"
#include "alphaconc/distributions.hpp"
#include "alphaconc/specnorms.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace alphaconc {

enum class StatisticKind {
    coordinate,             // X_1
    max_abs,                // max_i |X_i|
    quadratic_form,         // X^T A X - sum a_ii var_i
    sup_quadratic_forms,    // max over a finite family of centered quadratic forms
    sup_matrix_norm,        // max over a finite family of |A X|_2
    euclid_deviation,       // |B X|_2, centered at |B|_HS
    norm_deviation,         // |X|_2, centered at sqrt(n)
    largest_singular_value, // sigma_max of an m x n matrix of coordinates
    random_series_norm,     // |M X|_2 or max_r <M_r, X>
    tensor_lipschitz,       // f(X_1 (x) ... (x) X_d) for a 1-Lipschitz convex f
    product_of_norms,       // prod_i |X_i|_2, centered at n^(d/2)
    max_product,            // max_k n^(-k/2) prod_{i<=k} |X_i|_2, centered at 1
};

std::string to_string(StatisticKind kind);

enum class SeriesNorm { euclidean, sup_linear };
enum class TensorFunction { euclidean_norm, linear, max_entry };

std::string to_string(TensorFunction f);
TensorFunction parse_tensor_function(const std::string& name);

/// A scalar functional of one draw of i.i.d. coordinates. The reported
/// deviation is (S - center) / scale; exceedance is two-sided or upper per
/// `sidedness`.
struct StatisticSpec {
    StatisticKind kind = StatisticKind::coordinate;
    std::size_t n = 1;  // coordinates per vector (or matrix columns)
    std::size_t m = 1;  // matrix rows (largest singular value)
    std::size_t d = 1;  // tensor order
    std::vector<SymMatrix> family;  // quadratic-form kinds and sup_matrix_norm
    Eigen::VectorXd variances;      // per-coordinate variances for centering
    Eigen::MatrixXd coefficients;   // euclid_deviation (B), random_series_norm (M)
    SeriesNorm series = SeriesNorm::euclidean;
    TensorFunction tensor_function = TensorFunction::euclidean_norm;
    std::optional<double> analytic_center;
    double scale = 1.0;
    double lipschitz = 1.0;
    Sidedness sidedness = Sidedness::two_sided;

    std::size_t draw_size() const;
    double evaluate(std::span<const double> draw) const;
    std::string describe() const;
    void validate() const;

    static StatisticSpec coordinate(Sidedness sidedness = Sidedness::two_sided);
    static StatisticSpec max_abs(std::size_t n);
    static StatisticSpec quadratic_form(const SymMatrix& a, const Eigen::VectorXd& variances);
    static StatisticSpec sup_quadratic_forms(std::vector<SymMatrix> family, const Eigen::VectorXd& variances);
    static StatisticSpec sup_matrix_norm(std::vector<SymMatrix> family);
    static StatisticSpec euclid_deviation(const Eigen::MatrixXd& b);
    static StatisticSpec norm_deviation(std::size_t n);
    static StatisticSpec largest_singular_value(std::size_t m, std::size_t n);
    static StatisticSpec random_series_norm(const Eigen::MatrixXd& coefficients, SeriesNorm norm);
    /// Throws ResourceError when n^d exceeds `budget`.
    static StatisticSpec tensor_lipschitz(std::size_t n, std::size_t d, TensorFunction f,
                                          std::size_t budget = kDefaultTensorBudget);
    static StatisticSpec product_of_norms(std::size_t n, std::size_t d);
    static StatisticSpec max_product(std::size_t n, std::size_t d);
};

/// Statistic values for `count` independent draws. Draw s uses chunk
/// s / kChunkSize of stream `key`, so the output does not depend on `workers`.
std::vector<double> sample_statistic(const DistributionSpec& coord, const StatisticSpec& stat, std::size_t count,
                                     StreamKey key, unsigned workers = 1);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Clopper-Pearson interval at level `conf` (alpha/2 in each tail).
struct BinomialInterval {
    double low = 0.0;
    double high = 1.0;
};
BinomialInterval clopper_pearson(std::uint64_t count, std::uint64_t n, double conf);
/// One-sided upper Clopper-Pearson limit at level `conf`.
double clopper_pearson_upper(std::uint64_t count, std::uint64_t n, double conf);

struct TailEstimate {
    std::vector<double> t_grid;
    std::vector<std::uint64_t> counts;
    std::uint64_t N = 0;
    std::vector<double> p_hat, ci_low, ci_high;
    std::uint64_t seed = 0;
    std::string descriptor;
    Sidedness sidedness = Sidedness::two_sided;
    double center = 0.0;
    double center_se = 0.0;
    double scale = 1.0;
    double conf_level = 0.95;

    void write_csv(std::ostream& out) const;
    nlohmann::json to_json() const;
};

/// Streams used by the harness for the main run and the pilot centering run.
inline constexpr std::uint64_t kMainStream = 0;
inline constexpr std::uint64_t kPilotStream = 1;

struct TailOptions {
    std::uint64_t N = 10000;
    std::uint64_t seed = 0;
    double conf_level = 0.95;
    unsigned workers = 1;
    std::optional<double> center;  // overrides analytic or pilot centering
    std::uint64_t pilot_N = 0;     // 0: max(1e5, 10 * grid points)
};

/// Pilot-run mean of the statistic and its standard error.
MeanEstimate center_estimate(const DistributionSpec& coord, const StatisticSpec& stat, std::uint64_t pilot_N,
                             std::uint64_t seed, unsigned workers = 1);

TailEstimate empirical_tail(const DistributionSpec& coord, const StatisticSpec& stat,
                            const std::vector<double>& t_grid, const TailOptions& options);

struct DiagComparison {
    MeanEstimate diag_side;  // E sup |Diag(A) W|_2
    MeanEstimate full_side;  // E sup |A W|_2
    bool pass = false;
};

/// Checks E sup_A |Diag(A) W|_2 <= E sup_A |A W|_2 up to 2 (SE_left + SE_right).
DiagComparison diag_comparison_check(const std::vector<SymMatrix>& family, const DistributionSpec& coord,
                                     std::uint64_t N, std::uint64_t seed, unsigned workers = 1);

}  // namespace alphaconc
