#include "alphaconc/montecarlo.hpp"

#include "alphaconc/errors.hpp"
#include "alphaconc/parallel.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace alphaconc {

std::string to_string(StatisticKind kind) {
    switch (kind) {
        case StatisticKind::coordinate: return "coordinate";
        case StatisticKind::max_abs: return "max-abs";
        case StatisticKind::quadratic_form: return "quadratic-form";
        case StatisticKind::sup_quadratic_forms: return "sup-quadratic-forms";
        case StatisticKind::sup_matrix_norm: return "sup-matrix-norm";
        case StatisticKind::euclid_deviation: return "euclid-deviation";
        case StatisticKind::norm_deviation: return "norm-deviation";
        case StatisticKind::largest_singular_value: return "largest-singular-value";
        case StatisticKind::random_series_norm: return "random-series-norm";
        case StatisticKind::tensor_lipschitz: return "tensor-lipschitz";
        case StatisticKind::product_of_norms: return "product-of-norms";
        case StatisticKind::max_product: return "max-product";
    }
    return "unknown";
}

std::string to_string(TensorFunction f) {
    switch (f) {
        case TensorFunction::euclidean_norm: return "euclidean-norm";
        case TensorFunction::linear: return "linear";
        case TensorFunction::max_entry: return "max-entry";
    }
    return "unknown";
}

TensorFunction parse_tensor_function(const std::string& name) {
    if (name == "euclidean-norm") return TensorFunction::euclidean_norm;
    if (name == "linear") return TensorFunction::linear;
    if (name == "max-entry") return TensorFunction::max_entry;
    throw std::invalid_argument("unknown tensor function '" + name + "'");
}

namespace {

using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ConstVecMap as_vector(std::span<const double> x) {
    return ConstVecMap(x.data(), static_cast<Eigen::Index>(x.size()));
}

double vector_norm(std::span<const double> x) { return as_vector(x).norm(); }

}  // namespace

std::size_t StatisticSpec::draw_size() const {
    switch (kind) {
        case StatisticKind::coordinate: return 1;
        case StatisticKind::largest_singular_value: return m * n;
        case StatisticKind::tensor_lipschitz:
        case StatisticKind::product_of_norms:
        case StatisticKind::max_product: return d * n;
        case StatisticKind::euclid_deviation:
        case StatisticKind::random_series_norm: return static_cast<std::size_t>(coefficients.cols());
        default: return n;
    }
}

void StatisticSpec::validate() const {
    if (n == 0 || m == 0 || d == 0) throw std::invalid_argument("statistic dimensions must be positive");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("statistic scale must be positive");
    switch (kind) {
        case StatisticKind::quadratic_form:
        case StatisticKind::sup_quadratic_forms:
            if (static_cast<std::size_t>(variances.size()) != n) {
                throw std::invalid_argument("variances must have one entry per coordinate");
            }
            [[fallthrough]];
        case StatisticKind::sup_matrix_norm:
            if (family.empty()) throw std::invalid_argument("matrix family must be nonempty");
            for (const auto& a : family) {
                if (a.n() != n) throw std::invalid_argument("matrix family dimension mismatch");
            }
            break;
        case StatisticKind::euclid_deviation:
        case StatisticKind::random_series_norm:
            if (coefficients.size() == 0) throw std::invalid_argument("coefficient matrix must be nonempty");
            break;
        default:
            break;
    }
}

double StatisticSpec::evaluate(std::span<const double> draw) const {
    if (draw.size() != draw_size()) throw std::invalid_argument("draw size does not match the statistic");
    switch (kind) {
        case StatisticKind::coordinate: return draw[0];
        case StatisticKind::max_abs: return as_vector(draw).cwiseAbs().maxCoeff();
        case StatisticKind::quadratic_form:
            return quadratic_form_centered(family.front(), as_vector(draw), variances);
        case StatisticKind::sup_quadratic_forms: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& a : family) best = std::max(best, quadratic_form_centered(a, as_vector(draw), variances));
            return best;
        }
        case StatisticKind::sup_matrix_norm: {
            double best = 0.0;
            for (const auto& a : family) best = std::max(best, (a.matrix() * as_vector(draw)).norm());
            return best;
        }
        case StatisticKind::euclid_deviation: return (coefficients * as_vector(draw)).norm();
        case StatisticKind::norm_deviation: return vector_norm(draw);
        case StatisticKind::largest_singular_value: {
            const Eigen::Map<const RowMajorMatrix> g(draw.data(), static_cast<Eigen::Index>(m),
                                                     static_cast<Eigen::Index>(n));
            const Eigen::MatrixXd gram = m >= n ? Eigen::MatrixXd(g.transpose() * g) : Eigen::MatrixXd(g * g.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
            return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
        }
        case StatisticKind::random_series_norm: {
            const Eigen::VectorXd y = coefficients * as_vector(draw);
            return series == SeriesNorm::euclidean ? y.norm() : y.maxCoeff();
        }
        case StatisticKind::tensor_lipschitz: {
            std::vector<std::vector<double>> factors(d);
            for (std::size_t k = 0; k < d; ++k) factors[k].assign(draw.begin() + k * n, draw.begin() + (k + 1) * n);
            const std::vector<double> x = kronecker(factors);
            switch (tensor_function) {
                case TensorFunction::euclidean_norm: return vector_norm(x);
                case TensorFunction::linear:
                    return std::accumulate(x.begin(), x.end(), 0.0) / std::sqrt(static_cast<double>(x.size()));
                case TensorFunction::max_entry: {
                    double best = 0.0;
                    for (double v : x) best = std::max(best, std::abs(v));
                    return best;
                }
            }
            throw DefectError("unknown tensor function");
        }
        case StatisticKind::product_of_norms: {
            double prod = 1.0;
            for (std::size_t k = 0; k < d; ++k) prod *= vector_norm(draw.subspan(k * n, n));
            return prod;
        }
        case StatisticKind::max_product: {
            const double root_n = std::sqrt(static_cast<double>(n));
            double prod = 1.0, best = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < d; ++k) {
                prod *= vector_norm(draw.subspan(k * n, n)) / root_n;
                best = std::max(best, prod);
            }
            return best;
        }
    }
    throw DefectError("unknown statistic kind");
}

std::string StatisticSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind) << "(n=" << n;
    if (kind == StatisticKind::largest_singular_value) os << ",m=" << m;
    if (kind == StatisticKind::tensor_lipschitz || kind == StatisticKind::product_of_norms ||
        kind == StatisticKind::max_product) {
        os << ",d=" << d;
    }
    if (kind == StatisticKind::tensor_lipschitz) os << ",f=" << to_string(tensor_function);
    if (kind == StatisticKind::random_series_norm) os << ",norm=" << (series == SeriesNorm::euclidean ? "euclidean" : "sup-linear");
    if (!family.empty()) os << ",family=" << family.size();
    os << ",sides=" << to_string(sidedness) << ")";
    return os.str();
}

StatisticSpec StatisticSpec::coordinate(Sidedness sidedness) {
    StatisticSpec s;
    s.kind = StatisticKind::coordinate;
    s.analytic_center = 0.0;
    s.sidedness = sidedness;
    return s;
}

StatisticSpec StatisticSpec::max_abs(std::size_t n) {
    StatisticSpec s;
    s.kind = StatisticKind::max_abs;
    s.n = n;
    s.sidedness = Sidedness::upper;
    s.validate();
    return s;
}

StatisticSpec StatisticSpec::quadratic_form(const SymMatrix& a, const Eigen::VectorXd& variances) {
    StatisticSpec s;
    s.kind = StatisticKind::quadratic_form;
    s.n = a.n();
    s.family = {a};
    s.variances = variances;
    s.analytic_center = 0.0;  // the diagonal expectation is subtracted in evaluate
    s.validate();
    return s;
}

StatisticSpec StatisticSpec::sup_quadratic_forms(std::vector<SymMatrix> family, const Eigen::VectorXd& variances) {
    StatisticSpec s;
    s.kind = StatisticKind::sup_quadratic_forms;
    s.n = family.empty() ? 0 : family.front().n();
    s.family = std::move(family);
    s.variances = variances;
    s.sidedness = Sidedness::upper;
    s.validate();
    return s;
}

StatisticSpec StatisticSpec::sup_matrix_norm(std::vector<SymMatrix> family) {
    StatisticSpec s;
    s.kind = StatisticKind::sup_matrix_norm;
    s.n = family.empty() ? 0 : family.front().n();
    s.family = std::move(family);
    s.validate();
    double lip = 0.0;
    for (const auto& a : s.family) lip = std::max(lip, operator_norm(a));
    s.lipschitz = lip;
    return s;
}

StatisticSpec StatisticSpec::euclid_deviation(const Eigen::MatrixXd& b) {
    StatisticSpec s;
    s.kind = StatisticKind::euclid_deviation;
    s.coefficients = b;
    s.n = static_cast<std::size_t>(b.cols());
    s.validate();
    s.analytic_center = b.norm();
    s.lipschitz = spectral_norm(b);
    return s;
}

StatisticSpec StatisticSpec::norm_deviation(std::size_t n) {
    StatisticSpec s;
    s.kind = StatisticKind::norm_deviation;
    s.n = n;
    s.validate();
    s.analytic_center = std::sqrt(static_cast<double>(n));
    return s;
}

StatisticSpec StatisticSpec::largest_singular_value(std::size_t m, std::size_t n) {
    StatisticSpec s;
    s.kind = StatisticKind::largest_singular_value;
    s.m = m;
    s.n = n;
    s.validate();
    return s;
}

StatisticSpec StatisticSpec::random_series_norm(const Eigen::MatrixXd& coefficients, SeriesNorm norm) {
    StatisticSpec s;
    s.kind = StatisticKind::random_series_norm;
    s.coefficients = coefficients;
    s.n = static_cast<std::size_t>(coefficients.cols());
    s.series = norm;
    s.validate();
    s.lipschitz = norm == SeriesNorm::euclidean ? spectral_norm(coefficients) : row_max_norm(coefficients);
    // A single linear form of centered coordinates has mean zero.
    if (norm == SeriesNorm::sup_linear && coefficients.rows() == 1) s.analytic_center = 0.0;
    return s;
}

StatisticSpec StatisticSpec::tensor_lipschitz(std::size_t n, std::size_t d, TensorFunction f, std::size_t budget) {
    tensor_size(n, d, budget);
    StatisticSpec s;
    s.kind = StatisticKind::tensor_lipschitz;
    s.n = n;
    s.d = d;
    s.tensor_function = f;
    s.validate();
    if (f == TensorFunction::linear) s.analytic_center = 0.0;
    return s;
}

StatisticSpec StatisticSpec::product_of_norms(std::size_t n, std::size_t d) {
    StatisticSpec s;
    s.kind = StatisticKind::product_of_norms;
    s.n = n;
    s.d = d;
    s.validate();
    s.analytic_center = std::pow(static_cast<double>(n), static_cast<double>(d) / 2.0);
    s.sidedness = Sidedness::upper;
    return s;
}

StatisticSpec StatisticSpec::max_product(std::size_t n, std::size_t d) {
    StatisticSpec s;
    s.kind = StatisticKind::max_product;
    s.n = n;
    s.d = d;
    s.validate();
    s.analytic_center = 1.0;
    s.sidedness = Sidedness::upper;
    return s;
}

namespace {

std::size_t chunk_count(std::uint64_t count) { return static_cast<std::size_t>((count + kChunkSize - 1) / kChunkSize); }

// Calls sink(chunk, values) for every chunk of `count` draws.
template <class Sink>
void run_chunks(const DistributionSpec& coord, const StatisticSpec& stat, std::uint64_t count, StreamKey key,
                unsigned workers, Sink&& sink) {
    coord.validate();
    stat.validate();
    const std::size_t width = stat.draw_size();
    parallel_for(chunk_count(count), workers, [&](std::size_t c) {
        Engine engine = make_engine(key, c);
        Sampler sampler(coord);
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunkSize;
        const std::uint64_t end = std::min<std::uint64_t>(count, begin + kChunkSize);
        std::vector<double> draw(width);
        std::vector<double> values(static_cast<std::size_t>(end - begin));
        for (double& v : values) {
            sampler.fill(draw, engine);
            v = stat.evaluate(draw);
        }
        sink(c, values);
    });
}

MeanEstimate mean_and_se(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        const double delta = v - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (v - mean);
    }
    const double var = values.size() > 1 ? m2 / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<double> sample_statistic(const DistributionSpec& coord, const StatisticSpec& stat, std::size_t count,
                                     StreamKey key, unsigned workers) {
    std::vector<double> out(count);
    run_chunks(coord, stat, count, key, workers, [&](std::size_t c, const std::vector<double>& values) {
        std::copy(values.begin(), values.end(), out.begin() + static_cast<std::ptrdiff_t>(c * kChunkSize));
    });
    return out;
}

BinomialInterval clopper_pearson(std::uint64_t count, std::uint64_t n, double conf) {
    if (n == 0 || count > n) throw std::invalid_argument("binomial interval needs 0 <= count <= n, n >= 1");
    if (!(conf > 0.0 && conf < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
    using boost::math::binomial_distribution;
    const double tail = (1.0 - conf) / 2.0;
    const auto trials = static_cast<double>(n), successes = static_cast<double>(count);
    BinomialInterval out;
    out.low = count == 0 ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(trials, successes, tail);
    out.high = count == n ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(trials, successes, tail);
    return out;
}

double clopper_pearson_upper(std::uint64_t count, std::uint64_t n, double conf) {
    if (n == 0 || count > n) throw std::invalid_argument("binomial interval needs 0 <= count <= n, n >= 1");
    if (!(conf > 0.0 && conf < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
    if (count == n) return 1.0;
    return boost::math::binomial_distribution<>::find_upper_bound_on_p(static_cast<double>(n),
                                                                       static_cast<double>(count), 1.0 - conf);
}

void TailEstimate::write_csv(std::ostream& out) const {
    out << "t,N,count,p_hat,ci_low,ci_high\n";
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        out << format_double(t_grid[i]) << ',' << N << ',' << counts[i] << ',' << format_double(p_hat[i]) << ','
            << format_double(ci_low[i]) << ',' << format_double(ci_high[i]) << '\n';
    }
}

nlohmann::json TailEstimate::to_json() const {
    nlohmann::json j;
    j["statistic"] = descriptor;
    j["seed"] = seed;
    j["N"] = N;
    j["sidedness"] = to_string(sidedness);
    j["center"] = center;
    j["center_se"] = center_se;
    j["scale"] = scale;
    j["conf_level"] = conf_level;
    j["t"] = t_grid;
    j["count"] = counts;
    j["p_hat"] = p_hat;
    j["ci_low"] = ci_low;
    j["ci_high"] = ci_high;
    return j;
}

MeanEstimate center_estimate(const DistributionSpec& coord, const StatisticSpec& stat, std::uint64_t pilot_N,
                             std::uint64_t seed, unsigned workers) {
    if (pilot_N < 2) throw std::invalid_argument("pilot run needs at least 2 draws");
    const auto values = sample_statistic(coord, stat, static_cast<std::size_t>(pilot_N), {seed, kPilotStream}, workers);
    return mean_and_se(values);
}

TailEstimate empirical_tail(const DistributionSpec& coord, const StatisticSpec& stat,
                            const std::vector<double>& t_grid, const TailOptions& options) {
    if (options.N == 0) throw std::invalid_argument("N must be at least 1");
    if (!(options.conf_level > 0.0 && options.conf_level < 1.0)) {
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    }
    if (t_grid.empty()) throw std::invalid_argument("t grid must be nonempty");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i])) throw std::invalid_argument("t grid must be finite");
        if (i && t_grid[i] < t_grid[i - 1]) throw std::invalid_argument("t grid must be ascending");
    }

    TailEstimate est;
    est.t_grid = t_grid;
    est.N = options.N;
    est.seed = options.seed;
    est.descriptor = stat.describe();
    est.sidedness = stat.sidedness;
    est.scale = stat.scale;
    est.conf_level = options.conf_level;
    if (options.center) {
        est.center = *options.center;
    } else if (stat.analytic_center) {
        est.center = *stat.analytic_center;
    } else {
        const std::uint64_t pilot =
            options.pilot_N ? options.pilot_N : std::max<std::uint64_t>(100000, 10 * t_grid.size());
        const MeanEstimate c = center_estimate(coord, stat, pilot, options.seed, options.workers);
        if (!std::isfinite(c.mean)) throw std::runtime_error("pilot centering produced a non-finite mean");
        est.center = c.mean;
        est.center_se = c.std_error;
    }

    // buckets[c][k]: draws in chunk c whose deviation clears exactly the first k grid points.
    const std::size_t grid = t_grid.size();
    std::vector<std::vector<std::uint64_t>> buckets(chunk_count(options.N));
    const bool two_sided = stat.sidedness == Sidedness::two_sided;
    run_chunks(coord, stat, options.N, {options.seed, kMainStream}, options.workers,
               [&](std::size_t c, const std::vector<double>& values) {
                   std::vector<std::uint64_t> local(grid + 1, 0);
                   for (double v : values) {
                       double dev = (v - est.center) / stat.scale;
                       if (std::isnan(dev)) throw std::domain_error("statistic produced NaN");
                       if (two_sided) dev = std::abs(dev);
                       const auto k = std::upper_bound(t_grid.begin(), t_grid.end(), dev) - t_grid.begin();
                       ++local[static_cast<std::size_t>(k)];
                   }
                   buckets[c] = std::move(local);
               });

    std::vector<std::uint64_t> merged(grid + 1, 0);
    for (const auto& b : buckets) {
        for (std::size_t k = 0; k <= grid; ++k) merged[k] += b[k];
    }
    est.counts.assign(grid, 0);
    std::uint64_t running = 0;
    for (std::size_t j = grid; j-- > 0;) {
        running += merged[j + 1];
        est.counts[j] = running;
    }
    for (std::size_t j = 0; j < grid; ++j) {
        const auto ci = clopper_pearson(est.counts[j], est.N, est.conf_level);
        est.p_hat.push_back(static_cast<double>(est.counts[j]) / static_cast<double>(est.N));
        est.ci_low.push_back(ci.low);
        est.ci_high.push_back(ci.high);
    }
    return est;
}

DiagComparison diag_comparison_check(const std::vector<SymMatrix>& family, const DistributionSpec& coord,
                                     std::uint64_t N, std::uint64_t seed, unsigned workers) {
    if (N < 2) throw std::invalid_argument("diag comparison needs N >= 2");
    std::vector<SymMatrix> diagonals;
    diagonals.reserve(family.size());
    for (const auto& a : family) diagonals.emplace_back(Eigen::MatrixXd(a.matrix().diagonal().asDiagonal()));
    // Both sides use the same draws.
    const StreamKey key{seed, kMainStream};
    DiagComparison out;
    out.diag_side = mean_and_se(sample_statistic(coord, StatisticSpec::sup_matrix_norm(diagonals), N, key, workers));
    out.full_side = mean_and_se(sample_statistic(coord, StatisticSpec::sup_matrix_norm(family), N, key, workers));
    out.pass = out.diag_side.mean <=
               out.full_side.mean + 2.0 * (out.diag_side.std_error + out.full_side.std_error);
    return out;
}

}  // namespace alphaconc
