#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace alphaconc {

enum class Family {
    constant,
    rademacher,
    uniform_bounded,
    standard_gaussian,
    symmetric_weibull,
    truncated,
};

std::string to_string(Family family);

/// Scalar sampling law. Every draw is `scale * raw`, where raw follows the family
/// with its unit parameters. The truncated family draws from `base` and zeroes
/// anything whose magnitude exceeds `level`.
struct DistributionSpec {
    Family family = Family::standard_gaussian;
    double value = 0.0;                       // constant
    double a = -1.0;                          // uniform lower end
    double b = 1.0;                           // uniform upper end
    double shape = 1.0;                       // weibull shape
    double level = 0.0;                       // truncation level
    double scale = 1.0;
    std::shared_ptr<const DistributionSpec> base;  // truncated

    static DistributionSpec constant(double v);
    static DistributionSpec rademacher();
    static DistributionSpec uniform(double a, double b);
    static DistributionSpec gaussian();
    static DistributionSpec weibull(double shape);
    static DistributionSpec truncated(const DistributionSpec& base, double level);

    /// Copy with the overall scale multiplied by `factor`.
    DistributionSpec scaled(double factor) const;

    /// Throws std::invalid_argument for inconsistent parameters.
    void validate() const;

    double mean() const;
    double variance() const;
    /// Almost-sure bound on |X| if one exists (bounded families), else +inf.
    double magnitude_bound() const;
    std::string describe() const;

    friend bool operator==(const DistributionSpec& x, const DistributionSpec& y);
};

/// Identifies an independent random stream: a user seed plus a logical stream index.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

using Engine = std::mt19937_64;

/// Fixed chunk length for every chunked generation path.
inline constexpr std::size_t kChunkSize = 4096;

/// Engine for chunk `chunk` of stream `key`. Distinct (seed, stream, chunk)
/// triples give independent engines.
Engine make_engine(StreamKey key, std::uint64_t chunk);

/// Uniform double in the open interval (0, 1) from 53 random bits.
double uniform_open01(Engine& engine);

class Sampler {
public:
    explicit Sampler(const DistributionSpec& spec);

    double operator()(Engine& engine);
    void fill(std::span<double> out, Engine& engine);

private:
    double raw(const DistributionSpec& spec, Engine& engine);

    DistributionSpec spec_;
    std::normal_distribution<double> normal_;
};

/// `count` i.i.d. draws. Draws are produced in chunks of kChunkSize, chunk k
/// using make_engine(key, k), so output is independent of `workers` and the
/// first m draws of a longer request equal a request for m draws.
std::vector<double> sample(const DistributionSpec& spec, std::size_t count, StreamKey key,
                           unsigned workers = 1);

/// Simple random tensor X_1 (x) ... (x) X_d with i.i.d. coordinates.
struct TensorSpec {
    std::size_t n = 1;
    std::size_t d = 1;
    DistributionSpec coord;

    /// Coordinate law rescaled to unit variance.
    DistributionSpec unit_coordinate() const;
    void validate() const;
};

struct SimpleTensor {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::vector<double>> factors;
    std::vector<double> entries;  // row-major, last index fastest
};

inline constexpr std::size_t kDefaultTensorBudget = std::size_t{1} << 24;

/// n^d, or ResourceError if it exceeds `budget`.
std::size_t tensor_size(std::size_t n, std::size_t d, std::size_t budget = kDefaultTensorBudget);

/// Flattened Kronecker product of the factors (last factor fastest).
std::vector<double> kronecker(const std::vector<std::vector<double>>& factors,
                              std::size_t budget = kDefaultTensorBudget);

SimpleTensor sample_tensor(const TensorSpec& spec, StreamKey key,
                           std::size_t budget = kDefaultTensorBudget);

struct TruncationSplit {
    std::vector<double> bulk;  // X_i 1{|X_i| <= M}
    std::vector<double> tail;  // X_i 1{|X_i| > M}
};

TruncationSplit truncate(std::span<const double> x, double level);

struct MonteCarloValue {
    double value = 0.0;
    double std_error = 0.0;
};

/// Estimate of 8 E max_i |X_i| for n i.i.d. coordinates drawn from `spec`.
MonteCarloValue truncation_level(const DistributionSpec& spec, std::size_t n, StreamKey key,
                                 std::size_t repetitions);

}  // namespace alphaconc
