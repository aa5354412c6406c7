#include "alphaconc/distributions.hpp"

#include "alphaconc/errors.hpp"
#include "alphaconc/parallel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace alphaconc {

std::string to_string(Family family) {
    switch (family) {
        case Family::constant: return "constant";
        case Family::rademacher: return "rademacher";
        case Family::uniform_bounded: return "uniform";
        case Family::standard_gaussian: return "gaussian";
        case Family::symmetric_weibull: return "weibull";
        case Family::truncated: return "truncated";
    }
    return "unknown";
}

DistributionSpec DistributionSpec::constant(double v) {
    DistributionSpec s;
    s.family = Family::constant;
    s.value = v;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::rademacher() {
    DistributionSpec s;
    s.family = Family::rademacher;
    return s;
}

DistributionSpec DistributionSpec::uniform(double a, double b) {
    DistributionSpec s;
    s.family = Family::uniform_bounded;
    s.a = a;
    s.b = b;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::gaussian() {
    DistributionSpec s;
    s.family = Family::standard_gaussian;
    return s;
}

DistributionSpec DistributionSpec::weibull(double shape) {
    DistributionSpec s;
    s.family = Family::symmetric_weibull;
    s.shape = shape;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::truncated(const DistributionSpec& base, double level) {
    DistributionSpec s;
    s.family = Family::truncated;
    s.level = level;
    s.base = std::make_shared<const DistributionSpec>(base);
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::scaled(double factor) const {
    if (!std::isfinite(factor)) throw std::invalid_argument("scale factor must be finite");
    DistributionSpec s = *this;
    s.scale *= factor;
    return s;
}

void DistributionSpec::validate() const {
    if (!std::isfinite(scale)) throw std::invalid_argument("distribution scale must be finite");
    switch (family) {
        case Family::constant:
            if (!std::isfinite(value)) throw std::invalid_argument("constant value must be finite");
            break;
        case Family::uniform_bounded:
            if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
                throw std::invalid_argument("uniform law needs finite a < b");
            }
            if (a != -b) throw std::invalid_argument("uniform law must be centered (a = -b)");
            break;
        case Family::symmetric_weibull:
            if (!(shape > 0.0 && shape <= 2.0)) {
                throw std::invalid_argument("weibull shape must lie in (0, 2]");
            }
            break;
        case Family::truncated:
            if (!base) throw std::invalid_argument("truncated law needs a base law");
            if (base->family == Family::truncated) {
                throw std::invalid_argument("nested truncation is not supported");
            }
            if (!(level > 0.0) || !std::isfinite(level)) {
                throw std::invalid_argument("truncation level must be positive and finite");
            }
            base->validate();
            break;
        case Family::rademacher:
        case Family::standard_gaussian:
            break;
    }
}

double DistributionSpec::mean() const {
    if (family == Family::constant) return scale * value;
    if (family == Family::truncated && base->family == Family::constant) {
        return std::abs(base->mean()) <= level ? scale * base->mean() : 0.0;
    }
    return 0.0;
}

namespace {

// E R^2 1{|R| <= L} for the raw (unscaled) law of a non-truncated spec.
double truncated_second_moment(const DistributionSpec& s, double L) {
    switch (s.family) {
        case Family::constant: return std::abs(s.value) <= L ? s.value * s.value : 0.0;
        case Family::rademacher: return L >= 1.0 ? 1.0 : 0.0;
        case Family::uniform_bounded: {
            const double m = std::min(L, s.b);
            return m * m * m / (3.0 * s.b);
        }
        case Family::standard_gaussian: {
            if (!std::isfinite(L)) return 1.0;
            const double pdf = std::exp(-0.5 * L * L) / std::sqrt(2.0 * std::numbers::pi);
            return std::erf(L / std::numbers::sqrt2) - 2.0 * L * pdf;
        }
        case Family::symmetric_weibull: {
            const double k = 1.0 + 2.0 / s.shape;
            if (!std::isfinite(L)) return std::tgamma(k);
            return boost::math::tgamma_lower(k, std::pow(L, s.shape));
        }
        case Family::truncated: break;
    }
    throw DefectError("truncated_second_moment called on a truncated spec");
}

}  // namespace

double DistributionSpec::variance() const {
    if (family == Family::constant) return 0.0;
    const double s2 = scale * scale;
    if (family == Family::truncated) {
        const double base_scale = std::abs(base->scale);
        if (base_scale == 0.0) return 0.0;
        const double raw_level = level / base_scale;
        const double second = truncated_second_moment(*base, raw_level) * base_scale * base_scale;
        const double m = base->family == Family::constant && std::abs(base->mean()) <= level
                             ? base->mean()
                             : 0.0;
        return s2 * (second - m * m);
    }
    return s2 * truncated_second_moment(*this, std::numeric_limits<double>::infinity());
}

double DistributionSpec::magnitude_bound() const {
    const double s = std::abs(scale);
    switch (family) {
        case Family::constant: return s * std::abs(value);
        case Family::rademacher: return s;
        case Family::uniform_bounded: return s * std::max(std::abs(a), std::abs(b));
        case Family::truncated: return s * std::min(level, base->magnitude_bound());
        case Family::standard_gaussian:
        case Family::symmetric_weibull: return std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::infinity();
}

std::string DistributionSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family) {
        case Family::constant: os << "constant(" << value << ")"; break;
        case Family::rademacher: os << "rademacher"; break;
        case Family::uniform_bounded: os << "uniform(" << a << "," << b << ")"; break;
        case Family::standard_gaussian: os << "gaussian"; break;
        case Family::symmetric_weibull: os << "weibull(" << shape << ")"; break;
        case Family::truncated: os << "truncated(" << base->describe() << "," << level << ")"; break;
    }
    if (scale != 1.0) os << "*" << scale;
    return os.str();
}

bool operator==(const DistributionSpec& x, const DistributionSpec& y) {
    if (x.family != y.family || x.scale != y.scale) return false;
    switch (x.family) {
        case Family::constant: return x.value == y.value;
        case Family::uniform_bounded: return x.a == y.a && x.b == y.b;
        case Family::symmetric_weibull: return x.shape == y.shape;
        case Family::truncated: return x.level == y.level && *x.base == *y.base;
        case Family::rademacher:
        case Family::standard_gaussian: return true;
    }
    return false;
}

Engine make_engine(StreamKey key, std::uint64_t chunk) {
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(key.seed), hi(key.seed), lo(key.stream), hi(key.stream),
                      lo(chunk),    hi(chunk)};
    return Engine(seq);
}

double uniform_open01(Engine& engine) {
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1p-53;
}

Sampler::Sampler(const DistributionSpec& spec) : spec_(spec) { spec_.validate(); }

double Sampler::raw(const DistributionSpec& s, Engine& engine) {
    switch (s.family) {
        case Family::constant: return s.value;
        case Family::rademacher: return (engine() >> 63) ? 1.0 : -1.0;
        case Family::uniform_bounded: return s.a + (s.b - s.a) * uniform_open01(engine);
        case Family::standard_gaussian: return normal_(engine);
        case Family::symmetric_weibull: {
            // |w| = (-log U)^(1/shape) has P(|w| >= t) = exp(-t^shape) exactly.
            const double magnitude = std::pow(-std::log(uniform_open01(engine)), 1.0 / s.shape);
            return (engine() >> 63) ? magnitude : -magnitude;
        }
        case Family::truncated: {
            const double x = s.base->scale * raw(*s.base, engine);
            return std::abs(x) <= s.level ? x : 0.0;
        }
    }
    throw DefectError("unknown distribution family");
}

double Sampler::operator()(Engine& engine) { return spec_.scale * raw(spec_, engine); }

void Sampler::fill(std::span<double> out, Engine& engine) {
    for (double& x : out) x = (*this)(engine);
}

std::vector<double> sample(const DistributionSpec& spec, std::size_t count, StreamKey key,
                           unsigned workers) {
    spec.validate();
    std::vector<double> out(count);
    const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
    parallel_for(chunks, workers, [&](std::size_t c) {
        Engine engine = make_engine(key, c);
        Sampler sampler(spec);
        const std::size_t begin = c * kChunkSize;
        const std::size_t end = std::min(count, begin + kChunkSize);
        sampler.fill(std::span<double>(out).subspan(begin, end - begin), engine);
    });
    return out;
}

DistributionSpec TensorSpec::unit_coordinate() const {
    coord.validate();
    const double var = coord.variance();
    if (!(var > 0.0)) throw std::invalid_argument("tensor coordinates need positive variance");
    if (coord.mean() != 0.0) throw std::invalid_argument("tensor coordinates must be centered");
    return coord.scaled(1.0 / std::sqrt(var));
}

void TensorSpec::validate() const {
    if (n < 1 || d < 1) throw std::invalid_argument("tensor needs n >= 1 and d >= 1");
    (void)unit_coordinate();
}

std::size_t tensor_size(std::size_t n, std::size_t d, std::size_t budget) {
    std::size_t size = 1;
    for (std::size_t k = 0; k < d; ++k) {
        if (n != 0 && size > budget / n) {
            throw ResourceError("tensor with n=" + std::to_string(n) + ", d=" + std::to_string(d) +
                                " exceeds the entry budget of " + std::to_string(budget));
        }
        size *= n;
    }
    if (size > budget) throw ResourceError("tensor exceeds the entry budget");
    return size;
}

std::vector<double> kronecker(const std::vector<std::vector<double>>& factors, std::size_t budget) {
    std::size_t total = 1;
    for (const auto& f : factors) {
        if (!f.empty() && total > budget / f.size()) throw ResourceError("kronecker product exceeds budget");
        total *= f.size();
    }
    std::vector<double> entries{1.0};
    entries.reserve(total);
    for (const auto& f : factors) {
        std::vector<double> next(entries.size() * f.size());
        for (std::size_t j = 0; j < entries.size(); ++j) {
            for (std::size_t i = 0; i < f.size(); ++i) next[j * f.size() + i] = entries[j] * f[i];
        }
        entries = std::move(next);
    }
    return entries;
}

SimpleTensor sample_tensor(const TensorSpec& spec, StreamKey key, std::size_t budget) {
    spec.validate();
    tensor_size(spec.n, spec.d, budget);
    SimpleTensor out;
    out.n = spec.n;
    out.d = spec.d;
    Engine engine = make_engine(key, 0);
    Sampler sampler(spec.unit_coordinate());
    out.factors.assign(spec.d, std::vector<double>(spec.n));
    for (auto& f : out.factors) sampler.fill(f, engine);
    out.entries = kronecker(out.factors, budget);
    return out;
}

TruncationSplit truncate(std::span<const double> x, double level) {
    if (!(level > 0.0) || !std::isfinite(level)) {
        throw std::invalid_argument("truncation level must be positive and finite");
    }
    TruncationSplit split{std::vector<double>(x.size(), 0.0), std::vector<double>(x.size(), 0.0)};
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) <= level) {
            split.bulk[i] = x[i];
        } else {
            split.tail[i] = x[i];
        }
    }
    return split;
}

MonteCarloValue truncation_level(const DistributionSpec& spec, std::size_t n, StreamKey key,
                                 std::size_t repetitions) {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    spec.validate();

    const std::size_t chunks = (repetitions + kChunkSize - 1) / kChunkSize;
    std::vector<double> sum(chunks, 0.0), sum_sq(chunks, 0.0);
    for (std::size_t c = 0; c < chunks; ++c) {
        Engine engine = make_engine(key, c);
        Sampler sampler(spec);
        const std::size_t reps = std::min(kChunkSize, repetitions - c * kChunkSize);
        for (std::size_t r = 0; r < reps; ++r) {
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(sampler(engine)));
            sum[c] += m;
            sum_sq[c] += m * m;
        }
    }
    double s = 0.0, s2 = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        s += sum[c];
        s2 += sum_sq[c];
    }
    const double reps = static_cast<double>(repetitions);
    const double mean = s / reps;
    const double var = repetitions > 1 ? std::max(0.0, (s2 - reps * mean * mean) / (reps - 1.0)) : 0.0;
    return {8.0 * mean, 8.0 * std::sqrt(var / reps)};
}

}  // namespace alphaconc
