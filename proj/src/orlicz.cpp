#include "alphaconc/orlicz.hpp"

#include "alphaconc/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace alphaconc {

std::string to_string(OrliczMethod method) {
    switch (method) {
        case OrliczMethod::empirical_bisection: return "empirical-bisection";
        case OrliczMethod::analytic_closed_form: return "analytic-closed-form";
        case OrliczMethod::numeric_quadrature: return "numeric-quadrature";
    }
    return "unknown";
}

namespace {

constexpr int kMaxBisectionSteps = 200;
const double kLog2 = std::numbers::ln2;

void require_finite(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("sample must be nonempty");
    for (double x : samples) {
        if (!std::isfinite(x)) throw std::invalid_argument("sample contains a non-finite value");
    }
}

// log|x| of the nonzero entries; zero entries contribute exp(0) = 1 each.
struct LogMagnitudes {
    std::vector<double> logs;
    std::size_t zeros = 0;
    std::size_t total = 0;
    double max_abs = 0.0;

    explicit LogMagnitudes(std::span<const double> samples) : total(samples.size()) {
        logs.reserve(samples.size());
        for (double x : samples) {
            const double a = std::abs(x);
            max_abs = std::max(max_abs, a);
            if (a == 0.0) {
                ++zeros;
            } else {
                logs.push_back(std::log(a));
            }
        }
    }

    double log_psi(double alpha, double t) const {
        const double log_t = std::log(t);
        double top = 0.0;  // zeros give exponent 0; exponents are never negative
        for (double l : logs) top = std::max(top, std::exp(alpha * (l - log_t)));
        if (!std::isfinite(top)) return std::numeric_limits<double>::infinity();
        double sum = static_cast<double>(zeros) * std::exp(-top);
        for (double l : logs) sum += std::exp(std::exp(alpha * (l - log_t)) - top);
        return top + std::log(sum) - std::log(static_cast<double>(total));
    }
};

// Smallest t (to relative tolerance) with feasible(t) true; feasible must be
// monotone (false below the root, true above it).
double bisect_threshold(const std::function<bool(double)>& feasible, double lo, double hi,
                        double tolerance) {
    int guard = 0;
    while (feasible(lo)) {
        lo *= 0.5;
        if (++guard > kMaxBisectionSteps) throw DefectError("Orlicz bisection failed to bracket (low side)");
    }
    guard = 0;
    while (!feasible(hi)) {
        hi *= 2.0;
        if (++guard > kMaxBisectionSteps) throw DefectError("Orlicz bisection failed to bracket (high side)");
    }
    for (int step = 0; hi - lo > tolerance * hi; ++step) {
        if (step >= kMaxBisectionSteps) throw DefectError("Orlicz bisection did not converge");
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace

double log_psi_functional(std::span<const double> samples, AlphaParam alpha, double t) {
    require_finite(samples);
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
    return LogMagnitudes(samples).log_psi(alpha.value(), t);
}

double psi_functional(std::span<const double> samples, AlphaParam alpha, double t) {
    const double log_mean = log_psi_functional(samples, alpha, t);
    if (log_mean > std::log(std::numeric_limits<double>::max())) {
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(log_mean);
}

OrliczValue orlicz_norm_empirical(std::span<const double> samples, AlphaParam alpha, double tolerance) {
    require_finite(samples);
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const LogMagnitudes prepared(samples);
    OrliczValue out{0.0, alpha, OrliczMethod::empirical_bisection, tolerance};
    if (prepared.max_abs == 0.0) return out;

    const double a = alpha.value();
    const auto feasible = [&](double t) { return prepared.log_psi(a, t) <= kLog2; };

    out.value = bisect_threshold(feasible, prepared.max_abs / 64.0, prepared.max_abs * 64.0, tolerance);
    return out;
}

std::optional<OrliczValue> orlicz_norm_analytic(const DistributionSpec& spec, AlphaParam alpha) {
    spec.validate();
    const double s = std::abs(spec.scale);
    const double a = alpha.value();
    const auto make = [&](double v) {
        return OrliczValue{v, alpha, OrliczMethod::analytic_closed_form, 0.0};
    };
    switch (spec.family) {
        case Family::constant:
            // exp((|c|/t)^a) = 2
            return make(s * std::abs(spec.value) / std::pow(kLog2, 1.0 / a));
        case Family::rademacher:
            return make(s / std::pow(kLog2, 1.0 / a));
        case Family::symmetric_weibull:
            // E exp((|w|/t)^a) = (1 - t^-a)^-1 = 2  =>  t = 2^(1/a)
            if (spec.shape != a) return std::nullopt;
            return make(s * std::pow(2.0, 1.0 / a));
        case Family::standard_gaussian:
            // (1 - 2/t^2)^(-1/2) = 2  =>  t^2 = 8/3
            if (a != 2.0) return std::nullopt;
            return make(s * std::sqrt(8.0 / 3.0));
        case Family::uniform_bounded:
        case Family::truncated:
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<OrliczValue> orlicz_norm_quadrature(const DistributionSpec& spec, AlphaParam alpha,
                                                  double tolerance) {
    spec.validate();
    const double s = std::abs(spec.scale);
    const double a = alpha.value();
    const double inf = std::numeric_limits<double>::infinity();
    using boost::math::quadrature::gauss_kronrod;

    std::function<double(double)> expectation;
    switch (spec.family) {
        case Family::constant:
        case Family::rademacher: {
            const double magnitude = spec.family == Family::constant ? s * std::abs(spec.value) : s;
            if (magnitude == 0.0) return OrliczValue{0.0, alpha, OrliczMethod::numeric_quadrature, tolerance};
            expectation = [=](double t) { return std::exp(std::pow(magnitude / t, a)); };
            break;
        }
        case Family::uniform_bounded: {
            const double b = s * spec.b;
            expectation = [=](double t) {
                auto f = [&](double u) { return std::exp(std::pow(b * u / t, a)); };
                return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-13);
            };
            break;
        }
        case Family::standard_gaussian: {
            if (a > 2.0) return std::nullopt;
            expectation = [=](double t) {
                if (a == 2.0 && t <= std::numbers::sqrt2 * s) return inf;
                auto f = [&](double x) {
                    return std::exp(-0.5 * x * x + std::pow(s * x / t, a));
                };
                const double integral = gauss_kronrod<double, 61>::integrate(f, 0.0, inf, 15, 1e-13);
                return 2.0 * integral / std::sqrt(2.0 * std::numbers::pi);
            };
            break;
        }
        case Family::symmetric_weibull: {
            const double shape = spec.shape;
            if (a > shape) return std::nullopt;
            // With v = |w|^shape: E exp((s|w|/t)^a) = int_0^inf exp(-v + (s/t)^a v^(a/shape)) dv.
            expectation = [=](double t) {
                const double rate = std::pow(s / t, a);
                if (a == shape) return rate < 1.0 ? 1.0 / (1.0 - rate) : inf;
                const double beta = a / shape;
                auto f = [&](double v) { return std::exp(-v + rate * std::pow(v, beta)); };
                return gauss_kronrod<double, 61>::integrate(f, 0.0, inf, 15, 1e-13);
            };
            break;
        }
        case Family::truncated:
            return std::nullopt;
    }

    if (s == 0.0) return OrliczValue{0.0, alpha, OrliczMethod::numeric_quadrature, tolerance};
    const auto feasible = [&](double t) {
        const double e = expectation(t);
        return std::isfinite(e) && e <= 2.0;
    };
    const double start = std::max(s, std::sqrt(spec.variance()));
    return OrliczValue{bisect_threshold(feasible, start, start, tolerance), alpha,
                       OrliczMethod::numeric_quadrature, tolerance};
}

double lp_norm(std::span<const double> samples, double p) {
    return lp_norm_estimate(samples, p).value;
}

LpEstimate lp_norm_estimate(std::span<const double> samples, double p) {
    require_finite(samples);
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be >= 1");
    double top = 0.0;
    for (double x : samples) top = std::max(top, std::abs(x));
    if (top == 0.0) return {0.0, 0.0};

    // Work with (|x|/max)^p to keep large p representable.
    const double count = static_cast<double>(samples.size());
    double sum = 0.0, sum_sq = 0.0;
    for (double x : samples) {
        const double v = std::pow(std::abs(x) / top, p);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / count;
    const double var = samples.size() > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0)) : 0.0;
    const double value = top * std::pow(mean, 1.0 / p);
    const double se = top * std::pow(mean, 1.0 / p - 1.0) / p * std::sqrt(var / count);
    return {value, se};
}

EquivalenceConstants::EquivalenceConstants(AlphaParam alpha, double k1) : alpha_(alpha), k1_(k1) {
    if (!(k1 > 0.0) || !std::isfinite(k1)) throw std::invalid_argument("K1 must be positive");
    const double a = alpha.value();
    k2_ = 3.0 * std::pow(a, -(a + 1.0) / a) * k1_;
    k3_ = std::pow(2.0 * a * std::numbers::e, 1.0 / a) * k2_;
    k4_ = k3_ / std::pow(kLog2, 1.0 / a);
}

double EquivalenceConstants::k5() const {
    if (alpha_.value() < 1.0) {
        throw std::domain_error("K5 is defined only for alpha >= 1");
    }
    return 2.0 * std::numbers::e * k2_;
}

EquivalenceConstants equivalence_constants(AlphaParam alpha, double k1) {
    return EquivalenceConstants(alpha, k1);
}

double quasi_triangle_factor(AlphaParam alpha) { return std::exp2(1.0 / alpha.value()); }

}  // namespace alphaconc
