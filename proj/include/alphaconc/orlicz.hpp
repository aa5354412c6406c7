#pragma once

#include "alphaconc/alpha.hpp"
#include "alphaconc/distributions.hpp"

#include <optional>
#include <span>
#include <string>

namespace alphaconc {

enum class OrliczMethod {
    empirical_bisection,
    analytic_closed_form,
    numeric_quadrature,
};

std::string to_string(OrliczMethod method);

struct OrliczValue {
    double value = 0.0;
    AlphaParam alpha{1.0};
    OrliczMethod method = OrliczMethod::empirical_bisection;
    double tolerance = 0.0;
};

inline constexpr double kDefaultOrliczTolerance = 1e-9;

/// Sample mean of exp((|x|/t)^alpha). Evaluated in shifted (log-sum-exp)
/// form; returns +inf when the mean is not representable.
double psi_functional(std::span<const double> samples, AlphaParam alpha, double t);

/// Natural log of psi_functional; finite whenever the inputs are.
double log_psi_functional(std::span<const double> samples, AlphaParam alpha, double t);

/// Psi_alpha quasi-norm of the empirical measure of `samples`: the smallest t
/// with psi_functional <= 2, located by bisection to `tolerance` relative error.
OrliczValue orlicz_norm_empirical(std::span<const double> samples, AlphaParam alpha,
                                  double tolerance = kDefaultOrliczTolerance);

/// Exact Psi_alpha norm for laws that admit a closed form (constant, Rademacher,
/// symmetric Weibull at its own shape, Gaussian at alpha = 2); nullopt otherwise.
std::optional<OrliczValue> orlicz_norm_analytic(const DistributionSpec& spec, AlphaParam alpha);

/// Psi_alpha norm of the law itself (not a sample) by deterministic quadrature
/// of E exp((|X|/t)^alpha) and bisection in t. nullopt when the norm is infinite
/// or the family has no density handled here.
std::optional<OrliczValue> orlicz_norm_quadrature(const DistributionSpec& spec, AlphaParam alpha,
                                                  double tolerance = 1e-10);

/// (mean |x|^p)^(1/p), p >= 1.
double lp_norm(std::span<const double> samples, double p);

struct LpEstimate {
    double value = 0.0;
    double std_error = 0.0;  // delta-method standard error of the L^p norm estimate
};

LpEstimate lp_norm_estimate(std::span<const double> samples, double p);

/// Constants of the tail / moment / MGF / Orlicz equivalence for a variable
/// whose tail satisfies P(|X| >= t) <= 2 exp(-(t/K1)^alpha).
class EquivalenceConstants {
public:
    EquivalenceConstants(AlphaParam alpha, double k1);

    const AlphaParam& alpha() const noexcept { return alpha_; }
    double k1() const noexcept { return k1_; }
    /// L^p growth: ||X||_p <= K2 p^(1/alpha).
    double k2() const noexcept { return k2_; }
    /// MGF of |X|^alpha: E exp(l^a |X|^a) <= exp(K3^a l^a) for 0 <= l <= 1/K3.
    double k3() const noexcept { return k3_; }
    /// Orlicz scale: E exp(|X|^a / K4^a) <= 2.
    double k4() const noexcept { return k4_; }
    /// Centered MGF scale for |lambda| <= 1/K5; only defined for alpha >= 1.
    double k5() const;

private:
    AlphaParam alpha_;
    double k1_, k2_, k3_, k4_;
};

EquivalenceConstants equivalence_constants(AlphaParam alpha, double k1);

/// 2^(1/alpha): ||X + Y|| <= 2^(1/alpha) (||X|| + ||Y||) for Psi_alpha.
double quasi_triangle_factor(AlphaParam alpha);

}  // namespace alphaconc
