#pragma once

#include "alphaconc/alpha.hpp"

#include "json.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace alphaconc {

enum class BoundFamily {
    hanson_wright,
    convex_conc,
    classical_convex,
    uniform_hw,
    tensor,
    tensor_sharp,
    tensor_pi,
    tensor_lsi,
    euclid_norm,
    product_tail,
    max_product_tail,
    max_orlicz_shift,
    subgaussian_alpha,
};

std::string to_string(BoundFamily family);
BoundFamily parse_bound_family(const std::string& name);

/// Which deviation event a curve controls: |S - center| >= t or S - center >= t.
enum class Sidedness { two_sided, upper };

std::string to_string(Sidedness s);
Sidedness parse_sidedness(const std::string& name);

/// How the tunable constant enters the exponent: rate = knob (a "c" slot) or
/// rate = 1/knob (a "C" slot). In both cases a smaller rate weakens the bound.
enum class KnobMode { rate, inverse_rate };

/// prefactor * exp(-rate * exponent(t)), clamped to [0, 1], on [0, valid_hi].
struct TailBoundCurve {
    BoundFamily family = BoundFamily::hanson_wright;
    std::map<std::string, double> constants;
    double prefactor = 2.0;
    std::string knob_name = "c";
    double knob = 1.0;
    KnobMode knob_mode = KnobMode::rate;
    double valid_hi = std::numeric_limits<double>::infinity();
    Sidedness sidedness = Sidedness::two_sided;

    double rate() const { return knob_mode == KnobMode::rate ? knob : 1.0 / knob; }
    /// Knob value that produces the given rate.
    double knob_for_rate(double r) const { return knob_mode == KnobMode::rate ? r : 1.0 / r; }
    TailBoundCurve with_knob(double value) const;
    TailBoundCurve with_rate(double r) const { return with_knob(knob_for_rate(r)); }

    bool in_validity(double t) const { return t >= 0.0 && t <= valid_hi; }
    /// Exponent with unit rate; +inf means the bound is 0.
    double exponent(double t) const;
    /// nullopt outside the validity interval. Throws for negative or NaN t.
    std::optional<double> evaluate(double t) const;

    nlohmann::json to_json() const;
    static TailBoundCurve from_json(const nlohmann::json& j);
};

// Quadratic forms of alpha-subexponential vectors.
TailBoundCurve hanson_wright_curve(double K, double hs, double op, AlphaParam alpha, double C = 1.0);
double hw_tail_bound(double t, double K, double hs, double op, AlphaParam alpha, double C = 1.0);
/// C K^2 (p^(1/2) hs + p^(2/alpha) op), p >= 2.
double hw_moment_bound(double p, double K, double hs, double op, AlphaParam alpha, double C = 1.0);

enum class ConvexMode { bounded_classical, separately_convex_bounded, convex_orlicz };

struct ConvexParams {
    double a = -1.0;       // bounded modes: support [a, b]
    double b = 1.0;
    double k_star = 1.0;   // convex_orlicz: Psi_alpha norm of max_i |X_i|
    AlphaParam alpha{2.0};
    double c = 1.0;
};

/// bounded_classical: 2 exp(-t^2 / (2 (b-a)^2)), two-sided.
/// separately_convex_bounded: exp(-t^2 / (2 (b-a)^2)), upper tail.
/// convex_orlicz: 2 exp(-c t^alpha / K*^alpha), two-sided.
TailBoundCurve convex_concentration_curve(ConvexMode mode, const ConvexParams& params);
double convex_concentration_bound(double t, ConvexMode mode, const ConvexParams& params);

/// Upper tail of sup_A (X^T A X - E X^T A X):
/// 2 exp(-(C/K*^alpha) min(t^alpha / E^alpha, t^(alpha/2) / sup_op^(alpha/2))),
/// with E = E sup_A |AX|_2. A zero scale drops its branch.
TailBoundCurve uniform_hw_curve(double k_star, double e_sup_ax, double sup_op, AlphaParam alpha,
                                double C = 1.0);
double uniform_hw_bound(double t, double k_star, double e_sup_ax, double sup_op, AlphaParam alpha,
                        double C = 1.0);

/// log n with the n = 1 case floored at log 2.
double floored_log(std::size_t n);

/// Convex 1-Lipschitz functions of a simple random tensor.
TailBoundCurve tensor_curve(std::size_t n, std::size_t d, double K, AlphaParam alpha, double c = 1.0,
                            double c_range = 1.0);
std::optional<double> tensor_bound(double t, std::size_t n, std::size_t d, double K, AlphaParam alpha,
                                   double c = 1.0, double c_range = 1.0);

/// Variant with per-factor norms M_k = |max_j |X_kj||_Psi_alpha in place of
/// (log n)^(1/alpha) K.
TailBoundCurve tensor_sharp_curve(std::size_t n, const std::vector<double>& factor_max_norms, double K,
                                  AlphaParam alpha, double c = 1.0, double c_range = 1.0);

enum class FunctionalInequality { poincare, lsi };

TailBoundCurve tensor_functional_curve(std::size_t n, std::size_t d, double sigma, FunctionalInequality which,
                                       double c = 1.0, double c_range = 1.0);
std::optional<double> tensor_functional_bound(double t, std::size_t n, std::size_t d, double sigma,
                                              FunctionalInequality which, double c = 1.0,
                                              double c_range = 1.0);

/// 2 exp(-c t^alpha) for the event ||BX|_2 - |B|_HS| >= t K^2 |B|_op.
TailBoundCurve euclidean_norm_curve(AlphaParam alpha, double c = 1.0);
double euclidean_norm_bound(double t, AlphaParam alpha, double c = 1.0);

/// Upper tail of prod_i |X_i|_2 - n^(d/2), valid on [0, 2 n^(d/2)].
TailBoundCurve product_tail_curve(std::size_t n, std::size_t d, double K, AlphaParam alpha, double c = 1.0);
std::optional<double> product_tail_bound(double t, std::size_t n, std::size_t d, double K, AlphaParam alpha,
                                         double c = 1.0);

/// Upper tail of max_k n^(-k/2) prod_{i<=k} |X_i|_2 - 1, valid on [0, 2].
TailBoundCurve max_product_tail_curve(std::size_t n, std::size_t d, double K, AlphaParam alpha,
                                      double c = 1.0);
std::optional<double> max_product_tail_bound(double u, std::size_t n, std::size_t d, double K,
                                             AlphaParam alpha, double c = 1.0);

/// Explicit bound on |max_i |X_i||_Psi_alpha for centered X_i with norm <= K.
double max_orlicz_bound(std::size_t n, double K, AlphaParam alpha);

/// (log n / c_alpha)^(1/alpha), the shift in the maximal tail bound.
double max_tail_shift(std::size_t n, AlphaParam alpha);
/// 2 exp(-c_alpha t^alpha) for max_i |X_i| >= shift + t, unit Orlicz norms.
TailBoundCurve max_tail_curve(std::size_t n, AlphaParam alpha);
double max_tail_bound(double t, std::size_t n, AlphaParam alpha);

/// Orlicz norm bound for Y >= 0 with P(Y >= c_shift + t) <= 2 exp(-t^alpha).
double shifted_tail_to_orlicz(double c_shift, AlphaParam alpha);

/// Rate r' = (log c2 / log c1) c with c1 exp(-c r) <= c2 exp(-r' r) whenever
/// the left side is at most 1. Requires c1 > c2 > 1, c > 0.
double prefactor_adjust(double c1, double c2, double c);

/// 2 exp(-log(2) (t/gamma)^alpha), which dominates exp(-(t/gamma)^2) after clamping.
TailBoundCurve subgaussian_to_alpha(double gamma, AlphaParam alpha);

}  // namespace alphaconc
