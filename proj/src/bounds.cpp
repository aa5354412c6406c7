#include "alphaconc/bounds.hpp"

#include "alphaconc/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace alphaconc {

namespace {

constexpr std::array<std::pair<BoundFamily, const char*>, 13> kFamilyNames{{
    {BoundFamily::hanson_wright, "hanson-wright"},
    {BoundFamily::convex_conc, "convex-conc"},
    {BoundFamily::classical_convex, "classical-convex"},
    {BoundFamily::uniform_hw, "uniform-hw"},
    {BoundFamily::tensor, "tensor"},
    {BoundFamily::tensor_sharp, "tensor-sharp"},
    {BoundFamily::tensor_pi, "tensor-pi"},
    {BoundFamily::tensor_lsi, "tensor-lsi"},
    {BoundFamily::euclid_norm, "euclid-norm"},
    {BoundFamily::product_tail, "product-tail"},
    {BoundFamily::max_product_tail, "max-product-tail"},
    {BoundFamily::max_orlicz_shift, "max-orlicz-shift"},
    {BoundFamily::subgaussian_alpha, "subgaussian-alpha"},
}};

const double kInf = std::numeric_limits<double>::infinity();
const double kLog2 = std::numbers::ln2;
// (sqrt 2 + 1)/(sqrt 2 - 1) = 3 + 2 sqrt 2
const double kMaxRatio = (std::numbers::sqrt2 + 1.0) / (std::numbers::sqrt2 - 1.0);

// (t/scale)^power with 0 at t = 0 and +inf for a zero scale at t > 0.
double branch(double t, double scale, double power) {
    if (t == 0.0) return 0.0;
    if (scale == 0.0) return kInf;
    return std::pow(t / scale, power);
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be nonnegative");
}

void require_dims(std::size_t n, std::size_t d) {
    if (n == 0 || d == 0) throw std::invalid_argument("n and d must be at least 1");
}

TailBoundCurve power_curve(BoundFamily family, double scale, double power, double valid_hi,
                           Sidedness sidedness, double c) {
    require_positive(c, "c");
    TailBoundCurve curve;
    curve.family = family;
    curve.constants["scale"] = scale;
    curve.constants["power"] = power;
    curve.prefactor = 2.0;
    curve.knob_name = "c";
    curve.knob = c;
    curve.knob_mode = KnobMode::rate;
    curve.valid_hi = valid_hi;
    curve.sidedness = sidedness;
    return curve;
}

double get(const TailBoundCurve& curve, const char* key) {
    const auto it = curve.constants.find(key);
    if (it == curve.constants.end()) {
        throw DefectError(std::string("bound curve is missing constant '") + key + "'");
    }
    return it->second;
}

}  // namespace

std::string to_string(BoundFamily family) {
    for (const auto& [f, name] : kFamilyNames) {
        if (f == family) return name;
    }
    return "unknown";
}

BoundFamily parse_bound_family(const std::string& name) {
    for (const auto& [f, n] : kFamilyNames) {
        if (name == n) return f;
    }
    throw std::invalid_argument("unknown bound family '" + name + "'");
}

std::string to_string(Sidedness s) { return s == Sidedness::two_sided ? "two-sided" : "upper"; }

Sidedness parse_sidedness(const std::string& name) {
    if (name == "two-sided") return Sidedness::two_sided;
    if (name == "upper") return Sidedness::upper;
    throw std::invalid_argument("unknown sidedness '" + name + "'");
}

TailBoundCurve TailBoundCurve::with_knob(double value) const {
    require_positive(value, "bound constant");
    TailBoundCurve copy = *this;
    copy.knob = value;
    return copy;
}

double TailBoundCurve::exponent(double t) const {
    switch (family) {
        case BoundFamily::hanson_wright:
            return std::min(branch(t, get(*this, "scale_hs"), 2.0),
                            branch(t, get(*this, "scale_op"), get(*this, "alpha") / 2.0));
        case BoundFamily::uniform_hw: {
            const double a = get(*this, "alpha");
            const double e = std::min(branch(t, get(*this, "E_sup_AX"), a),
                                      branch(t, get(*this, "sup_op"), a / 2.0));
            return e / std::pow(get(*this, "K_star"), a);
        }
        case BoundFamily::max_orlicz_shift:
            return get(*this, "c_alpha") * branch(t, 1.0, get(*this, "alpha"));
        default:
            return branch(t, get(*this, "scale"), get(*this, "power"));
    }
}

std::optional<double> TailBoundCurve::evaluate(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("bound argument t must be nonnegative");
    if (!in_validity(t)) return std::nullopt;
    const double e = exponent(t);
    if (e == kInf) return 0.0;
    return std::clamp(prefactor * std::exp(-rate() * e), 0.0, 1.0);
}

nlohmann::json TailBoundCurve::to_json() const {
    nlohmann::json j;
    j["family"] = to_string(family);
    j["constants"] = constants;
    j["prefactor"] = prefactor;
    j["knob"] = {{"name", knob_name},
                 {"value", knob},
                 {"mode", knob_mode == KnobMode::rate ? "rate" : "inverse-rate"}};
    j["validity"] = {0.0, std::isfinite(valid_hi) ? nlohmann::json(valid_hi) : nlohmann::json(nullptr)};
    j["sidedness"] = to_string(sidedness);
    return j;
}

TailBoundCurve TailBoundCurve::from_json(const nlohmann::json& j) {
    TailBoundCurve c;
    c.family = parse_bound_family(j.at("family").get<std::string>());
    c.constants = j.at("constants").get<std::map<std::string, double>>();
    c.prefactor = j.at("prefactor").get<double>();
    const auto& knob = j.at("knob");
    c.knob_name = knob.at("name").get<std::string>();
    c.knob = knob.at("value").get<double>();
    c.knob_mode = knob.at("mode").get<std::string>() == "rate" ? KnobMode::rate : KnobMode::inverse_rate;
    const auto& hi = j.at("validity").at(1);
    c.valid_hi = hi.is_null() ? kInf : hi.get<double>();
    c.sidedness = parse_sidedness(j.at("sidedness").get<std::string>());
    return c;
}

TailBoundCurve hanson_wright_curve(double K, double hs, double op, AlphaParam alpha, double C) {
    require_positive(K, "K");
    require_positive(C, "C");
    require_nonnegative(hs, "hs");
    require_nonnegative(op, "op");
    TailBoundCurve curve;
    curve.family = BoundFamily::hanson_wright;
    curve.constants = {{"K", K}, {"hs", hs}, {"op", op}, {"alpha", alpha.value()},
                       {"scale_hs", K * K * hs}, {"scale_op", K * K * op}};
    curve.prefactor = 2.0;
    curve.knob_name = "C";
    curve.knob = C;
    curve.knob_mode = KnobMode::inverse_rate;
    curve.sidedness = Sidedness::two_sided;
    return curve;
}

double hw_tail_bound(double t, double K, double hs, double op, AlphaParam alpha, double C) {
    return *hanson_wright_curve(K, hs, op, alpha, C).evaluate(t);
}

double hw_moment_bound(double p, double K, double hs, double op, AlphaParam alpha, double C) {
    if (!(p >= 2.0)) throw std::invalid_argument("moment order p must be >= 2");
    require_positive(K, "K");
    require_positive(C, "C");
    require_nonnegative(hs, "hs");
    require_nonnegative(op, "op");
    return C * K * K * (std::sqrt(p) * hs + std::pow(p, 2.0 / alpha.value()) * op);
}

TailBoundCurve convex_concentration_curve(ConvexMode mode, const ConvexParams& params) {
    if (mode == ConvexMode::convex_orlicz) {
        require_positive(params.k_star, "K*");
        TailBoundCurve curve = power_curve(BoundFamily::convex_conc, params.k_star, params.alpha.value(), kInf,
                                           Sidedness::two_sided, params.c);
        curve.constants["K_star"] = params.k_star;
        curve.constants["alpha"] = params.alpha.value();
        return curve;
    }
    if (!(params.a < params.b) || !std::isfinite(params.a) || !std::isfinite(params.b)) {
        throw std::invalid_argument("bounded convex concentration needs a < b");
    }
    const double width = params.b - params.a;
    // t^2 / (2 (b-a)^2) = (t / (sqrt 2 (b-a)))^2
    const bool separately = mode == ConvexMode::separately_convex_bounded;
    TailBoundCurve curve = power_curve(BoundFamily::classical_convex, std::numbers::sqrt2 * width, 2.0, kInf,
                                       separately ? Sidedness::upper : Sidedness::two_sided, params.c);
    curve.prefactor = separately ? 1.0 : 2.0;
    curve.constants["a"] = params.a;
    curve.constants["b"] = params.b;
    curve.constants["mode"] = separately ? 2.0 : 1.0;
    return curve;
}

double convex_concentration_bound(double t, ConvexMode mode, const ConvexParams& params) {
    return *convex_concentration_curve(mode, params).evaluate(t);
}

TailBoundCurve uniform_hw_curve(double k_star, double e_sup_ax, double sup_op, AlphaParam alpha, double C) {
    require_positive(k_star, "K*");
    require_positive(C, "C");
    require_nonnegative(e_sup_ax, "E sup |AX|");
    require_nonnegative(sup_op, "sup op");
    TailBoundCurve curve;
    curve.family = BoundFamily::uniform_hw;
    curve.constants = {{"K_star", k_star}, {"E_sup_AX", e_sup_ax}, {"sup_op", sup_op}, {"alpha", alpha.value()}};
    curve.prefactor = 2.0;
    curve.knob_name = "C";
    curve.knob = C;
    curve.knob_mode = KnobMode::rate;
    curve.sidedness = Sidedness::upper;
    return curve;
}

double uniform_hw_bound(double t, double k_star, double e_sup_ax, double sup_op, AlphaParam alpha, double C) {
    return *uniform_hw_curve(k_star, e_sup_ax, sup_op, alpha, C).evaluate(t);
}

double floored_log(std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    return n == 1 ? kLog2 : std::log(static_cast<double>(n));
}

TailBoundCurve tensor_curve(std::size_t n, std::size_t d, double K, AlphaParam alpha, double c, double c_range) {
    require_dims(n, d);
    require_positive(K, "K");
    require_positive(c_range, "C_range");
    const double a = alpha.value();
    const double nd = static_cast<double>(n), dd = static_cast<double>(d);
    const double log_factor = std::pow(floored_log(n), 1.0 / a);
    const double spread = std::pow(nd, (dd - 1.0) / 2.0);
    double scale, valid_hi;
    if (a >= 1.0) {
        scale = std::sqrt(dd) * spread * log_factor * K;
        valid_hi = c_range * std::pow(nd, dd / 2.0) * log_factor / K;
    } else {
        scale = std::pow(dd, 1.0 / a) * spread * log_factor * K;
        valid_hi = c_range * std::pow(nd, dd / 2.0) * log_factor * std::pow(dd, 1.0 / a - 0.5) / K;
    }
    TailBoundCurve curve = power_curve(BoundFamily::tensor, scale, a, valid_hi, Sidedness::two_sided, c);
    curve.constants.insert({{"n", nd}, {"d", dd}, {"K", K}, {"alpha", a}, {"C_range", c_range},
                            {"log_n_floored", n == 1 ? 1.0 : 0.0}});
    return curve;
}

std::optional<double> tensor_bound(double t, std::size_t n, std::size_t d, double K, AlphaParam alpha, double c,
                                   double c_range) {
    return tensor_curve(n, d, K, alpha, c, c_range).evaluate(t);
}

TailBoundCurve tensor_sharp_curve(std::size_t n, const std::vector<double>& factor_max_norms, double K,
                                  AlphaParam alpha, double c, double c_range) {
    const std::size_t d = factor_max_norms.size();
    require_dims(n, d);
    require_positive(K, "K");
    require_positive(c_range, "C_range");
    const double a = alpha.value();
    const double nd = static_cast<double>(n), dd = static_cast<double>(d);
    double s = 0.0;
    for (double m : factor_max_norms) {
        require_positive(m, "factor max norm");
        s += a >= 1.0 ? m * m : std::pow(m, a);
    }
    s = a >= 1.0 ? std::sqrt(s) : std::pow(s, 1.0 / a);
    const double scale = std::pow(nd, (dd - 1.0) / 2.0) * s;
    const double valid_hi = c_range * std::pow(nd, dd / 2.0) * s / (K * K * std::sqrt(dd));
    TailBoundCurve curve = power_curve(BoundFamily::tensor_sharp, scale, a, valid_hi, Sidedness::two_sided, c);
    curve.constants.insert({{"n", nd}, {"d", dd}, {"K", K}, {"alpha", a}, {"C_range", c_range}, {"S", s}});
    return curve;
}

TailBoundCurve tensor_functional_curve(std::size_t n, std::size_t d, double sigma, FunctionalInequality which,
                                       double c, double c_range) {
    require_dims(n, d);
    require_positive(sigma, "sigma");
    require_positive(c_range, "C_range");
    const double nd = static_cast<double>(n), dd = static_cast<double>(d);
    // Poincare: t / (d^(1/2) n^((d-1)/2) sigma); LSI: the square of the same ratio.
    const double scale = std::sqrt(dd) * std::pow(nd, (dd - 1.0) / 2.0) * sigma;
    const bool lsi = which == FunctionalInequality::lsi;
    TailBoundCurve curve = power_curve(lsi ? BoundFamily::tensor_lsi : BoundFamily::tensor_pi, scale,
                                       lsi ? 2.0 : 1.0, c_range * std::pow(nd, dd / 2.0) * sigma,
                                       Sidedness::two_sided, c);
    curve.constants.insert({{"n", nd}, {"d", dd}, {"sigma", sigma}, {"C_range", c_range}});
    return curve;
}

std::optional<double> tensor_functional_bound(double t, std::size_t n, std::size_t d, double sigma,
                                              FunctionalInequality which, double c, double c_range) {
    return tensor_functional_curve(n, d, sigma, which, c, c_range).evaluate(t);
}

TailBoundCurve euclidean_norm_curve(AlphaParam alpha, double c) {
    TailBoundCurve curve = power_curve(BoundFamily::euclid_norm, 1.0, alpha.value(), kInf, Sidedness::two_sided, c);
    curve.constants["alpha"] = alpha.value();
    return curve;
}

double euclidean_norm_bound(double t, AlphaParam alpha, double c) {
    return *euclidean_norm_curve(alpha, c).evaluate(t);
}

TailBoundCurve product_tail_curve(std::size_t n, std::size_t d, double K, AlphaParam alpha, double c) {
    require_dims(n, d);
    require_positive(K, "K");
    const double nd = static_cast<double>(n), dd = static_cast<double>(d);
    const double scale = K * K * std::sqrt(dd) * std::pow(nd, (dd - 1.0) / 2.0);
    TailBoundCurve curve = power_curve(BoundFamily::product_tail, scale, alpha.value(),
                                       2.0 * std::pow(nd, dd / 2.0), Sidedness::upper, c);
    curve.constants.insert({{"n", nd}, {"d", dd}, {"K", K}, {"alpha", alpha.value()}});
    return curve;
}

std::optional<double> product_tail_bound(double t, std::size_t n, std::size_t d, double K, AlphaParam alpha,
                                         double c) {
    return product_tail_curve(n, d, K, alpha, c).evaluate(t);
}

TailBoundCurve max_product_tail_curve(std::size_t n, std::size_t d, double K, AlphaParam alpha, double c) {
    require_dims(n, d);
    require_positive(K, "K");
    const double nd = static_cast<double>(n), dd = static_cast<double>(d);
    // n^(1/2) u / (K^2 d^(1/2)) = u / scale
    const double scale = K * K * std::sqrt(dd) / std::sqrt(nd);
    TailBoundCurve curve = power_curve(BoundFamily::max_product_tail, scale, alpha.value(), 2.0, Sidedness::upper, c);
    curve.constants.insert({{"n", nd}, {"d", dd}, {"K", K}, {"alpha", alpha.value()}});
    return curve;
}

std::optional<double> max_product_tail_bound(double u, std::size_t n, std::size_t d, double K, AlphaParam alpha,
                                             double c) {
    return max_product_tail_curve(n, d, K, alpha, c).evaluate(u);
}

double max_orlicz_bound(std::size_t n, double K, AlphaParam alpha) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    require_positive(K, "K");
    const double inv = alpha.inverse();
    const double C = std::max(std::pow(2.0, inv - 1.0), std::pow(2.0, 1.0 - inv));
    const double log_n = std::log(static_cast<double>(n));
    return C * K * std::max(std::pow(kMaxRatio, inv), std::pow(log_n, inv) * std::pow(2.0 / kLog2, inv));
}

double max_tail_shift(std::size_t n, AlphaParam alpha) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    return std::pow(std::log(static_cast<double>(n)) / alpha.c_split(), alpha.inverse());
}

TailBoundCurve max_tail_curve(std::size_t n, AlphaParam alpha) {
    TailBoundCurve curve;
    curve.family = BoundFamily::max_orlicz_shift;
    curve.constants = {{"n", static_cast<double>(n)}, {"alpha", alpha.value()}, {"c_alpha", alpha.c_split()},
                       {"shift", max_tail_shift(n, alpha)}};
    curve.prefactor = 2.0;
    curve.knob_name = "c";
    curve.knob = 1.0;
    curve.knob_mode = KnobMode::rate;
    curve.sidedness = Sidedness::upper;
    return curve;
}

double max_tail_bound(double t, std::size_t n, AlphaParam alpha) { return *max_tail_curve(n, alpha).evaluate(t); }

double shifted_tail_to_orlicz(double c_shift, AlphaParam alpha) {
    require_nonnegative(c_shift, "shift");
    const double inv = alpha.inverse();
    return std::pow(alpha.C_split(), inv) * std::max(std::pow(kMaxRatio, inv), c_shift * std::pow(2.0 / kLog2, inv));
}

double prefactor_adjust(double c1, double c2, double c) {
    if (!(c1 > c2 && c2 > 1.0) || !std::isfinite(c1)) throw std::invalid_argument("prefactor_adjust needs c1 > c2 > 1");
    require_positive(c, "c");
    return std::log(c2) / std::log(c1) * c;
}

TailBoundCurve subgaussian_to_alpha(double gamma, AlphaParam alpha) {
    require_positive(gamma, "gamma");
    // exp(-s^2) <= e exp(-s^alpha), then move the prefactor e to 2.
    const double rate = prefactor_adjust(std::numbers::e, 2.0, 1.0);
    TailBoundCurve curve = power_curve(BoundFamily::subgaussian_alpha, gamma, alpha.value(), kInf,
                                       Sidedness::two_sided, rate);
    curve.constants.insert({{"gamma", gamma}, {"alpha", alpha.value()}});
    return curve;
}

}  // namespace alphaconc
