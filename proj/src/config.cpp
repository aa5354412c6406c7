#include "alphaconc/config.hpp"

#include "alphaconc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace alphaconc {

namespace {

const std::set<std::string> kKinds = {"hanson-wright", "uniform-hw",  "convex-conc",  "classical-convex",
                                      "tensor",        "tensor-pi",   "tensor-lsi",   "euclid-norm",
                                      "product-tail",  "max-product-tail", "max-tail"};
const std::set<std::string> kFamilies = {"constant", "rademacher", "uniform", "gaussian", "weibull"};
const std::set<std::string> kEnsembles = {"goe", "diag", "sparse-sign"};

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ParseError("expected a finite number, got '" + text + "'", line, key);
    }
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text, std::size_t line) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        // Accept integral values written in floating notation, e.g. 1e5.
        double f = 0.0;
        const auto fres = std::from_chars(text.data(), text.data() + text.size(), f);
        if (fres.ec == std::errc() && fres.ptr == text.data() + text.size() && f >= 0.0 && f < 1.8e19 &&
            std::floor(f) == f) {
            return static_cast<std::uint64_t>(f);
        }
        throw ParseError("expected a nonnegative integer, got '" + text + "'", line, key);
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text, std::size_t line) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ParseError("expected true or false, got '" + text + "'", line, key);
}

std::string parse_choice(const std::string& key, const std::string& text, const std::set<std::string>& allowed,
                         std::size_t line) {
    if (!allowed.count(text)) throw ParseError("unsupported value '" + text + "'", line, key);
    return text;
}

struct KeyDef {
    std::function<void(ExperimentConfig&, const std::string&, std::size_t)> set;
    std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <class T>
KeyDef double_key(T ExperimentConfig::*field, const std::string& key) {
    return {[field, key](ExperimentConfig& c, const std::string& v, std::size_t line) {
                c.*field = parse_double(key, v, line);
            },
            [field](const ExperimentConfig& c) -> std::optional<std::string> {
                if constexpr (std::is_same_v<T, std::optional<double>>) {
                    if (!(c.*field)) return std::nullopt;
                    return format_double(*(c.*field));
                } else {
                    return format_double(c.*field);
                }
            }};
}

template <class T>
KeyDef uint_key(T ExperimentConfig::*field, const std::string& key) {
    return {[field, key](ExperimentConfig& c, const std::string& v, std::size_t line) {
                c.*field = parse_uint(key, v, line);
            },
            [field](const ExperimentConfig& c) -> std::optional<std::string> {
                if constexpr (std::is_same_v<T, std::optional<std::uint64_t>>) {
                    if (!(c.*field)) return std::nullopt;
                    return std::to_string(*(c.*field));
                } else {
                    return std::to_string(c.*field);
                }
            }};
}

KeyDef choice_key(std::string ExperimentConfig::*field, const std::string& key, const std::set<std::string>& allowed) {
    return {[field, key, &allowed](ExperimentConfig& c, const std::string& v, std::size_t line) {
                c.*field = parse_choice(key, v, allowed, line);
            },
            [field](const ExperimentConfig& c) -> std::optional<std::string> { return c.*field; }};
}

const std::vector<std::pair<std::string, KeyDef>>& registry() {
    static const std::set<std::string> scales = {"log", "linear"};
    static const std::set<std::string> units = {"natural", "scale"};
    static const std::vector<std::pair<std::string, KeyDef>> keys = {
        {"experiment.kind", choice_key(&ExperimentConfig::kind, "experiment.kind", kKinds)},
        {"alpha", double_key(&ExperimentConfig::alpha, "alpha")},
        {"n", uint_key(&ExperimentConfig::n, "n")},
        {"d", uint_key(&ExperimentConfig::d, "d")},
        {"m", uint_key(&ExperimentConfig::m, "m")},
        {"N", uint_key(&ExperimentConfig::N, "N")},
        {"seed", uint_key(&ExperimentConfig::seed, "seed")},
        {"conf_level", double_key(&ExperimentConfig::conf_level, "conf_level")},
        {"t_grid.min", double_key(&ExperimentConfig::t_min, "t_grid.min")},
        {"t_grid.max", double_key(&ExperimentConfig::t_max, "t_grid.max")},
        {"t_grid.points", uint_key(&ExperimentConfig::t_points, "t_grid.points")},
        {"t_grid.scale", choice_key(&ExperimentConfig::t_scale, "t_grid.scale", scales)},
        {"t_grid.unit", choice_key(&ExperimentConfig::t_unit, "t_grid.unit", units)},
        {"distribution.family", choice_key(&ExperimentConfig::dist_family, "distribution.family", kFamilies)},
        {"distribution.value", double_key(&ExperimentConfig::dist_value, "distribution.value")},
        {"distribution.a", double_key(&ExperimentConfig::dist_a, "distribution.a")},
        {"distribution.b", double_key(&ExperimentConfig::dist_b, "distribution.b")},
        {"distribution.shape", double_key(&ExperimentConfig::dist_shape, "distribution.shape")},
        {"distribution.scale", double_key(&ExperimentConfig::dist_scale, "distribution.scale")},
        {"distribution.truncation", double_key(&ExperimentConfig::dist_truncation, "distribution.truncation")},
        {"matrix.ensemble", choice_key(&ExperimentConfig::matrix_ensemble, "matrix.ensemble", kEnsembles)},
        {"matrix.file",
         {[](ExperimentConfig& c, const std::string& v, std::size_t line) {
              if (v.empty()) throw ParseError("empty path", line, "matrix.file");
              c.matrix_file = v;
          },
          [](const ExperimentConfig& c) { return c.matrix_file; }}},
        {"matrix.density", double_key(&ExperimentConfig::matrix_density, "matrix.density")},
        {"bound.C", double_key(&ExperimentConfig::bound_C, "bound.C")},
        {"bound.c", double_key(&ExperimentConfig::bound_c, "bound.c")},
        {"bound.C_range", double_key(&ExperimentConfig::bound_C_range, "bound.C_range")},
        {"bound.K", double_key(&ExperimentConfig::bound_K, "bound.K")},
        {"bound.sigma", double_key(&ExperimentConfig::bound_sigma, "bound.sigma")},
        {"calibration.enabled",
         {[](ExperimentConfig& c, const std::string& v, std::size_t line) {
              c.calibration_enabled = parse_bool("calibration.enabled", v, line);
          },
          [](const ExperimentConfig& c) -> std::optional<std::string> {
              return c.calibration_enabled ? "true" : "false";
          }}},
        {"calibration.min", double_key(&ExperimentConfig::calibration_min, "calibration.min")},
        {"calibration.max", double_key(&ExperimentConfig::calibration_max, "calibration.max")},
        {"workers", uint_key(&ExperimentConfig::workers, "workers")},
        {"pilot_N", uint_key(&ExperimentConfig::pilot_N, "pilot_N")},
        {"memory_budget", uint_key(&ExperimentConfig::memory_budget, "memory_budget")},
        {"family_size", uint_key(&ExperimentConfig::family_size, "family_size")},
    };
    return keys;
}

const KeyDef& find_key(const std::string& key, std::size_t line) {
    for (const auto& [name, def] : registry()) {
        if (name == key) return def;
    }
    throw ParseError("unknown configuration key", line, key);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

DistributionSpec ExperimentConfig::distribution() const {
    DistributionSpec spec;
    if (dist_family == "constant") {
        spec = DistributionSpec::constant(dist_value);
    } else if (dist_family == "rademacher") {
        spec = DistributionSpec::rademacher();
    } else if (dist_family == "uniform") {
        spec = DistributionSpec::uniform(dist_a, dist_b);
    } else if (dist_family == "gaussian") {
        spec = DistributionSpec::gaussian();
    } else if (dist_family == "weibull") {
        spec = DistributionSpec::weibull(dist_shape.value_or(alpha));
    } else {
        throw ParseError("unsupported distribution family", 0, "distribution.family");
    }
    spec = spec.scaled(dist_scale);
    if (dist_truncation) spec = DistributionSpec::truncated(spec, *dist_truncation);
    spec.validate();
    return spec;
}

std::vector<double> ExperimentConfig::t_grid(double unit_scale) const {
    std::vector<double> grid(static_cast<std::size_t>(t_points));
    const double lo = t_min * unit_scale, hi = t_max * unit_scale;
    if (grid.size() == 1) return {lo};
    const double last = static_cast<double>(grid.size() - 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double f = static_cast<double>(i) / last;
        grid[i] = t_scale == "log" ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, def] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value, std::size_t line) {
    find_key(key, line).set(config, value, line);
}

std::optional<std::string> get_config_value(const ExperimentConfig& config, const std::string& key) {
    return find_key(key, 0).get(config);
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig config;
    std::set<std::string> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ParseError("missing key", line);
        if (!seen.insert(key).second) throw ParseError("duplicate key", line, key);
        set_config_value(config, key, value, line);
    }
    validate_config(config);
    return config;
}

ExperimentConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    return parse_config(in);
}

void validate_config(const ExperimentConfig& c) {
    const auto fail = [](const std::string& what, const std::string& key) { throw ParseError(what, 0, key); };
    if (!c.seed) fail("seed is required", "seed");
    if (!(c.alpha > 0.0 && c.alpha <= 2.0)) fail("alpha must lie in (0, 2]", "alpha");
    if (c.n == 0) fail("n must be positive", "n");
    if (c.d == 0) fail("d must be positive", "d");
    if (c.m == 0) fail("m must be positive", "m");
    if (c.N == 0) fail("N must be positive", "N");
    if (!(c.conf_level > 0.0 && c.conf_level < 1.0)) fail("conf_level must lie in (0, 1)", "conf_level");
    if (c.t_points == 0) fail("t_grid.points must be positive", "t_grid.points");
    if (c.t_min > c.t_max) fail("t_grid.min must not exceed t_grid.max", "t_grid.min");
    if (c.t_scale == "log" && !(c.t_min > 0.0)) fail("log grids need t_grid.min > 0", "t_grid.min");
    if (c.workers == 0) fail("workers must be positive", "workers");
    if (!(c.calibration_min > 0.0 && c.calibration_min <= c.calibration_max)) {
        fail("calibration interval must be positive and ordered", "calibration.min");
    }
    if (!(c.matrix_density > 0.0 && c.matrix_density <= 1.0)) fail("density must lie in (0, 1]", "matrix.density");
    if (c.family_size == 0) fail("family_size must be positive", "family_size");
    for (const auto& [key, v] : {std::pair{"bound.C", c.bound_C}, std::pair{"bound.c", c.bound_c},
                                 std::pair{"bound.K", c.bound_K}}) {
        if (v && !(*v > 0.0)) fail("must be positive", key);
    }
    if (!(c.bound_C_range > 0.0)) fail("must be positive", "bound.C_range");
    if (!(c.bound_sigma > 0.0)) fail("must be positive", "bound.sigma");
}

std::string serialize(const ExperimentConfig& config) {
    std::string out;
    for (const auto& [name, def] : registry()) {
        if (const auto v = def.get(config)) out += name + " = " + *v + "\n";
    }
    return out;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [name, def] : registry()) {
        if (name == "workers") continue;
        const auto v = def.get(config);
        if (!v) continue;
        for (char ch : name + "=" + *v + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace alphaconc
