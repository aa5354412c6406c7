#pragma once

#include "alphaconc/distributions.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace alphaconc {

/// Flat key = value experiment description. Every key has a fixed canonical
/// text form, so serialize() followed by parse_config() is the identity.
struct ExperimentConfig {
    std::string kind = "hanson-wright";
    double alpha = 2.0;
    std::uint64_t n = 50;
    std::uint64_t d = 3;
    std::uint64_t m = 30;
    std::uint64_t N = 10000;
    std::optional<std::uint64_t> seed;
    double conf_level = 0.95;

    double t_min = 0.1;
    double t_max = 10.0;
    std::uint64_t t_points = 30;
    std::string t_scale = "log";      // log | linear
    std::string t_unit = "natural";   // natural | scale (the kind's natural deviation scale)

    std::string dist_family = "gaussian";
    double dist_value = 0.0;
    double dist_a = -1.0;
    double dist_b = 1.0;
    std::optional<double> dist_shape;  // defaults to alpha
    double dist_scale = 1.0;
    std::optional<double> dist_truncation;

    std::string matrix_ensemble = "goe";
    std::optional<std::string> matrix_file;
    double matrix_density = 0.1;

    std::optional<double> bound_C;
    std::optional<double> bound_c;
    double bound_C_range = 1.0;
    std::optional<double> bound_K;
    double bound_sigma = 1.0;

    bool calibration_enabled = false;
    double calibration_min = 1e-3;
    double calibration_max = 1e3;

    std::uint64_t workers = 1;
    std::uint64_t pilot_N = 0;
    std::uint64_t memory_budget = kDefaultTensorBudget;
    std::uint64_t family_size = 5;

    bool operator==(const ExperimentConfig&) const = default;

    /// Coordinate law described by the distribution.* keys.
    DistributionSpec distribution() const;
    std::vector<double> t_grid(double unit_scale = 1.0) const;
};

/// All recognized keys, in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form; `line` is only used for diagnostics.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value,
                      std::size_t line = 0);

/// Canonical text of one key; nullopt for unset optional keys.
std::optional<std::string> get_config_value(const ExperimentConfig& config, const std::string& key);

/// Parses `key = value` lines with `#` comments. Throws ParseError with line
/// and key for unknown or duplicate keys, malformed values and a missing seed.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Throws ParseError if semantic checks fail (missing seed, bad ranges).
void validate_config(const ExperimentConfig& config);

std::string serialize(const ExperimentConfig& config);

/// FNV-1a of the canonical text without the workers key, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace alphaconc
