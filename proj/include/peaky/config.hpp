#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peaky/model.hpp"

namespace peaky {

/// Shortest text that parses back to exactly x; "inf" for +infinity.
std::string format_number(double x);

/// Inclusive grid start:stop:step. A bare number is a one-point grid.
struct Grid {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    /// Points start + k step up to stop, with 1e-9 slack at the end.
    std::vector<double> values() const;
    std::string text() const;
};

/// One number; "inf" is accepted. Throws DomainError for malformed text.
double parse_number(const std::string& text);

/// Throws DomainError for malformed text, step <= 0, or stop < start.
Grid parse_grid(const std::string& text);

enum class SweepAxis { EbN0Db, SnrDb };

/// A scenario family: scalars from the scenario schema, where M, nu and K may
/// also be lists, plus the sweep and run settings.
struct ScenarioConfig {
    Scheme scheme = Scheme::Oopsk;
    Coherence regime = Coherence::Coherent;
    std::vector<int> M{2};
    std::vector<double> nu{1.0};
    std::vector<double> K{0.0};
    double omega = 1.0;
    SweepAxis axis = SweepAxis::EbN0Db;
    std::optional<Grid> sweep;
    std::optional<Grid> rates;
    bool rates_in_bits = false;
    std::optional<std::int64_t> trials;
    std::optional<std::uint64_t> seed;

    /// Scenario at one grid value of the sweep axis (in dB).
    Scenario scenario(int M, double nu, double K, double axis_db) const;
    /// Canonical JSON text of this configuration.
    std::string to_json() const;
};

/// Parses JSON config text. Throws DomainError on schema violations.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

}  // namespace peaky
