// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#pragma once

#include "sparsewb/array_model.hpp"
#include "sparsewb/design_cs.hpp"
#include "sparsewb/evaluation.hpp"
#include "sparsewb/ga_baseline.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsewb::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalFailure = 2 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    double aperture = 10.0;
    Index grid_count = 100;
    TdlConfig tdl{25};
    SamplingSpec sampling;
    DesignSpec design;
    bool use_rv = true;
    GaConfig ga;
    int ga_sensors = 11;
    double ga_aperture = 6.16;
    DenseGrid dense;

    /// Throws ConfigError when any module invariant is violated.
    void validate() const;
    [[nodiscard]] JclsSpec jcls_spec() const;
};

/// Parses JSON text. Unknown keys and wrong types are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Rows of locations.csv.
struct Location {
    Index index = 0;
    double position = 0.0;
    double group_norm = 0.0;
};

void write_locations(std::ostream& out, const std::vector<Location>& rows);
void write_weights(std::ostream& out, const std::vector<Index>& sensors, const WeightVector& w);
void write_pattern(std::ostream& out, const BeampatternGrid& pattern);

/// Throws ConfigError on malformed input.
std::vector<Location> read_locations(std::istream& in);
/// Weights ordered like `sensors`; every (sensor, tap) must be present exactly once.
WeightVector read_weights(std::istream& in, const std::vector<Index>& sensors, Index taps);

/// Formats a value the way every output file does (shortest round-trip form).
std::string format_number(double v);

/// Runs the command-line front end and returns its exit code.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace sparsewb::cli
