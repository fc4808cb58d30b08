#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rnr/mapping.hpp"
#include "rnr/sensing.hpp"
#include "rnr/sequencer.hpp"
#include "rnr/simulator.hpp"

namespace rnr {

/// Everything tunable, read from flat `key = value` files. The defaults live
/// only in config/default.conf, which is compiled into the library.
struct Config {
    CalibrationProfile sensing;
    MappingConfig mapping;
    BikeParams bike;
    NoiseConfig noise;  // rng_seed is set from --seed, not from the file
    double rate_hz = 0.0;
    std::string pattern;  // pattern file path; empty = built-in pattern
    int sample_rate = 0;
    double tick_hz = 0.0;
    double state_hz = 0.0;

    void validate() const;
    DrumPattern drum_pattern() const;
};

/// The text of config/default.conf.
const std::string& default_config_text();
Config default_config();

/// Keys present in `in` override the defaults. Unknown keys, malformed
/// values and invariant violations throw UsageError.
Config parse_config(std::istream& in);
Config load_config(const std::filesystem::path& path);

/// Sensing keys only, in config-file syntax (the calibrate output).
std::string profile_to_text(const CalibrationProfile& profile);

}  // namespace rnr
