#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rnr/analysis.hpp"
#include "rnr/config.hpp"
#include "rnr/engine.hpp"
#include "rnr/report.hpp"
#include "rnr/stimulus.hpp"
#include "rnr/trace.hpp"

namespace rnr {

namespace fs = std::filesystem;

struct CommonOptions {
    std::optional<fs::path> config;
    fs::path out = "rnr-out";
    std::uint64_t seed = 0;
    bool pretty = false;
};

Config resolve_config(const CommonOptions& common);

struct SimulateOptions {
    std::optional<double> rate_hz;
    std::optional<double> duration_s;
};

/// Samples (and markers) of a scripted ride; the header records seed and duration.
Trace simulate_trace(const std::vector<ScriptEntry>& script, const Config& config, std::uint64_t seed,
                     const SimulateOptions& options = {});

// Each command writes its artifacts under common.out and a summary to `log`.
// Bad input throws UsageError; domain failures throw DomainError.

/// trace -> state.jsonl, events.jsonl, report.json
RunReport cmd_replay(const fs::path& trace_path, const CommonOptions& common, std::ostream& log);

/// script -> trace.jsonl plus everything replay writes
RunReport cmd_simulate(const fs::path& script_path, const CommonOptions& common, const SimulateOptions& options,
                       std::ostream& log);

struct StimulusSpec {
    std::vector<StimulusRequest> pairs;
};

StimulusSpec parse_stimulus_spec(const nlohmann::json& j);

struct ManifestEntry {
    StimulusPair pair;  // pcm cleared after writing
    std::array<std::string, 2> files;
    std::array<ClipMeasurement, 2> measured;
    bool key_confirmed = false;
};

/// The fast/loud clip is confirmed when its re-measured onset rate (tempo) or
/// RMS (volume) exceeds the other clip's.
bool key_confirmed(const StimulusPair& pair, const std::array<ClipMeasurement, 2>& measured);

/// spec -> pair_NNN_a.wav, pair_NNN_b.wav, manifest.json. `jobs` > 1 renders
/// pairs concurrently; output is independent of it.
std::vector<ManifestEntry> cmd_stimuli(const fs::path& spec_path, const CommonOptions& common, int jobs,
                                       std::ostream& log);

/// annotated trace -> profile.conf
CalibrationProfile cmd_calibrate(const fs::path& trace_path, const CommonOptions& common, std::ostream& log);

}  // namespace rnr
