#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rnr/engine.hpp"

namespace rnr {

struct WindowStats {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;  // exclusive
    double mean_bpm = 0.0;
    double mean_vol = 0.0;
    std::size_t event_count = 0;
    std::optional<double> beat_bpm;        // from inter-onset intervals
    std::optional<double> mean_event_vol;
};

struct RunReport {
    std::string trace_id;
    std::int64_t window_ms = 10000;
    std::vector<WindowStats> windows;
    std::size_t event_count = 0;
    std::vector<std::pair<std::int64_t, Mode>> mode_timeline;
    std::vector<std::pair<std::string, bool>> checks;

    bool all_checks_pass() const;
};

/// Tempo implied by the onsets (distinct event times): 60 / (mean IOI * steps_per_beat).
std::optional<double> bpm_from_events(std::span<const BeatEvent> events, int steps_per_beat);

/// Windows tile [first state t, last state t] without overlap; the last one
/// may be short.
RunReport build_report(std::string trace_id, const ReplayResult& result, const Config& config,
                       std::int64_t window_ms = 10000);

nlohmann::ordered_json report_to_json(const RunReport& report);
std::string report_to_table(const RunReport& report);

/// FNV-1a 64 of the bytes, hex; used as a trace id.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace rnr
