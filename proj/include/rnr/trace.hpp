#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rnr/sensing.hpp"

namespace rnr {

inline constexpr const char* kTraceSchema = "rnr-trace/1";

struct TraceHeader {
    double rate_hz = 100.0;
    /// Extra header fields (seed, duration_s, source, ...), preserved verbatim.
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

/// Segment label line, e.g. {"marker":"upright"}; used by calibration.
struct TraceMarker {
    std::string label;

    friend bool operator==(const TraceMarker&, const TraceMarker&) = default;
};

using TraceRecord = std::variant<SensorSample, TraceMarker>;

struct Trace {
    TraceHeader header;
    std::vector<TraceRecord> records;

    std::vector<SensorSample> samples() const;
};

/// JSONL trace: a header line {"schema":"rnr-trace/1","rate_hz":...}, then
/// one sample or marker per line. Throws UsageError("line N: ...") at the
/// first malformed line.
Trace parse_trace(std::istream& in);
Trace load_trace(const std::filesystem::path& path);

std::string header_line(const TraceHeader& header);
std::string sample_line(const SensorSample& sample);
std::string marker_line(const TraceMarker& marker);
void write_trace(std::ostream& out, const Trace& trace);
std::string trace_to_string(const Trace& trace);

}  // namespace rnr
