#include "rnr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rnr {
namespace {

constexpr double kSlewTolerance = 1e-9;

template <typename T, typename F>
bool all_of(const std::vector<T>& v, F f) {
    return std::all_of(v.begin(), v.end(), f);
}

bool slew_bounded(const ReplayResult& r, const MappingConfig& m) {
    for (std::size_t i = 1; i < r.states.size(); ++i) {
        const double dt = static_cast<double>(r.states[i].t_ms - r.states[i - 1].t_ms) / 1000.0;
        if (std::abs(r.states[i].bpm - r.states[i - 1].bpm) > m.bpm_slew * dt + kSlewTolerance ||
            std::abs(r.states[i].vol - r.states[i - 1].vol) > m.vol_slew * dt + kSlewTolerance) {
            return false;
        }
    }
    return true;
}

/// Each event must fall in a tick interval (t[i-1], t[i]] whose state i is Riding.
bool silent_while_stopped(const ReplayResult& r) {
    for (const auto& e : r.events) {
        const auto it = std::lower_bound(r.states.begin(), r.states.end(), e.t_ms,
                                         [](const EngineState& s, double t) { return static_cast<double>(s.t_ms) < t; });
        if (it == r.states.end() || it->ride_state != RideState::Riding) {
            return false;
        }
    }
    return true;
}

std::string optional_cell(const std::optional<double>& v, const char* fmt) {
    if (!v) {
        return "-";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, *v);
    return buf;
}

}  // namespace

bool RunReport::all_checks_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

std::optional<double> bpm_from_events(std::span<const BeatEvent> events, int steps_per_beat) {
    std::vector<double> onsets;
    for (const auto& e : events) {
        if (onsets.empty() || e.t_ms - onsets.back() > 1e-6) {
            onsets.push_back(e.t_ms);
        }
    }
    if (onsets.size() < 2) {
        return std::nullopt;
    }
    const double ioi_ms = (onsets.back() - onsets.front()) / static_cast<double>(onsets.size() - 1);
    return 60000.0 / (ioi_ms * steps_per_beat);
}

RunReport build_report(std::string trace_id, const ReplayResult& result, const Config& config,
                       std::int64_t window_ms) {
    RunReport report;
    report.trace_id = std::move(trace_id);
    report.window_ms = window_ms;
    report.event_count = result.events.size();
    const int spb = config.drum_pattern().steps_per_beat;

    if (!result.states.empty()) {
        const std::int64_t t0 = result.states.front().t_ms;
        const std::int64_t t_end = result.states.back().t_ms + 1;
        std::size_t si = 0;
        std::size_t ei = 0;
        for (std::int64_t start = t0; start < t_end; start += window_ms) {
            WindowStats w;
            w.start_ms = start;
            w.end_ms = std::min(start + window_ms, t_end);
            double bpm_sum = 0.0;
            double vol_sum = 0.0;
            std::size_t n = 0;
            for (; si < result.states.size() && result.states[si].t_ms < w.end_ms; ++si, ++n) {
                bpm_sum += result.states[si].bpm;
                vol_sum += result.states[si].vol;
            }
            if (n > 0) {
                w.mean_bpm = bpm_sum / static_cast<double>(n);
                w.mean_vol = vol_sum / static_cast<double>(n);
            }
            const std::size_t first_event = ei;
            double event_vol = 0.0;
            for (; ei < result.events.size() && result.events[ei].t_ms < static_cast<double>(w.end_ms); ++ei) {
                event_vol += result.events[ei].vol;
            }
            w.event_count = ei - first_event;
            if (w.event_count > 0) {
                w.mean_event_vol = event_vol / static_cast<double>(w.event_count);
                w.beat_bpm = bpm_from_events(std::span(result.events).subspan(first_event, w.event_count), spb);
            }
            report.windows.push_back(w);
        }
    }

    for (const auto& s : result.states) {
        if (report.mode_timeline.empty() || report.mode_timeline.back().second != s.mode) {
            report.mode_timeline.emplace_back(s.t_ms, s.mode);
        }
    }

    const auto& m = config.mapping;
    report.checks = {
        {"bpm_in_range", all_of(result.states, [&](const EngineState& s) { return s.bpm >= m.bpm_min && s.bpm <= m.bpm_max; })},
        {"vol_in_range", all_of(result.states, [&](const EngineState& s) { return s.vol >= m.vol_min && s.vol <= m.vol_max; })},
        {"slew_bounded", slew_bounded(result, m)},
        {"silent_while_stopped", silent_while_stopped(result)},
        {"events_time_ordered", std::is_sorted(result.events.begin(), result.events.end(),
                                               [](const BeatEvent& a, const BeatEvent& b) { return a.t_ms < b.t_ms; })},
    };
    return report;
}

nlohmann::ordered_json report_to_json(const RunReport& report) {
    nlohmann::ordered_json j;
    j["trace_id"] = report.trace_id;
    j["window_ms"] = report.window_ms;
    j["event_count"] = report.event_count;
    auto& windows = j["windows"] = nlohmann::ordered_json::array();
    for (const auto& w : report.windows) {
        nlohmann::ordered_json jw;
        jw["start_ms"] = w.start_ms;
        jw["end_ms"] = w.end_ms;
        jw["mean_bpm"] = w.mean_bpm;
        jw["mean_vol"] = w.mean_vol;
        jw["event_count"] = w.event_count;
        jw["beat_bpm"] = w.beat_bpm ? nlohmann::ordered_json(*w.beat_bpm) : nlohmann::ordered_json(nullptr);
        jw["mean_event_vol"] =
            w.mean_event_vol ? nlohmann::ordered_json(*w.mean_event_vol) : nlohmann::ordered_json(nullptr);
        windows.push_back(jw);
    }
    auto& timeline = j["mode_timeline"] = nlohmann::ordered_json::array();
    for (const auto& [t, mode] : report.mode_timeline) {
        timeline.push_back({{"t_ms", t}, {"mode", to_string(mode)}});
    }
    auto& checks = j["checks"] = nlohmann::ordered_json::object();
    for (const auto& [name, ok] : report.checks) {
        checks[name] = ok;
    }
    return j;
}

std::string report_to_table(const RunReport& report) {
    std::ostringstream out;
    char line[160];
    out << "trace " << report.trace_id << "  events " << report.event_count << "\n";
    out << "  window (s)      mean bpm  mean vol  events  beat bpm  event vol\n";
    for (const auto& w : report.windows) {
        std::snprintf(line, sizeof line, "  %6.1f-%-6.1f  %9.2f  %8.3f  %6zu  %8s  %9s\n", w.start_ms / 1000.0,
                      w.end_ms / 1000.0, w.mean_bpm, w.mean_vol, w.event_count,
                      optional_cell(w.beat_bpm, "%.2f").c_str(), optional_cell(w.mean_event_vol, "%.3f").c_str());
        out << line;
    }
    out << "  modes:";
    for (const auto& [t, mode] : report.mode_timeline) {
        out << ' ' << to_string(mode) << "@" << t << "ms";
    }
    out << "\n  checks:";
    for (const auto& [name, ok] : report.checks) {
        out << ' ' << name << '=' << (ok ? "pass" : "FAIL");
    }
    out << '\n';
    return out.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace rnr
