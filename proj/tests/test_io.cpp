#include <algorithm>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"

#include "rnr/calibrate.hpp"
#include "rnr/commands.hpp"
#include "rnr/config.hpp"
#include "rnr/engine.hpp"
#include "rnr/errors.hpp"
#include "rnr/report.hpp"
#include "rnr/trace.hpp"

using namespace rnr;

namespace {

Trace parse(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const UsageError& e) {
        return e.what();
    }
    return "";
}

const char* kHeader = R"({"schema":"rnr-trace/1","rate_hz":100})";

Trace trace_from_script(const std::string& script_json, std::uint64_t seed = 1,
                        std::optional<double> duration = std::nullopt) {
    return simulate_trace(parse_script(nlohmann::json::parse(script_json)), default_config(), seed,
                          {std::nullopt, duration});
}

}  // namespace

TEST_CASE("trace: parse samples, dropouts, markers and header extras") {
    const auto t = parse(std::string(R"({"schema":"rnr-trace/1","rate_hz":50,"seed":3})") + "\n" +
                         R"({"t_ms":0,"ax":0.1,"ay":0,"az":9.81,"ultra_mm":600})" + "\n\n" +
                         R"({"marker":"upright"})" + "\n" +
                         R"({"t_ms":20,"ax":0,"ay":0,"az":9.8,"ultra_mm":null,"button":2})" + "\n");
    CHECK(t.header.rate_hz == 50);
    CHECK(t.header.extra["seed"] == 3);
    REQUIRE(t.records.size() == 3);
    const auto samples = t.samples();
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].ultra_mm == 600);
    CHECK_FALSE(samples[1].ultra_mm.has_value());
    CHECK(samples[1].button_presses == 2);
    CHECK(std::get<TraceMarker>(t.records[1]).label == "upright");
}

TEST_CASE("trace: write then parse is the identity") {
    const Trace t = trace_from_script(R"([{"t_ms":0,"effort":0.7,"lean":0.4,"marker":"upright"},{"t_ms":500,"button":1}])");
    const std::string text = trace_to_string(t);
    const Trace back = parse(text);
    CHECK(back.records == t.records);
    CHECK(trace_to_string(back) == text);
}

TEST_CASE("trace: errors name the first bad line") {
    const std::string ok = std::string(kHeader) + "\n" + R"({"t_ms":0,"ax":0,"ay":0,"az":9.81,"ultra_mm":600})" + "\n";
    CHECK(error_of(ok + R"({"t_ms":10,"ax":0,"ay":0,"az":9.8)").find("line 3") == 0);
    CHECK(error_of(ok + R"({"t_ms":0,"ax":0,"ay":0,"az":9.8,"ultra_mm":1})").find("line 3") == 0);
    CHECK(error_of(ok + R"({"t_ms":10,"ax":0,"ay":0,"az":9.8,"ultra_mm":9000})").find("line 3") == 0);
    CHECK(error_of(ok + R"({"t_ms":10,"ay":0,"az":9.8,"ultra_mm":1})").find("line 3") == 0);
    CHECK(error_of(R"({"schema":"rnr-trace/9","rate_hz":100})").find("line 1") == 0);
    CHECK(error_of(R"({"t_ms":0,"ax":0,"ay":0,"az":9.81,"ultra_mm":600})").find("line 1") == 0);
    CHECK(error_of("").find("empty") != std::string::npos);
    CHECK(error_of(ok).empty());
}

TEST_CASE("config: defaults, overrides and rejection") {
    const Config d = default_config();
    CHECK(d.rate_hz == 100);
    CHECK(d.tick_hz == 100);
    CHECK(d.state_hz == 20);
    CHECK(d.sample_rate == 44100);
    CHECK(d.sensing.median_taps == 5);
    CHECK(d.sensing.stop_hold_ms == 1500);
    CHECK(d.bike.mount_upright_mm == 600);

    std::istringstream over("# comment\nbpm_max = 150\nv_stop=0.04\n");
    const Config c = parse_config(over);
    CHECK(c.mapping.bpm_max == 150);
    CHECK(c.sensing.v_stop == 0.04);
    CHECK(c.mapping.bpm_min == 60);

    std::istringstream unknown("tempo_boost = 3\n");
    CHECK_THROWS_AS(parse_config(unknown), UsageError);
    std::istringstream bad_value("bpm_max = fast\n");
    CHECK_THROWS_AS(parse_config(bad_value), UsageError);
    std::istringstream bad_range("default_bpm = 300\n");
    CHECK_THROWS_AS(parse_config(bad_range), UsageError);
}

TEST_CASE("config: calibrate output parses back as a config") {
    CalibrationProfile p = default_config().sensing;
    p.d_upright_mm = 612.5;
    p.d_forward_mm = 287;
    std::istringstream in(profile_to_text(p));
    const Config c = parse_config(in);
    CHECK(c.sensing.d_upright_mm == 612.5);
    CHECK(c.sensing.d_forward_mm == 287);
}

TEST_CASE("calibrate: noisy 600/300 segments land within 5 mm, matching an offline sort") {
    const Trace t = trace_from_script(
        R"([{"t_ms":0,"lean":0,"marker":"upright"},{"t_ms":4000,"lean":1},{"t_ms":6000,"marker":"forward"},{"t_ms":10000,"marker":"end"}])",
        7, 10.5);
    const auto p = calibrate(t, default_config().sensing);
    CHECK(std::abs(p.d_upright_mm - 600) <= 5);
    CHECK(std::abs(p.d_forward_mm - 300) <= 5);

    // oracle: gather each segment by hand and take the sorted middle
    std::vector<double> up, fwd;
    std::vector<double>* cur = nullptr;
    for (const auto& r : t.records) {
        if (const auto* m = std::get_if<TraceMarker>(&r)) {
            cur = m->label == "upright" ? &up : m->label == "forward" ? &fwd : nullptr;
        } else if (cur && std::get<SensorSample>(r).ultra_mm) {
            cur->push_back(*std::get<SensorSample>(r).ultra_mm);
        }
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    };
    CHECK(p.d_upright_mm == median(up));
    CHECK(p.d_forward_mm == median(fwd));
}

TEST_CASE("calibrate: identical segments fail, missing markers are a usage error") {
    const Trace same = trace_from_script(
        R"([{"t_ms":0,"marker":"upright"},{"t_ms":3000,"marker":"forward"}])", 7, 6.0);
    CHECK_THROWS_AS(calibrate(same, default_config().sensing), CalibrationFailed);
    const Trace none = trace_from_script(R"([{"t_ms":0,"lean":0.5}])", 7, 2.0);
    CHECK_THROWS_AS(calibrate(none, default_config().sensing), UsageError);
}

TEST_CASE("engine: replay at rest emits nothing and stays stopped") {
    const Trace t = trace_from_script(R"([])", 3, 20.0);
    const auto r = replay(t, default_config());
    CHECK(r.events.empty());
    for (const auto& s : r.states) REQUIRE(s.ride_state == RideState::Stopped);
}

TEST_CASE("engine: button presses in the trace cycle the mode") {
    const Trace t = trace_from_script(R"([{"t_ms":100,"button":1},{"t_ms":200,"button":1},{"t_ms":300,"button":1}])", 3, 1.0);
    const auto r = replay(t, default_config());
    std::vector<Mode> seen;
    for (const auto& s : r.states) {
        if (seen.empty() || seen.back() != s.mode) seen.push_back(s.mode);
    }
    CHECK(seen == std::vector<Mode>{Mode::VolumeOnly, Mode::TempoOnly, Mode::Both, Mode::VolumeOnly});
}

TEST_CASE("report: windows tile the run, checks pass on a simulated ride") {
    const Trace t = trace_from_script(
        R"([{"t_ms":0,"button":2,"effort":0.3},{"t_ms":12000,"effort":0.9},{"t_ms":24000,"effort":0.0}])");
    const auto r = replay(t, default_config());
    const auto report = build_report("x", r, default_config());
    CHECK(report.all_checks_pass());
    REQUIRE(report.windows.size() >= 3);
    CHECK(report.windows.front().start_ms == r.states.front().t_ms);
    for (std::size_t i = 1; i < report.windows.size(); ++i) {
        CHECK(report.windows[i].start_ms == report.windows[i - 1].end_ms);
    }
    CHECK(report.windows.back().end_ms == r.states.back().t_ms + 1);
    std::size_t total = 0;
    for (const auto& w : report.windows) total += w.event_count;
    CHECK(total == r.events.size());
    CHECK(report.event_count == r.events.size());
    const auto j = report_to_json(report);
    CHECK(j["windows"].size() == report.windows.size());
    CHECK(report_to_table(report).find("checks:") != std::string::npos);
}

TEST_CASE("report: flags an event emitted while stopped") {
    ReplayResult r;
    EngineState s = initial_engine_state(default_config().mapping);
    for (int k = 0; k < 10; ++k) {
        s.t_ms = k * 10;
        r.states.push_back(s);
    }
    r.events.push_back({45.0, 0, Voice::Kick, 110, 0.6});
    const auto report = build_report("x", r, default_config());
    CHECK_FALSE(report.all_checks_pass());
}

TEST_CASE("report: bpm_from_events") {
    std::vector<BeatEvent> ev;
    for (int k = 0; k < 9; ++k) {
        ev.push_back({k * 250.0, 0, Voice::Hat, 120, 1.0});
        if (k % 4 == 0) ev.push_back({k * 250.0, 0, Voice::Kick, 120, 1.0});
    }
    CHECK(*bpm_from_events(ev, 2) == doctest::Approx(120));
    CHECK_FALSE(bpm_from_events({}, 2).has_value());
}
