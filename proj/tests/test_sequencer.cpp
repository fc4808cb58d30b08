#include <cmath>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"

#include "rnr/errors.hpp"
#include "rnr/sequencer.hpp"

using namespace rnr;

namespace {

DrumPattern one_hit_per_step(int length, int spb) {
    DrumPattern p;
    p.steps_per_beat = spb;
    p.steps.assign(static_cast<std::size_t>(length), {VoiceHit{Voice::Hat, 1.0}});
    return p;
}

std::size_t count_steps(double bpm, double duration_s, double dt_s, int spb) {
    double phase = 0.0;
    std::size_t n = 0;
    const auto whole = static_cast<std::int64_t>(std::floor(duration_s / dt_s));
    for (std::int64_t k = 0; k < whole; ++k) {
        auto adv = advance_phase(phase, bpm, dt_s, spb);
        phase = adv.phase;
        n += adv.crossed.size();
    }
    const double rest = duration_s - static_cast<double>(whole) * dt_s;
    if (rest > 0) n += advance_phase(phase, bpm, rest, spb).crossed.size();
    return n;
}

}  // namespace

TEST_CASE("advance_phase: 120 bpm for 0.5 s crosses the half and whole beat") {
    const auto adv = advance_phase(0.0, 120, 0.5, 2);
    CHECK(adv.phase == 1.0);
    REQUIRE(adv.crossed.size() == 2);
    CHECK(adv.crossed[0].index == 1);
    CHECK(adv.crossed[0].offset_s == doctest::Approx(0.25));
    CHECK(adv.crossed[1].index == 2);
    CHECK(adv.crossed[1].offset_s == doctest::Approx(0.5));
}

TEST_CASE("advance_phase: zero bpm leaves the phase alone") {
    const auto adv = advance_phase(0.3, 0, 0.5, 2);
    CHECK(adv.phase == 0.3);
    CHECK(adv.crossed.empty());
}

TEST_CASE("advance_phase: boundary exactly at the start is not crossed again") {
    const auto adv = advance_phase(0.5, 60, 0.25, 2);
    CHECK(adv.crossed.empty());
    CHECK(adv.phase == 0.75);
}

TEST_CASE("step count equals floor(T * B / 60 * spb) for random (B, T)") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> bpm(30.0, 300.0), secs(0.5, 120.0);
    for (int i = 0; i < 200; ++i) {
        const double b = bpm(gen), t = secs(gen);
        for (int spb : {1, 2, 4}) {
            const auto want = static_cast<std::size_t>(std::floor(t * b / 60.0 * spb));
            REQUIRE(count_steps(b, t, 0.01, spb) == want);
        }
    }
}

TEST_CASE("phase is exact under dt subdivision for representable steps") {
    for (double bpm : {60.0, 90.0, 120.0, 150.0, 7.5}) {
        for (double dt : {0.5, 0.25, 0.125, 0.0625}) {
            double once = 0.0, twice = 0.0;
            for (int k = 0; k < 64; ++k) {
                once = advance_phase(once, bpm, 2 * dt, 2).phase;
                twice = advance_phase(advance_phase(twice, bpm, dt, 2).phase, bpm, dt, 2).phase;
                REQUIRE(once == twice);
            }
        }
    }
}

TEST_CASE("phase under piecewise-constant bpm agrees within 1e-9 beats when subdivided") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> bpm(30.0, 300.0), dt(0.001, 0.05);
    std::uniform_int_distribution<int> parts(2, 7);
    double coarse = 0.0, fine = 0.0;
    for (int seg = 0; seg < 2000; ++seg) {
        const double b = bpm(gen), d = dt(gen);
        coarse = advance_phase(coarse, b, d, 2).phase;
        const int n = parts(gen);
        for (int k = 0; k < n; ++k) fine = advance_phase(fine, b, d / n, 2).phase;
    }
    CHECK(std::abs(coarse - fine) < 1e-9);
}

TEST_CASE("linear bpm ramp matches a fine-step integration oracle within 10 ms") {
    auto ramp = [](double t) { return 60.0 + 12.0 * t; };  // 60 -> 180 over 10 s
    Sequencer seq(one_hit_per_step(8, 2));
    std::vector<double> got;
    for (int k = 0; k < 1000; ++k) {
        const double start_s = k * 0.01;
        for (const auto& e : seq.tick(start_s * 1000.0, 0.01, ramp(start_s + 0.005), 1.0, RideState::Riding)) {
            got.push_back(e.t_ms);
        }
    }
    const auto want = oracle::crossing_times_ms(ramp, 10.0, 2);
    REQUIRE(got.size() + 1 >= want.size());
    REQUIRE(want.size() + 1 >= got.size());
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
        REQUIRE(std::abs(got[i] - want[i]) <= 10.0);
    }
}

TEST_CASE("emit_beats: gating and wrap-around") {
    const auto pattern = one_hit_per_step(8, 2);
    CHECK(emit_beats({}, pattern, 120, 1.0, RideState::Riding, 0).empty());

    std::vector<StepCrossing> crossed;
    for (int k = 1; k <= 16; ++k) crossed.push_back({k, 0.0});
    CHECK(emit_beats(crossed, pattern, 120, 1.0, RideState::Stopped, 0).empty());

    const auto events = emit_beats(crossed, pattern, 120, 1.0, RideState::Riding, 0);
    REQUIRE(events.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) CHECK(events[i].step_index == i % 8);
}

TEST_CASE("emit_beats: event volume is engine vol times voice gain") {
    DrumPattern p;
    p.steps_per_beat = 1;
    p.steps = {{{Voice::Kick, 1.0}, {Voice::Hat, 0.5}}};
    const std::vector<StepCrossing> crossed{{1, 0.002}};
    const auto e = emit_beats(crossed, p, 100, 0.8, RideState::Riding, 1000.0);
    REQUIRE(e.size() == 2);
    CHECK(e[0].voice == Voice::Kick);
    CHECK(e[0].vol == 0.8);
    CHECK(e[1].vol == doctest::Approx(0.4));
    CHECK(e[0].t_ms == doctest::Approx(1002.0));
    CHECK(e[0].bpm == 100);
}

TEST_CASE("Sequencer: frozen and silent while stopped") {
    Sequencer seq(default_pattern());
    seq.tick(0, 0.3, 120, 1.0, RideState::Riding);
    const double phase = seq.phase();
    for (int k = 0; k < 100; ++k) CHECK(seq.tick(300 + k * 10, 0.01, 120, 1.0, RideState::Stopped).empty());
    CHECK(seq.phase() == phase);
}

TEST_CASE("Sequencer: first boundary plays step 0") {
    Sequencer seq(default_pattern());
    const auto e = seq.tick(0, 0.26, 120, 1.0, RideState::Riding);  // boundary at 0.25 s
    REQUIRE(e.size() == 2);
    CHECK(e[0].step_index == 0);
    std::set<Voice> voices{e[0].voice, e[1].voice};
    CHECK(voices == std::set<Voice>{Voice::Kick, Voice::Hat});
}

TEST_CASE("default pattern") {
    const auto p = default_pattern();
    CHECK(p.steps_per_beat == 2);
    REQUIRE(p.length() == 8);
    auto has = [&](std::size_t step, Voice v) {
        for (const auto& h : p.steps[step]) {
            if (h.voice == v) return true;
        }
        return false;
    };
    for (std::size_t s = 0; s < 8; ++s) {
        CHECK(has(s, Voice::Hat));
        CHECK(has(s, Voice::Kick) == (s == 0 || s == 4));
        CHECK(has(s, Voice::Snare) == (s == 4));
    }
}

TEST_CASE("pattern_from_json: validation") {
    using nlohmann::json;
    CHECK_NOTHROW(pattern_from_json(json::parse(R"({"steps_per_beat":1,"steps":[[{"voice":"kick","gain":1}]]})")));
    CHECK_THROWS_AS(pattern_from_json(json::parse(R"({"steps_per_beat":0,"steps":[[{"voice":"kick"}]]})")),
                    UsageError);
    CHECK_THROWS_AS(pattern_from_json(json::parse(R"({"steps_per_beat":1,"steps":[]})")), UsageError);
    CHECK_THROWS_AS(pattern_from_json(json::parse(R"({"steps_per_beat":1,"steps":[[{"voice":"cowbell"}]]})")),
                    UsageError);
    CHECK_THROWS_AS(pattern_from_json(json::parse(R"({"steps_per_beat":1,"steps":[[{"voice":"hat","gain":2}]]})")),
                    UsageError);
    CHECK_THROWS_AS(pattern_from_json(json::parse(R"([1,2])")), UsageError);
}
