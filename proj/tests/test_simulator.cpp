#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"

#include "rnr/commands.hpp"
#include "rnr/config.hpp"
#include "rnr/errors.hpp"
#include "rnr/simulator.hpp"

using namespace rnr;

namespace {

BikeParams bike() { return default_config().bike; }

NoiseConfig quiet() { return {0.0, 0.0, 0.0, 1}; }

}  // namespace

TEST_CASE("step_bike: at rest stays at rest") {
    BikeState s;
    for (int k = 0; k < 1000; ++k) s = step_bike(s, {0.0, 0.0, 0}, 0.01, bike());
    CHECK(s.v == 0.0);
    CHECK(s.cadence_hz == 0.0);
}

TEST_CASE("step_bike: constant effort reaches k_e * e / c_d") {
    BikeState s;
    for (int k = 0; k < 3000; ++k) s = step_bike(s, {0.6, 0.0, 0}, 0.01, bike());
    CHECK(s.v == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("step_bike: coast-down follows v0 * exp(-c_d t)") {
    const auto p = bike();
    BikeState s;
    s.v = 4.0;
    for (int k = 1; k <= 10000; ++k) {
        s = step_bike(s, {0.0, 0.0, 0}, 0.001, p);
        const double want = 4.0 * std::exp(-p.c_drag * k * 0.001);
        REQUIRE(s.v == doctest::Approx(want).epsilon(0.005));
    }
}

TEST_CASE("step_bike: dt bounds") {
    CHECK_THROWS_AS(step_bike({}, {}, 0.0, bike()), UsageError);
    CHECK_THROWS_AS(step_bike({}, {}, 0.2, bike()), UsageError);
}

TEST_CASE("step_bike: speed stays in [0, k_e / c_d] for random effort") {
    const auto p = bike();
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BikeState s;
    for (int k = 0; k < 20000; ++k) {
        s = step_bike(s, {u(gen), u(gen), 0}, 0.01, p);
        REQUIRE(s.v >= 0.0);
        REQUIRE(s.v <= p.k_effort / p.c_drag + 1e-9);
        REQUIRE((s.lean_actual >= 0.0 && s.lean_actual <= 1.0));
    }
}

TEST_CASE("synth_sensors: rest and geometry endpoints without noise") {
    const auto p = bike();
    Xoshiro256 rng(1);
    BikeState s;
    auto out = synth_sensors(s, p, quiet(), rng);
    CHECK(out.accel == Accel{0.0, 0.0, 9.81});
    CHECK(out.ultra_mm == 600);
    s.lean_actual = 1.0;
    out = synth_sensors(s, p, quiet(), rng);
    CHECK(out.ultra_mm == 300);
}

TEST_CASE("synth_sensors: forward axis oscillates at the cadence") {
    const auto p = bike();
    // effort giving a 2 Hz cadence at steady state
    const double v = 2.0 * p.wheel_circumference_m * p.gear_ratio;
    const double effort = v * p.c_drag / p.k_effort;
    BikeState s;
    s.v = v;
    NoiseConfig noise = default_config().noise;
    noise.rng_seed = 4;
    Xoshiro256 rng(noise.rng_seed);
    std::vector<double> ax;
    for (int k = 0; k < 6000; ++k) {
        s = step_bike(s, {effort, 0.0, 0}, 0.01, p);
        ax.push_back(synth_sensors(s, p, noise, rng).accel.x);
    }
    double bin = 0.0;
    const double peak = oracle::dft_peak_hz(ax, 100.0, &bin);
    CHECK(std::abs(peak - 2.0) <= bin);
}

TEST_CASE("scenario: empty script gives at-rest samples on the 100 Hz grid") {
    ScenarioRunner run({}, {100.0, 5.0}, bike(), quiet());
    CHECK(run.total_samples() == 500);
    std::size_t k = 0;
    while (!run.done()) {
        const auto f = run.next();
        REQUIRE(f.sample.t_ms == static_cast<std::int64_t>(k * 10));
        REQUIRE(f.sample.accel == Accel{0.0, 0.0, 9.81});
        REQUIRE(f.sample.ultra_mm == 600);
        ++k;
    }
    CHECK(k == 500);
}

TEST_CASE("scenario: same seed gives identical traces, different seeds differ") {
    const Config c = default_config();
    const auto script = parse_script(nlohmann::json::parse(
        R"([{"t_ms":0,"effort":0.5,"lean":0.2},{"t_ms":3000,"effort":0.9,"button":1},{"t_ms":6000,"lean":0.8}])"));
    const auto a = trace_to_string(simulate_trace(script, c, 42));
    const auto b = trace_to_string(simulate_trace(script, c, 42));
    const auto d = trace_to_string(simulate_trace(script, c, 43));
    CHECK(a == b);
    CHECK(a != d);
}

TEST_CASE("scenario: button and marker entries land on the next sample") {
    const auto script = parse_script(nlohmann::json::parse(
        R"([{"t_ms":15,"button":2,"marker":"upright"},{"t_ms":40,"button":1}])"));
    ScenarioRunner run(script, {100.0, 1.0}, bike(), quiet());
    std::vector<ScenarioFrame> frames;
    while (!run.done()) frames.push_back(run.next());
    CHECK(frames[1].sample.button_presses == 0);
    CHECK(frames[2].sample.button_presses == 2);
    CHECK(frames[2].marker == "upright");
    CHECK(frames[4].sample.button_presses == 1);
    CHECK_FALSE(frames[4].marker.has_value());
}

TEST_CASE("scenario: rejected scripts") {
    using nlohmann::json;
    CHECK_THROWS_AS(parse_script(json::parse(R"({"t_ms":0})")), UsageError);
    CHECK_THROWS_AS(parse_script(json::parse(R"([{"t_ms":100},{"t_ms":100}])")), UsageError);
    CHECK_THROWS_AS(parse_script(json::parse(R"([{"t_ms":100},{"t_ms":50}])")), UsageError);
    CHECK_THROWS_AS(parse_script(json::parse(R"([{"t_ms":0,"effort":1.5}])")), UsageError);
    CHECK_THROWS_AS(parse_script(json::parse(R"([{"effort":0.5}])")), UsageError);
    CHECK(default_duration_s(parse_script(json::parse(R"([{"t_ms":2500}])"))) == 12.5);
}

TEST_CASE("noise: dropouts occur at roughly the configured rate") {
    NoiseConfig noise = default_config().noise;
    noise.rng_seed = 17;
    ScenarioRunner run({}, {100.0, 100.0}, bike(), noise);
    int drops = 0;
    while (!run.done()) drops += run.next().sample.ultra_mm.has_value() ? 0 : 1;
    CHECK(drops > 100);
    CHECK(drops < 320);
}

TEST_CASE("rng: xoshiro256** reference values") {
    // seed 0 expands through splitmix64 to e220a8397b1dcdaf 6e789e6aa1b965f4 ...
    Xoshiro256 a(0);
    CHECK(a.next() == 0x99ec5f36cb75f2b4ULL);
    CHECK(a.next() == 0xbf6e1f784956452aULL);
    CHECK(a.next() == 0x1a5f849d4933e6e0ULL);
    CHECK(a.next() == 0x6aa594f1262d2d2cULL);
    Xoshiro256 u(1);
    for (int i = 0; i < 10000; ++i) {
        const double x = u.uniform();
        REQUIRE((x >= 0.0 && x < 1.0));
    }
}
