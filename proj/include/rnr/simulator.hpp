#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rnr/rng.hpp"
#include "rnr/sensing.hpp"

namespace rnr {

struct RiderCommand {
    double effort = 0.0;  // [0,1]
    double lean = 0.0;    // [0,1], 0 = upright, 1 = fully forward
    int button = 0;       // mode-button edges to deliver with this step
};

struct BikeParams {
    double k_effort = 0.0;  // m/s^2 per unit effort
    double c_drag = 0.0;    // 1/s, linear drag
    double wheel_circumference_m = 0.0;
    double gear_ratio = 0.0;  // wheel revolutions per crank revolution
    double tau_lean_s = 0.0;
    double pedal_accel_amp = 0.0;  // m/s^2 at full effort
    double gravity = 0.0;
    double mount_upright_mm = 0.0;  // sensor-to-rider distance sitting upright
    double mount_forward_mm = 0.0;  // ... fully leaned forward

    void validate() const;
};

struct NoiseConfig {
    double accel_sigma = 0.0;  // m/s^2, per axis
    double ultra_sigma = 0.0;  // mm
    double dropout_prob = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct BikeState {
    double v = 0.0;
    double cadence_hz = 0.0;
    double lean_actual = 0.0;
    double effort = 0.0;       // effort applied over the last step
    double pedal_phase = 0.0;  // radians, wrapped to [0, 2pi)
    std::int64_t t_ms = 0;
};

/// Explicit Euler step of dv/dt = k_e*effort - c_d*v with v >= 0 and a
/// first-order lean follower. Throws UsageError unless dt_s in (0, 0.1].
/// The returned state keeps the caller's t_ms; the scenario clock owns time.
BikeState step_bike(const BikeState& state, const RiderCommand& cmd, double dt_s,
                    const BikeParams& params);

/// Gravity on +z, pedaling oscillation on +x (forward), Gaussian noise, and
/// the frame-to-rider distance with random dropouts. Always draws five
/// variates from `rng` so the stream position depends only on the sample index.
SensorSample synth_sensors(const BikeState& state, const BikeParams& params,
                           const NoiseConfig& noise, Xoshiro256& rng);

struct ScriptEntry {
    std::int64_t t_ms = 0;
    std::optional<double> effort;  // unset: keep the previous value
    std::optional<double> lean;
    int button = 0;
    std::optional<std::string> marker;
};

/// Entries need strictly increasing t_ms >= 0; equal (overlapping) or
/// decreasing times, and out-of-range effort/lean, throw UsageError.
std::vector<ScriptEntry> parse_script(const nlohmann::json& j);
std::vector<ScriptEntry> load_script(const std::filesystem::path& path);

/// Default run length for a script: last command time plus 10 s.
double default_duration_s(std::span<const ScriptEntry> script);

struct ScenarioOptions {
    double rate_hz = 100.0;
    double duration_s = 10.0;
};

/// One scenario step: the sample plus any marker label that fired at it.
struct ScenarioFrame {
    SensorSample sample;
    std::optional<std::string> marker;
    BikeState bike;
};

/// Drives bike + sensors at a fixed rate from a script. Sample k sits at
/// t = round(k * 1000 / rate_hz) ms; script entries with t_ms <= t apply
/// before the bike steps into sample k.
class ScenarioRunner {
public:
    ScenarioRunner(std::vector<ScriptEntry> script, ScenarioOptions options, BikeParams params,
                   NoiseConfig noise);

    bool done() const { return index_ >= total_; }
    std::size_t total_samples() const { return total_; }
    ScenarioFrame next();

private:
    std::vector<ScriptEntry> script_;
    ScenarioOptions options_;
    BikeParams params_;
    NoiseConfig noise_;
    Xoshiro256 rng_;
    BikeState bike_;
    RiderCommand command_;
    std::size_t cursor_ = 0;
    std::size_t index_ = 0;
    std::size_t total_ = 0;
};

/// Live variant: the caller supplies the command each step.
class LiveBike {
public:
    LiveBike(double rate_hz, BikeParams params, NoiseConfig noise);

    ScenarioFrame step(const RiderCommand& cmd);
    const BikeState& bike() const { return bike_; }

private:
    double rate_hz_;
    BikeParams params_;
    NoiseConfig noise_;
    Xoshiro256 rng_;
    BikeState bike_;
    std::size_t index_ = 0;
};

std::int64_t sample_time_ms(std::size_t index, double rate_hz);

}  // namespace rnr
