#include "rnr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "rnr/errors.hpp"

namespace rnr {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw UsageError(what);
    }
}

}  // namespace

void BikeParams::validate() const {
    require(k_effort > 0.0 && c_drag > 0.0, "bike: k_effort and c_drag must be > 0");
    require(wheel_circumference_m > 0.0 && gear_ratio > 0.0,
            "bike: wheel_circumference_m and gear_ratio must be > 0");
    require(tau_lean_s > 0.0, "bike: tau_lean_s must be > 0");
    require(pedal_accel_amp >= 0.0 && gravity >= 0.0, "bike: pedal_accel_amp and gravity must be >= 0");
    require(mount_forward_mm >= 0.0 && mount_forward_mm < mount_upright_mm &&
                mount_upright_mm <= kUltraMaxMm,
            "bike: need 0 <= mount_forward_mm < mount_upright_mm <= 5000");
}

void NoiseConfig::validate() const {
    require(accel_sigma >= 0.0 && ultra_sigma >= 0.0, "noise: sigmas must be >= 0");
    require(dropout_prob >= 0.0 && dropout_prob < 1.0, "noise: dropout_prob must be in [0,1)");
}

BikeState step_bike(const BikeState& state, const RiderCommand& cmd, double dt_s, const BikeParams& params) {
    if (!(dt_s > 0.0 && dt_s <= 0.1)) {
        throw UsageError("step_bike: dt_s must be in (0, 0.1]");
    }
    BikeState next = state;
    next.effort = cmd.effort;
    next.v = std::max(0.0, state.v + dt_s * (params.k_effort * cmd.effort - params.c_drag * state.v));
    next.cadence_hz = next.v / (params.wheel_circumference_m * params.gear_ratio);
    const double follow = std::min(1.0, dt_s / params.tau_lean_s);
    next.lean_actual = std::clamp(state.lean_actual + follow * (cmd.lean - state.lean_actual), 0.0, 1.0);
    next.pedal_phase = std::fmod(state.pedal_phase + kTwoPi * next.cadence_hz * dt_s, kTwoPi);
    return next;
}

SensorSample synth_sensors(const BikeState& state, const BikeParams& params, const NoiseConfig& noise,
                           Xoshiro256& rng) {
    const double nx = rng.gaussian();
    const double ny = rng.gaussian();
    const double nz = rng.gaussian();
    const double nu = rng.gaussian();
    const double drop = rng.uniform();

    SensorSample s;
    s.t_ms = state.t_ms;
    s.accel.x = params.pedal_accel_amp * state.effort * std::sin(state.pedal_phase) + noise.accel_sigma * nx;
    s.accel.y = noise.accel_sigma * ny;
    s.accel.z = params.gravity + noise.accel_sigma * nz;
    const double d = params.mount_upright_mm -
                     state.lean_actual * (params.mount_upright_mm - params.mount_forward_mm) +
                     noise.ultra_sigma * nu;
    if (drop >= noise.dropout_prob) {
        s.ultra_mm = static_cast<int>(std::clamp<long>(std::lround(d), 0, kUltraMaxMm));
    }
    return s;
}

std::vector<ScriptEntry> parse_script(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw UsageError("scenario script must be a JSON array");
    }
    std::vector<ScriptEntry> script;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        const std::string where = "scenario entry " + std::to_string(i) + ": ";
        if (!e.is_object() || !e.contains("t_ms") || !e["t_ms"].is_number_integer()) {
            throw UsageError(where + "needs an integer t_ms");
        }
        ScriptEntry entry;
        entry.t_ms = e["t_ms"].get<std::int64_t>();
        require(entry.t_ms >= 0, where + "t_ms must be >= 0");
        for (const char* key : {"effort", "lean"}) {
            if (e.contains(key)) {
                require(e[key].is_number(), where + key + " must be a number");
                const double v = e[key].get<double>();
                require(v >= 0.0 && v <= 1.0, where + key + " must be in [0,1]");
                (std::string_view(key) == "effort" ? entry.effort : entry.lean) = v;
            }
        }
        if (e.contains("button")) {
            const auto& b = e["button"];
            if (b.is_boolean()) {
                entry.button = b.get<bool>() ? 1 : 0;
            } else if (b.is_number_integer() && b.get<int>() >= 0) {
                entry.button = b.get<int>();
            } else {
                throw UsageError(where + "button must be a boolean or a count");
            }
        }
        if (e.contains("marker")) {
            require(e["marker"].is_string(), where + "marker must be a string");
            entry.marker = e["marker"].get<std::string>();
        }
        if (!script.empty() && entry.t_ms <= script.back().t_ms) {
            throw UsageError(where + "t_ms " + std::to_string(entry.t_ms) +
                             (entry.t_ms == script.back().t_ms ? " overlaps" : " precedes") +
                             " the previous entry");
        }
        script.push_back(std::move(entry));
    }
    return script;
}

std::vector<ScriptEntry> load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read scenario " + path.string());
    }
    try {
        return parse_script(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("scenario " + path.string() + ": " + e.what());
    }
}

double default_duration_s(std::span<const ScriptEntry> script) {
    const double last = script.empty() ? 0.0 : static_cast<double>(script.back().t_ms) / 1000.0;
    return last + 10.0;
}

std::int64_t sample_time_ms(std::size_t index, double rate_hz) {
    return std::llround(static_cast<double>(index) * 1000.0 / rate_hz);
}

ScenarioRunner::ScenarioRunner(std::vector<ScriptEntry> script, ScenarioOptions options, BikeParams params,
                               NoiseConfig noise)
    : script_(std::move(script)),
      options_(options),
      params_(params),
      noise_(noise),
      rng_(noise.rng_seed) {
    require(options_.rate_hz >= 10.0 && options_.rate_hz <= 1000.0, "scenario: rate_hz must be in [10, 1000]");
    require(options_.duration_s > 0.0, "scenario: duration_s must be > 0");
    params_.validate();
    noise_.validate();
    total_ = static_cast<std::size_t>(std::llround(options_.duration_s * options_.rate_hz));
}

ScenarioFrame ScenarioRunner::next() {
    const std::int64_t t = sample_time_ms(index_, options_.rate_hz);
    ScenarioFrame frame;
    while (cursor_ < script_.size() && script_[cursor_].t_ms <= t) {
        const auto& e = script_[cursor_++];
        if (e.effort) command_.effort = *e.effort;
        if (e.lean) command_.lean = *e.lean;
        command_.button += e.button;
        if (e.marker) frame.marker = e.marker;
    }
    if (index_ == 0) {
        bike_.effort = command_.effort;
    } else {
        const double dt = static_cast<double>(t - sample_time_ms(index_ - 1, options_.rate_hz)) / 1000.0;
        bike_ = step_bike(bike_, command_, dt, params_);
    }
    bike_.t_ms = t;
    frame.sample = synth_sensors(bike_, params_, noise_, rng_);
    frame.sample.button_presses = command_.button;
    frame.bike = bike_;
    command_.button = 0;
    ++index_;
    return frame;
}

LiveBike::LiveBike(double rate_hz, BikeParams params, NoiseConfig noise)
    : rate_hz_(rate_hz), params_(params), noise_(noise), rng_(noise.rng_seed) {
    params_.validate();
    noise_.validate();
}

ScenarioFrame LiveBike::step(const RiderCommand& cmd) {
    const std::int64_t t = sample_time_ms(index_, rate_hz_);
    if (index_ == 0) {
        bike_.effort = cmd.effort;
    } else {
        const double dt = static_cast<double>(t - sample_time_ms(index_ - 1, rate_hz_)) / 1000.0;
        bike_ = step_bike(bike_, cmd, dt, params_);
    }
    bike_.t_ms = t;
    ScenarioFrame frame;
    frame.sample = synth_sensors(bike_, params_, noise_, rng_);
    frame.sample.button_presses = cmd.button;
    frame.bike = bike_;
    ++index_;
    return frame;
}

}  // namespace rnr
