#include "rnr/engine.hpp"

#include <nlohmann/json.hpp>

namespace rnr {

Engine::Engine(const Config& config)
    : config_(config),
      sensing_(config.sensing),
      sequencer_(config.drum_pattern()),
      state_(initial_engine_state(config.mapping)) {
    config_.mapping.validate();
}

TickOutput Engine::process(const SensorSample& sample) {
    for (int i = 0; i < sample.button_presses; ++i) {
        press_button();
    }
    TickOutput out;
    out.sensed = sensing_.push(sample);
    if (!started_) {
        started_ = true;
        state_.t_ms = out.sensed.t_ms;
        state_.ride_state = out.sensed.ride_state;
        state_.speed_proxy = out.sensed.speed_proxy;
        state_.posture = out.sensed.posture;
        out.state = state_;
        return out;
    }
    const std::int64_t prev_t = state_.t_ms;
    const double dt_s = static_cast<double>(out.sensed.t_ms - prev_t) / 1000.0;
    state_ = update_engine(state_, out.sensed, config_.mapping, dt_s);
    out.events = sequencer_.tick(static_cast<double>(prev_t), dt_s, state_.bpm, state_.vol, state_.ride_state);
    state_.beat_phase = sequencer_.phase();
    out.state = state_;
    return out;
}

void Engine::press_button() { state_.mode = press_mode_button(state_.mode); }

void Engine::set_mode(Mode mode) { state_.mode = mode; }

ReplayResult replay(const Trace& trace, const Config& config) {
    Engine engine(config);
    ReplayResult result;
    for (const auto& record : trace.records) {
        const auto* sample = std::get_if<SensorSample>(&record);
        if (sample == nullptr) {
            continue;
        }
        auto tick = engine.process(*sample);
        result.states.push_back(tick.state);
        result.events.insert(result.events.end(), tick.events.begin(), tick.events.end());
    }
    return result;
}

std::string state_log_line(const EngineState& s) {
    nlohmann::ordered_json j;
    j["t_ms"] = s.t_ms;
    j["mode"] = to_string(s.mode);
    j["bpm"] = s.bpm;
    j["vol"] = s.vol;
    j["speed_proxy"] = s.speed_proxy;
    j["posture"] = s.posture;
    j["ride_state"] = to_string(s.ride_state);
    return j.dump();
}

std::string event_log_line(const BeatEvent& e) {
    nlohmann::ordered_json j;
    j["t_ms"] = e.t_ms;
    j["step"] = e.step_index;
    j["voice"] = to_string(e.voice);
    j["bpm"] = e.bpm;
    j["vol"] = e.vol;
    return j.dump();
}

std::string state_log(const ReplayResult& result) {
    std::string out;
    for (const auto& s : result.states) {
        out += state_log_line(s);
        out += '\n';
    }
    return out;
}

std::string event_log(const ReplayResult& result) {
    std::string out;
    for (const auto& e : result.events) {
        out += event_log_line(e);
        out += '\n';
    }
    return out;
}

}  // namespace rnr
