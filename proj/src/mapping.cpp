#include "rnr/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rnr/errors.hpp"

namespace rnr {
namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw UsageError(std::string("invalid mapping config: ") + what);
    }
}

double linear_clamped(double x, double x_lo, double x_hi, double y_lo, double y_hi) {
    const double u = std::clamp((x - x_lo) / (x_hi - x_lo), 0.0, 1.0);
    return std::clamp(y_lo + u * (y_hi - y_lo), y_lo, y_hi);
}

}  // namespace

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::VolumeOnly: return "volume_only";
        case Mode::TempoOnly: return "tempo_only";
        case Mode::Both: return "both";
    }
    return "volume_only";
}

std::optional<Mode> parse_mode(std::string_view s) {
    for (Mode m : {Mode::VolumeOnly, Mode::TempoOnly, Mode::Both}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    return std::nullopt;
}

void MappingConfig::validate() const {
    require(bpm_min > 0.0 && bpm_min < bpm_max, "need 0 < bpm_min < bpm_max");
    require(proxy_lo < proxy_hi, "need proxy_lo < proxy_hi");
    require(vol_min >= 0.0 && vol_min < vol_max && vol_max <= 1.0, "need 0 <= vol_min < vol_max <= 1");
    require(bpm_slew > 0.0 && vol_slew > 0.0, "slews must be > 0");
    require(default_bpm >= bpm_min && default_bpm <= bpm_max, "default_bpm outside [bpm_min, bpm_max]");
    require(default_vol >= vol_min && default_vol <= vol_max, "default_vol outside [vol_min, vol_max]");
}

EngineState initial_engine_state(const MappingConfig& config) {
    EngineState s;
    s.mode = Mode::VolumeOnly;
    s.bpm = config.default_bpm;
    s.vol = config.default_vol;
    return s;
}

double map_tempo(double speed_proxy, const MappingConfig& config, Mode mode) {
    if (mode == Mode::VolumeOnly) {
        return config.default_bpm;
    }
    return linear_clamped(speed_proxy, config.proxy_lo, config.proxy_hi, config.bpm_min, config.bpm_max);
}

double map_volume(double posture, const MappingConfig& config, Mode mode) {
    if (mode == Mode::TempoOnly) {
        return config.default_vol;
    }
    return linear_clamped(posture, 0.0, 1.0, config.vol_min, config.vol_max);
}

double slew_limit(double current, double target, double max_rate_per_s, double dt_s) {
    const double reach = max_rate_per_s * dt_s;
    if (std::abs(target - current) <= reach) {
        return target;
    }
    return target > current ? current + reach : current - reach;
}

Mode press_mode_button(Mode mode) {
    switch (mode) {
        case Mode::VolumeOnly: return Mode::TempoOnly;
        case Mode::TempoOnly: return Mode::Both;
        case Mode::Both: return Mode::VolumeOnly;
    }
    return Mode::VolumeOnly;
}

EngineState update_engine(const EngineState& state, const SensingOutput& sensed,
                          const MappingConfig& config, double dt_s) {
    if (!(dt_s > 0.0)) {
        throw UsageError("update_engine: dt_s must be > 0");
    }
    if (sensed.t_ms < state.t_ms) {
        throw UsageError("update_engine: timestamp " + std::to_string(sensed.t_ms) +
                         " is older than state time " + std::to_string(state.t_ms));
    }
    EngineState next = state;
    next.bpm = slew_limit(state.bpm, map_tempo(sensed.speed_proxy, config, state.mode),
                          config.bpm_slew, dt_s);
    next.vol = slew_limit(state.vol, map_volume(sensed.posture, config, state.mode),
                          config.vol_slew, dt_s);
    next.ride_state = sensed.ride_state;
    next.t_ms = sensed.t_ms;
    next.speed_proxy = sensed.speed_proxy;
    next.posture = sensed.posture;
    return next;
}

}  // namespace rnr
