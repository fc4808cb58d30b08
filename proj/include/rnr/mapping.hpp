#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "rnr/sensing.hpp"

namespace rnr {

/// Interaction modes in the order the mode button cycles through them.
enum class Mode { VolumeOnly, TempoOnly, Both };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct MappingConfig {
    double bpm_min = 0.0;
    double bpm_max = 0.0;
    double proxy_lo = 0.0;
    double proxy_hi = 0.0;
    double vol_min = 0.0;
    double vol_max = 0.0;
    double default_bpm = 0.0;
    double default_vol = 0.0;
    double bpm_slew = 0.0;  // bpm per second
    double vol_slew = 0.0;  // gain per second

    void validate() const;
};

struct EngineState {
    Mode mode = Mode::VolumeOnly;
    double bpm = 0.0;
    double vol = 0.0;
    RideState ride_state = RideState::Stopped;
    double beat_phase = 0.0;
    std::int64_t t_ms = 0;
    double speed_proxy = 0.0;
    double posture = 1.0;

    friend bool operator==(const EngineState&, const EngineState&) = default;
};

/// Mode VolumeOnly, tempo and volume at their defaults, Stopped.
EngineState initial_engine_state(const MappingConfig& config);

double map_tempo(double speed_proxy, const MappingConfig& config, Mode mode);
double map_volume(double posture, const MappingConfig& config, Mode mode);

/// Moves `current` toward `target` by at most rate*dt; lands exactly on the
/// target once it is within reach.
double slew_limit(double current, double target, double max_rate_per_s, double dt_s);

Mode press_mode_button(Mode mode);

/// One engine step. Ride state is carried through; silencing a stopped ride
/// is the sequencer's job. Throws UsageError on dt_s <= 0 or a timestamp
/// older than the state's.
EngineState update_engine(const EngineState& state, const SensingOutput& sensed,
                          const MappingConfig& config, double dt_s);

}  // namespace rnr
