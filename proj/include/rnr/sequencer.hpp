#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rnr/sensing.hpp"

namespace rnr {

enum class Voice { Kick, Snare, Hat };

inline constexpr std::size_t kVoiceCount = 3;

std::string_view to_string(Voice v);
std::optional<Voice> parse_voice(std::string_view s);

struct VoiceHit {
    Voice voice = Voice::Kick;
    double gain = 1.0;  // (0, 1]
};

struct DrumPattern {
    int steps_per_beat = 1;
    std::vector<std::vector<VoiceHit>> steps;

    std::size_t length() const { return steps.size(); }
    /// Largest per-voice gain anywhere in the pattern (0 if the voice is unused).
    double max_gain(Voice v) const;
    void validate() const;
};

/// Built-in pattern (shipped as patterns/default.json).
DrumPattern default_pattern();
DrumPattern pattern_from_json(const nlohmann::json& j);
DrumPattern load_pattern(const std::filesystem::path& path);

/// A step boundary crossed while advancing the phase. Boundary `index` k sits
/// at beat position k / steps_per_beat; `offset_s` is how far into the
/// advance interval it was reached.
struct StepCrossing {
    std::int64_t index = 0;
    double offset_s = 0.0;
};

struct PhaseAdvance {
    double phase = 0.0;
    std::vector<StepCrossing> crossed;
};

/// phase + bpm/60 * dt, reporting every boundary in (phase, new_phase].
PhaseAdvance advance_phase(double phase, double bpm, double dt_s, int steps_per_beat);

struct BeatEvent {
    double t_ms = 0.0;
    std::size_t step_index = 0;
    Voice voice = Voice::Kick;
    double bpm = 0.0;
    double vol = 0.0;  // engine gain times the voice multiplier

    friend bool operator==(const BeatEvent&, const BeatEvent&) = default;
};

/// One event per (step, voice). Boundary k plays pattern step (k-1) mod
/// length, so the first boundary after phase 0 plays step 0. Nothing is
/// emitted while Stopped.
std::vector<BeatEvent> emit_beats(std::span<const StepCrossing> crossed, const DrumPattern& pattern,
                                  double bpm, double engine_vol, RideState ride_state,
                                  double interval_start_ms);

/// Phase accumulator plus emission. The phase is frozen while Stopped.
class Sequencer {
public:
    explicit Sequencer(DrumPattern pattern);

    std::vector<BeatEvent> tick(double interval_start_ms, double dt_s, double bpm, double vol,
                                RideState ride_state);

    double phase() const { return phase_; }
    const DrumPattern& pattern() const { return pattern_; }

private:
    DrumPattern pattern_;
    double phase_ = 0.0;
};

}  // namespace rnr
