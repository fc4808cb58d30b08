#include "rnr/sequencer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "embedded.hpp"
#include "rnr/errors.hpp"

namespace rnr {

std::string_view to_string(Voice v) {
    switch (v) {
        case Voice::Kick: return "kick";
        case Voice::Snare: return "snare";
        case Voice::Hat: return "hat";
    }
    return "kick";
}

std::optional<Voice> parse_voice(std::string_view s) {
    for (Voice v : {Voice::Kick, Voice::Snare, Voice::Hat}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    return std::nullopt;
}

double DrumPattern::max_gain(Voice v) const {
    double best = 0.0;
    for (const auto& step : steps) {
        for (const auto& hit : step) {
            if (hit.voice == v) {
                best = std::max(best, hit.gain);
            }
        }
    }
    return best;
}

void DrumPattern::validate() const {
    if (steps_per_beat < 1) {
        throw UsageError("pattern: steps_per_beat must be >= 1");
    }
    if (steps.empty()) {
        throw UsageError("pattern: needs at least one step");
    }
    bool any = false;
    for (const auto& step : steps) {
        for (const auto& hit : step) {
            if (!(hit.gain > 0.0 && hit.gain <= 1.0)) {
                throw UsageError("pattern: voice gain must be in (0,1]");
            }
            any = true;
        }
    }
    if (!any) {
        throw UsageError("pattern: every step is empty");
    }
}

DrumPattern pattern_from_json(const nlohmann::json& j) {
    DrumPattern p;
    try {
        p.steps_per_beat = j.at("steps_per_beat").get<int>();
        for (const auto& step : j.at("steps")) {
            std::vector<VoiceHit> hits;
            for (const auto& h : step) {
                const auto name = h.at("voice").get<std::string>();
                const auto voice = parse_voice(name);
                if (!voice) {
                    throw UsageError("pattern: unknown voice '" + name + "'");
                }
                hits.push_back({*voice, h.value("gain", 1.0)});
            }
            p.steps.push_back(std::move(hits));
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("pattern: ") + e.what());
    }
    p.validate();
    return p;
}

DrumPattern load_pattern(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read pattern " + path.string());
    }
    try {
        return pattern_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("pattern " + path.string() + ": " + e.what());
    }
}

DrumPattern default_pattern() {
    static const DrumPattern pattern = pattern_from_json(nlohmann::json::parse(embedded::kDefaultPattern));
    return pattern;
}

PhaseAdvance advance_phase(double phase, double bpm, double dt_s, int steps_per_beat) {
    PhaseAdvance out;
    const double beats_per_s = bpm / 60.0;
    out.phase = phase + beats_per_s * dt_s;
    if (!(out.phase > phase)) {
        out.phase = phase;
        return out;
    }
    const auto spb = static_cast<double>(steps_per_beat);
    const auto first = static_cast<std::int64_t>(std::floor(phase * spb)) + 1;
    const auto last = static_cast<std::int64_t>(std::floor(out.phase * spb));
    for (std::int64_t k = first; k <= last; ++k) {
        const double at = static_cast<double>(k) / spb;
        out.crossed.push_back({k, std::clamp((at - phase) / beats_per_s, 0.0, dt_s)});
    }
    return out;
}

std::vector<BeatEvent> emit_beats(std::span<const StepCrossing> crossed, const DrumPattern& pattern,
                                  double bpm, double engine_vol, RideState ride_state,
                                  double interval_start_ms) {
    std::vector<BeatEvent> events;
    if (ride_state == RideState::Stopped) {
        return events;
    }
    const auto len = static_cast<std::int64_t>(pattern.length());
    for (const auto& c : crossed) {
        const auto step = static_cast<std::size_t>(((c.index - 1) % len + len) % len);
        for (const auto& hit : pattern.steps[step]) {
            events.push_back({interval_start_ms + c.offset_s * 1000.0, step, hit.voice, bpm,
                              std::clamp(engine_vol * hit.gain, 0.0, 1.0)});
        }
    }
    return events;
}

Sequencer::Sequencer(DrumPattern pattern) : pattern_(std::move(pattern)) { pattern_.validate(); }

std::vector<BeatEvent> Sequencer::tick(double interval_start_ms, double dt_s, double bpm, double vol,
                                       RideState ride_state) {
    if (ride_state == RideState::Stopped) {
        return {};
    }
    auto adv = advance_phase(phase_, bpm, dt_s, pattern_.steps_per_beat);
    phase_ = adv.phase;
    return emit_beats(adv.crossed, pattern_, bpm, vol, ride_state, interval_start_ms);
}

}  // namespace rnr
