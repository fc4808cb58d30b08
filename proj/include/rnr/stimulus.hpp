#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "rnr/sequencer.hpp"
#include "rnr/wav.hpp"

namespace rnr {

/// Synthesizes `pattern` at a fixed tempo and gain. The clip holds
/// floor(duration * bpm/60 * steps_per_beat) whole steps, each hit starting on
/// its step boundary (the first at t = 0). Voices are decaying sine/noise
/// bursts, one instance per voice at a time; the output never clips and its
/// amplitude is linear in `gain`.
///
/// Throws UsageError unless bpm in [30, 300], gain in (0, 1],
/// duration_s in [1, 60] and sample_rate in [8000, 192000].
PcmBuffer render_stimulus(double bpm, double gain, double duration_s, const DrumPattern& pattern,
                          int sample_rate);

enum class StimulusParameter { Tempo, Volume };
enum class Contrast { Easy, Hard };

std::string_view to_string(StimulusParameter p);
std::string_view to_string(Contrast c);
std::optional<StimulusParameter> parse_stimulus_parameter(std::string_view s);
std::optional<Contrast> parse_contrast(std::string_view s);

/// Tempo: 2:1 (easy) or 1.25:1 (hard). Volume: 12 dB or 4 dB as a linear ratio.
double contrast_ratio(StimulusParameter p, Contrast c);

struct StimulusRequest {
    StimulusParameter parameter = StimulusParameter::Tempo;
    Contrast contrast = Contrast::Easy;
    std::uint64_t seed = 0;
    double base_bpm = 80.0;   // the slow clip of a tempo pair; both clips of a volume pair
    double base_gain = 0.8;   // the loud clip of a volume pair; both clips of a tempo pair
    double duration_s = 5.0;
    int sample_rate = 44100;
};

struct StimulusClip {
    double bpm = 0.0;
    double gain = 0.0;
    PcmBuffer pcm;
};

struct StimulusPair {
    StimulusRequest request;
    std::array<StimulusClip, 2> clips;
    /// Index of the fast (tempo) or loud (volume) clip.
    int answer = 0;
};

/// Two clips that differ only in the requested parameter, in an order drawn
/// from the request seed.
StimulusPair make_stimulus_pair(const StimulusRequest& request, const DrumPattern& pattern);

}  // namespace rnr
