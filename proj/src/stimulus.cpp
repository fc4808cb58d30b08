#include "rnr/stimulus.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rnr/errors.hpp"
#include "rnr/kernels.hpp"
#include "rnr/rng.hpp"

namespace rnr {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHeadroom = 0.9;
constexpr std::uint64_t kNoiseSeed = 0x5EED'D2B3;

struct VoiceShape {
    double sine_hz;
    double sine_mix;  // remainder is white noise
    double tau_s;
};

constexpr std::array<VoiceShape, kVoiceCount> kShapes{{
    {55.0, 1.0, 0.045},   // kick
    {185.0, 0.5, 0.030},  // snare
    {0.0, 0.0, 0.012},    // hat
}};

/// Unit-gain one-shot for a voice, six time constants long.
std::vector<double> voice_template(Voice v, int sample_rate) {
    const VoiceShape& shape = kShapes[static_cast<std::size_t>(v)];
    const auto n = static_cast<std::size_t>(std::ceil(6.0 * shape.tau_s * sample_rate));
    Xoshiro256 rng(kNoiseSeed + static_cast<std::uint64_t>(v));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double noise = 2.0 * rng.uniform() - 1.0;
        const double tone = std::sin(kTwoPi * shape.sine_hz * t);
        out[i] = (shape.sine_mix * tone + (1.0 - shape.sine_mix) * noise) * std::exp(-t / shape.tau_s);
    }
    return out;
}

void require_range(bool ok, const std::string& what) {
    if (!ok) {
        throw UsageError("render_stimulus: " + what);
    }
}

}  // namespace

PcmBuffer render_stimulus(double bpm, double gain, double duration_s, const DrumPattern& pattern,
                          int sample_rate) {
    require_range(bpm >= 30.0 && bpm <= 300.0, "bpm must be in [30, 300]");
    require_range(gain > 0.0 && gain <= 1.0, "gain must be in (0, 1]");
    require_range(duration_s >= 1.0 && duration_s <= 60.0, "duration_s must be in [1, 60]");
    require_range(sample_rate >= 8000 && sample_rate <= 192000, "sample_rate must be in [8000, 192000]");
    pattern.validate();

    const auto spb = static_cast<double>(pattern.steps_per_beat);
    const auto steps = static_cast<std::int64_t>(std::floor(duration_s * bpm / 60.0 * spb));
    const auto total = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    const double samples_per_step = 60.0 * sample_rate / (bpm * spb);

    // Hit lists per voice, so a new hit can cut off the previous one.
    struct Hit {
        std::size_t pos;
        double gain;
    };
    std::array<std::vector<Hit>, kVoiceCount> hits;
    for (std::int64_t n = 0; n < steps; ++n) {
        const auto pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) * samples_per_step));
        const auto& step = pattern.steps[static_cast<std::size_t>(n) % pattern.length()];
        for (const auto& hit : step) {
            hits[static_cast<std::size_t>(hit.voice)].push_back({pos, hit.gain});
        }
    }

    std::vector<double> mix(total, 0.0);
    double voice_sum = 0.0;
    for (std::size_t v = 0; v < kVoiceCount; ++v) {
        voice_sum += pattern.max_gain(static_cast<Voice>(v));
        if (hits[v].empty()) {
            continue;
        }
        const auto shot = voice_template(static_cast<Voice>(v), sample_rate);
        for (std::size_t i = 0; i < hits[v].size(); ++i) {
            const std::size_t pos = hits[v][i].pos;
            if (pos >= total) {
                break;
            }
            std::size_t len = std::min(shot.size(), total - pos);
            if (i + 1 < hits[v].size()) {
                len = std::min(len, hits[v][i + 1].pos - pos);
            }
            kernels::mix_add(std::span(mix).subspan(pos, len), std::span(shot).first(len), hits[v][i].gain);
        }
    }

    PcmBuffer pcm;
    pcm.sample_rate = sample_rate;
    pcm.samples.resize(total);
    // One instance per voice and unit-peak templates: |mix| <= voice_sum.
    kernels::to_pcm16(mix, gain * kHeadroom / voice_sum * 32767.0, pcm.samples);
    return pcm;
}

std::string_view to_string(StimulusParameter p) { return p == StimulusParameter::Tempo ? "tempo" : "volume"; }

std::string_view to_string(Contrast c) { return c == Contrast::Easy ? "easy" : "hard"; }

std::optional<StimulusParameter> parse_stimulus_parameter(std::string_view s) {
    if (s == "tempo") return StimulusParameter::Tempo;
    if (s == "volume") return StimulusParameter::Volume;
    return std::nullopt;
}

std::optional<Contrast> parse_contrast(std::string_view s) {
    if (s == "easy") return Contrast::Easy;
    if (s == "hard") return Contrast::Hard;
    return std::nullopt;
}

double contrast_ratio(StimulusParameter p, Contrast c) {
    if (p == StimulusParameter::Tempo) {
        return c == Contrast::Easy ? 2.0 : 1.25;
    }
    const double db = c == Contrast::Easy ? 12.0 : 4.0;
    return std::pow(10.0, db / 20.0);
}

StimulusPair make_stimulus_pair(const StimulusRequest& request, const DrumPattern& pattern) {
    const double ratio = contrast_ratio(request.parameter, request.contrast);
    StimulusClip low{request.base_bpm, request.base_gain, {}};
    StimulusClip high = low;
    if (request.parameter == StimulusParameter::Tempo) {
        high.bpm = request.base_bpm * ratio;
    } else {
        low.gain = request.base_gain / ratio;
    }
    low.pcm = render_stimulus(low.bpm, low.gain, request.duration_s, pattern, request.sample_rate);
    high.pcm = render_stimulus(high.bpm, high.gain, request.duration_s, pattern, request.sample_rate);

    StimulusPair pair;
    pair.request = request;
    Xoshiro256 rng(request.seed);
    const bool high_first = (rng.next() >> 63) != 0;
    pair.answer = high_first ? 0 : 1;
    pair.clips[static_cast<std::size_t>(pair.answer)] = std::move(high);
    pair.clips[static_cast<std::size_t>(1 - pair.answer)] = std::move(low);
    return pair;
}

}  // namespace rnr
