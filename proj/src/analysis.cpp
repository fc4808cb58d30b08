#include "rnr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rnr/kernels.hpp"

namespace rnr {
namespace {

constexpr double kFrameS = 0.002;
constexpr double kRefractoryS = 0.030;
constexpr double kPeakFraction = 0.2;
constexpr double kRiseFactor = 2.0;
constexpr std::size_t kLookback = 3;

}  // namespace

std::vector<std::size_t> detect_onsets(const PcmBuffer& pcm) {
    const auto frame = std::max<std::size_t>(1, static_cast<std::size_t>(pcm.sample_rate * kFrameS));
    const std::span<const std::int16_t> all(pcm.samples);
    std::vector<double> peaks;
    for (std::size_t at = 0; at < all.size(); at += frame) {
        peaks.push_back(kernels::peak_abs(all.subspan(at, std::min(frame, all.size() - at))));
    }
    const double global = kernels::peak_abs(all);
    const auto refractory = static_cast<std::size_t>(std::ceil(kRefractoryS / kFrameS));

    std::vector<std::size_t> onsets;
    std::optional<std::size_t> last;
    for (std::size_t f = 0; f < peaks.size(); ++f) {
        double prior = 0.0;
        for (std::size_t k = 1; k <= kLookback && k <= f; ++k) {
            prior = std::max(prior, peaks[f - k]);
        }
        const bool loud = peaks[f] >= kPeakFraction * global && global > 0.0;
        const bool rising = peaks[f] > kRiseFactor * prior;
        if (loud && rising && (!last || f - *last >= refractory)) {
            onsets.push_back(f * frame);
            last = f;
        }
    }
    return onsets;
}

ClipMeasurement measure_clip(const PcmBuffer& pcm, int steps_per_beat) {
    ClipMeasurement m;
    const auto onsets = detect_onsets(pcm);
    m.onset_count = onsets.size();
    if (onsets.size() >= 2) {
        const double span_s = static_cast<double>(onsets.back() - onsets.front()) / pcm.sample_rate;
        const double ioi = span_s / static_cast<double>(onsets.size() - 1);
        m.onset_bpm = 60.0 / (ioi * steps_per_beat);
    }
    if (!pcm.samples.empty()) {
        const double mean_sq = static_cast<double>(kernels::sum_squares(pcm.samples)) /
                               static_cast<double>(pcm.samples.size());
        m.rms = std::sqrt(mean_sq) / 32768.0;
        m.peak = kernels::peak_abs(pcm.samples) / 32768.0;
    }
    return m;
}

}  // namespace rnr
