#pragma once

#include <cstddef>
#include <vector>

#include "rnr/wav.hpp"

namespace rnr {

/// Sample positions of percussive onsets: short frames whose peak jumps well
/// above the preceding frames and past a fraction of the clip peak.
std::vector<std::size_t> detect_onsets(const PcmBuffer& pcm);

struct ClipMeasurement {
    std::size_t onset_count = 0;
    double onset_bpm = 0.0;  // 0 with fewer than two onsets
    double rms = 0.0;        // full scale = 1
    double peak = 0.0;       // full scale = 1
};

ClipMeasurement measure_clip(const PcmBuffer& pcm, int steps_per_beat);

}  // namespace rnr
