#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rnr {

/// 16-bit mono PCM.
struct PcmBuffer {
    int sample_rate = 44100;
    std::vector<std::int16_t> samples;

    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Canonical 44-byte RIFF/WAVE header followed by little-endian PCM16 data.
std::string encode_wav(const PcmBuffer& pcm);
/// Accepts PCM16 mono RIFF files; skips chunks other than fmt/data.
/// Throws UsageError on anything else.
PcmBuffer decode_wav(const std::string& bytes);

void write_wav(const std::filesystem::path& path, const PcmBuffer& pcm);
PcmBuffer read_wav(const std::filesystem::path& path);

}  // namespace rnr
