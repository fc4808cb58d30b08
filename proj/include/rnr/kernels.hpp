#pragma once

// Data-parallel PCM kernels. Every kernel has a scalar reference in
// rnr::kernels::scalar and, on x86-64, an AVX2 variant in rnr::kernels::avx2.
// The top-level functions dispatch to the variant selected at startup.
// Variants are bit-identical: tests/test_kernels.cpp holds them to that.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace rnr::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Best variant this CPU can run.
Isa detected_isa();
/// Variant the dispatching entry points currently use.
Isa active_isa();
/// Overrides the active variant; returns false (and changes nothing) when the
/// CPU cannot run it.
bool set_active_isa(Isa isa);

/// out[i] = round_half_even(clamp(in[i] * scale, -32768, 32767)).
void to_pcm16(std::span<const double> in, double scale, std::span<std::int16_t> out);
/// dst[i] += src[i] * gain over min(dst.size(), src.size()) samples.
void mix_add(std::span<double> dst, std::span<const double> src, double gain);
/// Exact sum of squared samples.
std::uint64_t sum_squares(std::span<const std::int16_t> in);
/// max |in[i]|, with |-32768| = 32768.
std::uint32_t peak_abs(std::span<const std::int16_t> in);

namespace scalar {
void to_pcm16(std::span<const double> in, double scale, std::span<std::int16_t> out);
void mix_add(std::span<double> dst, std::span<const double> src, double gain);
std::uint64_t sum_squares(std::span<const std::int16_t> in);
std::uint32_t peak_abs(std::span<const std::int16_t> in);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define RNR_HAVE_AVX2_KERNELS 1
namespace avx2 {
void to_pcm16(std::span<const double> in, double scale, std::span<std::int16_t> out);
void mix_add(std::span<double> dst, std::span<const double> src, double gain);
std::uint64_t sum_squares(std::span<const std::int16_t> in);
std::uint32_t peak_abs(std::span<const std::int16_t> in);
}  // namespace avx2
#endif

}  // namespace rnr::kernels
