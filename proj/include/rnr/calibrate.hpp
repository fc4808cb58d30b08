#pragma once

#include "rnr/sensing.hpp"
#include "rnr/trace.hpp"

namespace rnr {

inline constexpr double kMinCalibrationSeparationMm = 50.0;

/// Distances are taken from the trace segments opened by {"marker":"upright"}
/// and {"marker":"forward"} (a segment runs to the next marker or the end).
/// Missing markers or an empty segment throw UsageError; medians less than
/// 50 mm apart, or in the wrong order, throw CalibrationFailed.
CalibrationProfile calibrate(const Trace& trace, const CalibrationProfile& base);

/// Median of the values; the mean of the two middle ones for even counts.
double segment_median(std::vector<double> values);

}  // namespace rnr
