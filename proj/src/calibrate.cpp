#include "rnr/calibrate.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "rnr/errors.hpp"

namespace rnr {

double segment_median(std::vector<double> values) {
    if (values.empty()) {
        throw UsageError("median of an empty segment");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CalibrationProfile calibrate(const Trace& trace, const CalibrationProfile& base) {
    std::vector<double> upright;
    std::vector<double> forward;
    bool saw_upright = false;
    bool saw_forward = false;
    std::vector<double>* current = nullptr;

    for (const auto& record : trace.records) {
        if (const auto* marker = std::get_if<TraceMarker>(&record)) {
            if (marker->label == "upright") {
                current = &upright;
                saw_upright = true;
            } else if (marker->label == "forward") {
                current = &forward;
                saw_forward = true;
            } else {
                current = nullptr;
            }
            continue;
        }
        const auto& sample = std::get<SensorSample>(record);
        if (current != nullptr && sample.ultra_mm) {
            current->push_back(static_cast<double>(*sample.ultra_mm));
        }
    }

    if (!saw_upright || !saw_forward) {
        throw UsageError("calibration trace needs both {\"marker\":\"upright\"} and {\"marker\":\"forward\"} lines");
    }
    if (upright.empty() || forward.empty()) {
        throw UsageError("calibration segment has no valid ultrasonic readings");
    }

    CalibrationProfile profile = base;
    profile.d_upright_mm = segment_median(std::move(upright));
    profile.d_forward_mm = segment_median(std::move(forward));
    if (profile.d_upright_mm - profile.d_forward_mm < kMinCalibrationSeparationMm) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "calibration failed: upright %.1f mm and forward %.1f mm must differ by >= %.0f mm "
                      "with upright farther",
                      profile.d_upright_mm, profile.d_forward_mm, kMinCalibrationSeparationMm);
        throw CalibrationFailed(msg);
    }
    return profile;
}

}  // namespace rnr
