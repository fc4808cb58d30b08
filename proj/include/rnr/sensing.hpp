#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rnr {

struct Accel {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Accel&, const Accel&) = default;
};

inline constexpr int kUltraMaxMm = 5000;

/// One timestamped reading pair from the bike. `ultra_mm` is empty for an
/// ultrasonic dropout (no echo). `button_presses` counts mode-button edges
/// that arrived since the previous sample.
struct SensorSample {
    std::int64_t t_ms = 0;
    Accel accel;
    std::optional<int> ultra_mm;
    int button_presses = 0;

    friend bool operator==(const SensorSample&, const SensorSample&) = default;
};

/// Per-session sensing constants. Values come from the config file; a
/// value-initialized profile fails validate().
struct CalibrationProfile {
    double gravity_alpha = 0.0;    // per-sample low-pass coefficient, (0,1)
    double rms_window_ms = 0.0;
    double proxy_smoothing = 0.0;  // per-sample EMA coefficient, (0,1]
    int median_taps = 0;           // odd, >= 3
    double d_forward_mm = 0.0;
    double d_upright_mm = 0.0;
    double v_stop = 0.0;
    double resume_threshold = 0.0;
    double stop_hold_ms = 0.0;

    /// Throws UsageError naming the first violated invariant.
    void validate() const;
};

enum class RideState { Stopped, Riding };

std::string_view to_string(RideState s);

struct SensingOutput {
    std::int64_t t_ms = 0;
    double speed_proxy = 0.0;
    double posture = 1.0;  // 0 = fully forward, 1 = fully upright
    RideState ride_state = RideState::Stopped;
};

/// Middle element of the sorted window. Throws UsageError when the window
/// length differs from `taps` or `taps` is even.
double median_filter(std::span<const double> window, std::size_t taps);

/// Per-axis exponential low-pass gravity estimate; emits accel minus the
/// estimate. The estimate is seeded with the first sample, so the first
/// output is exactly zero.
class GravityRemover {
public:
    explicit GravityRemover(double alpha);

    Accel operator()(const Accel& a);

private:
    double alpha_;
    Accel g_;
    bool primed_ = false;
};

std::vector<Accel> remove_gravity(std::span<const Accel> samples, double alpha);

/// Trailing-window RMS of the dynamic acceleration magnitude followed by
/// an exponential smoother. The window holds samples with t in (t_now - W, t_now].
class SpeedProxyEstimator {
public:
    SpeedProxyEstimator(double window_ms, double smoothing);

    double push(std::int64_t t_ms, const Accel& dynamic);

    double value() const { return smoothed_; }

private:
    struct Entry {
        std::int64_t t_ms;
        double mag_sq;
    };
    double window_ms_;
    double smoothing_;
    std::deque<Entry> window_;
    double smoothed_ = 0.0;
};

struct TimedAccel {
    std::int64_t t_ms = 0;
    Accel accel;
};

std::vector<double> estimate_speed_proxy(std::span<const TimedAccel> dynamic,
                                         double window_ms, double smoothing);

/// Linear map of a filtered distance onto [0,1] between the calibration points.
double estimate_posture(double distance_mm, const CalibrationProfile& profile);

/// Median-filtered posture with dropout hold. Until `median_taps` valid
/// readings have arrived the median runs over what is available.
class PostureEstimator {
public:
    explicit PostureEstimator(const CalibrationProfile& profile);

    double push(std::optional<int> ultra_mm);

    double value() const { return posture_; }

private:
    CalibrationProfile profile_;
    std::deque<double> window_;
    double posture_ = 1.0;
};

/// Riding/Stopped hysteresis: Stopped only after the proxy stays below v_stop
/// for stop_hold_ms; Riding again as soon as the proxy reaches resume_threshold.
class RideStateDetector {
public:
    explicit RideStateDetector(const CalibrationProfile& profile);

    RideState push(std::int64_t t_ms, double speed_proxy);

    RideState state() const { return state_; }

private:
    double v_stop_;
    double resume_;
    double hold_ms_;
    RideState state_ = RideState::Stopped;
    std::optional<std::int64_t> below_since_;
};

std::vector<RideState> detect_ride_state(std::span<const std::int64_t> t_ms,
                                         std::span<const double> speed_proxy,
                                         const CalibrationProfile& profile);

/// Full sensing chain for one stream. Throws UsageError when timestamps are
/// not strictly increasing.
class SensingPipeline {
public:
    explicit SensingPipeline(const CalibrationProfile& profile);

    SensingOutput push(const SensorSample& sample);

private:
    GravityRemover gravity_;
    SpeedProxyEstimator proxy_;
    PostureEstimator posture_;
    RideStateDetector ride_;
    std::optional<std::int64_t> last_t_ms_;
};

}  // namespace rnr
