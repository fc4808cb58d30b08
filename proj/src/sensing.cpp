#include "rnr/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rnr/errors.hpp"

namespace rnr {
namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw UsageError(std::string("invalid sensing profile: ") + what);
    }
}

double sorted_middle(std::vector<double> values) {
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

}  // namespace

void CalibrationProfile::validate() const {
    require(gravity_alpha > 0.0 && gravity_alpha < 1.0, "gravity_alpha must be in (0,1)");
    require(rms_window_ms > 0.0, "rms_window_ms must be > 0");
    require(proxy_smoothing > 0.0 && proxy_smoothing <= 1.0, "proxy_smoothing must be in (0,1]");
    require(median_taps >= 3 && median_taps % 2 == 1, "median_taps must be odd and >= 3");
    require(d_forward_mm < d_upright_mm, "d_forward_mm must be < d_upright_mm");
    require(v_stop >= 0.0, "v_stop must be >= 0");
    require(resume_threshold >= v_stop, "resume_threshold must be >= v_stop");
    require(stop_hold_ms >= 0.0, "stop_hold_ms must be >= 0");
}

std::string_view to_string(RideState s) { return s == RideState::Riding ? "riding" : "stopped"; }

double median_filter(std::span<const double> window, std::size_t taps) {
    if (taps % 2 == 0) {
        throw UsageError("median_filter: taps must be odd");
    }
    if (window.size() != taps) {
        throw UsageError("median_filter: window holds " + std::to_string(window.size()) +
                         " samples, expected " + std::to_string(taps));
    }
    return sorted_middle({window.begin(), window.end()});
}

GravityRemover::GravityRemover(double alpha) : alpha_(alpha) {}

Accel GravityRemover::operator()(const Accel& a) {
    if (!primed_) {
        g_ = a;
        primed_ = true;
    } else {
        g_.x += alpha_ * (a.x - g_.x);
        g_.y += alpha_ * (a.y - g_.y);
        g_.z += alpha_ * (a.z - g_.z);
    }
    return {a.x - g_.x, a.y - g_.y, a.z - g_.z};
}

std::vector<Accel> remove_gravity(std::span<const Accel> samples, double alpha) {
    GravityRemover remover(alpha);
    std::vector<Accel> out;
    out.reserve(samples.size());
    for (const auto& a : samples) {
        out.push_back(remover(a));
    }
    return out;
}

SpeedProxyEstimator::SpeedProxyEstimator(double window_ms, double smoothing)
    : window_ms_(window_ms), smoothing_(smoothing) {}

double SpeedProxyEstimator::push(std::int64_t t_ms, const Accel& d) {
    window_.push_back({t_ms, d.x * d.x + d.y * d.y + d.z * d.z});
    while (static_cast<double>(t_ms - window_.front().t_ms) >= window_ms_) {
        window_.pop_front();
    }
    // Summed from scratch each sample: a running sum would drift and make the
    // output depend on stream history rather than on the window contents.
    double sum = 0.0;
    for (const auto& e : window_) {
        sum += e.mag_sq;
    }
    const double rms = std::sqrt(sum / static_cast<double>(window_.size()));
    smoothed_ += smoothing_ * (rms - smoothed_);
    return smoothed_;
}

std::vector<double> estimate_speed_proxy(std::span<const TimedAccel> dynamic, double window_ms,
                                         double smoothing) {
    SpeedProxyEstimator est(window_ms, smoothing);
    std::vector<double> out;
    out.reserve(dynamic.size());
    for (const auto& s : dynamic) {
        out.push_back(est.push(s.t_ms, s.accel));
    }
    return out;
}

double estimate_posture(double distance_mm, const CalibrationProfile& profile) {
    const double span = profile.d_upright_mm - profile.d_forward_mm;
    return std::clamp((distance_mm - profile.d_forward_mm) / span, 0.0, 1.0);
}

PostureEstimator::PostureEstimator(const CalibrationProfile& profile) : profile_(profile) {}

double PostureEstimator::push(std::optional<int> ultra_mm) {
    if (!ultra_mm) {
        return posture_;  // dropout: hold
    }
    const auto taps = static_cast<std::size_t>(profile_.median_taps);
    window_.push_back(static_cast<double>(*ultra_mm));
    if (window_.size() > taps) {
        window_.pop_front();
    }
    const std::vector<double> values(window_.begin(), window_.end());
    const double d = values.size() == taps ? median_filter(values, taps) : sorted_middle(values);
    posture_ = estimate_posture(d, profile_);
    return posture_;
}

RideStateDetector::RideStateDetector(const CalibrationProfile& profile)
    : v_stop_(profile.v_stop), resume_(profile.resume_threshold), hold_ms_(profile.stop_hold_ms) {}

RideState RideStateDetector::push(std::int64_t t_ms, double proxy) {
    if (proxy < v_stop_) {
        if (!below_since_) {
            below_since_ = t_ms;
        }
    } else {
        below_since_.reset();
    }

    if (state_ == RideState::Stopped) {
        if (proxy >= resume_) {
            state_ = RideState::Riding;
        }
    } else if (below_since_ && static_cast<double>(t_ms - *below_since_) >= hold_ms_) {
        state_ = RideState::Stopped;
    }
    return state_;
}

std::vector<RideState> detect_ride_state(std::span<const std::int64_t> t_ms,
                                         std::span<const double> speed_proxy,
                                         const CalibrationProfile& profile) {
    if (t_ms.size() != speed_proxy.size()) {
        throw UsageError("detect_ride_state: timestamp and proxy streams differ in length");
    }
    RideStateDetector detector(profile);
    std::vector<RideState> out;
    out.reserve(t_ms.size());
    for (std::size_t i = 0; i < t_ms.size(); ++i) {
        out.push_back(detector.push(t_ms[i], speed_proxy[i]));
    }
    return out;
}

SensingPipeline::SensingPipeline(const CalibrationProfile& profile)
    : gravity_(profile.gravity_alpha),
      proxy_(profile.rms_window_ms, profile.proxy_smoothing),
      posture_(profile),
      ride_(profile) {
    profile.validate();
}

SensingOutput SensingPipeline::push(const SensorSample& sample) {
    if (last_t_ms_ && sample.t_ms <= *last_t_ms_) {
        throw UsageError("sensor timestamps must strictly increase (t_ms " +
                         std::to_string(sample.t_ms) + " after " + std::to_string(*last_t_ms_) +
                         ")");
    }
    last_t_ms_ = sample.t_ms;

    SensingOutput out;
    out.t_ms = sample.t_ms;
    out.speed_proxy = proxy_.push(sample.t_ms, gravity_(sample.accel));
    out.posture = posture_.push(sample.ultra_mm);
    out.ride_state = ride_.push(sample.t_ms, out.speed_proxy);
    return out;
}

}  // namespace rnr
