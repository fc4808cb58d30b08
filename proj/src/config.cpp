#include "rnr/config.hpp"

#include <fstream>
#include <sstream>

#include <boost/program_options.hpp>
#include <nlohmann/json.hpp>

#include "embedded.hpp"
#include "rnr/errors.hpp"

namespace rnr {
namespace {

namespace po = boost::program_options;

po::options_description describe(Config& c) {
    po::options_description desc("config");
    desc.add_options()
        ("gravity_alpha", po::value(&c.sensing.gravity_alpha))
        ("rms_window_ms", po::value(&c.sensing.rms_window_ms))
        ("proxy_smoothing", po::value(&c.sensing.proxy_smoothing))
        ("median_taps", po::value(&c.sensing.median_taps))
        ("d_forward_mm", po::value(&c.sensing.d_forward_mm))
        ("d_upright_mm", po::value(&c.sensing.d_upright_mm))
        ("v_stop", po::value(&c.sensing.v_stop))
        ("resume_threshold", po::value(&c.sensing.resume_threshold))
        ("stop_hold_ms", po::value(&c.sensing.stop_hold_ms))
        ("bpm_min", po::value(&c.mapping.bpm_min))
        ("bpm_max", po::value(&c.mapping.bpm_max))
        ("proxy_lo", po::value(&c.mapping.proxy_lo))
        ("proxy_hi", po::value(&c.mapping.proxy_hi))
        ("vol_min", po::value(&c.mapping.vol_min))
        ("vol_max", po::value(&c.mapping.vol_max))
        ("default_bpm", po::value(&c.mapping.default_bpm))
        ("default_vol", po::value(&c.mapping.default_vol))
        ("bpm_slew", po::value(&c.mapping.bpm_slew))
        ("vol_slew", po::value(&c.mapping.vol_slew))
        ("k_effort", po::value(&c.bike.k_effort))
        ("c_drag", po::value(&c.bike.c_drag))
        ("wheel_circumference_m", po::value(&c.bike.wheel_circumference_m))
        ("gear_ratio", po::value(&c.bike.gear_ratio))
        ("tau_lean_s", po::value(&c.bike.tau_lean_s))
        ("pedal_accel_amp", po::value(&c.bike.pedal_accel_amp))
        ("gravity", po::value(&c.bike.gravity))
        ("mount_upright_mm", po::value(&c.bike.mount_upright_mm))
        ("mount_forward_mm", po::value(&c.bike.mount_forward_mm))
        ("rate_hz", po::value(&c.rate_hz))
        ("accel_sigma", po::value(&c.noise.accel_sigma))
        ("ultra_sigma", po::value(&c.noise.ultra_sigma))
        ("dropout_prob", po::value(&c.noise.dropout_prob))
        ("pattern", po::value(&c.pattern))
        ("sample_rate", po::value(&c.sample_rate))
        ("tick_hz", po::value(&c.tick_hz))
        ("state_hz", po::value(&c.state_hz));
    return desc;
}

void require(bool ok, const char* what) {
    if (!ok) {
        throw UsageError(std::string("invalid config: ") + what);
    }
}

std::string number(double v) { return nlohmann::json(v).dump(); }

}  // namespace

void Config::validate() const {
    sensing.validate();
    mapping.validate();
    bike.validate();
    noise.validate();
    require(rate_hz >= 10.0 && rate_hz <= 1000.0, "rate_hz must be in [10, 1000]");
    require(sample_rate >= 8000 && sample_rate <= 192000, "sample_rate must be in [8000, 192000]");
    require(tick_hz >= 1.0 && tick_hz <= 1000.0, "tick_hz must be in [1, 1000]");
    require(state_hz > 0.0 && state_hz <= tick_hz, "state_hz must be in (0, tick_hz]");
}

DrumPattern Config::drum_pattern() const { return pattern.empty() ? default_pattern() : load_pattern(pattern); }

const std::string& default_config_text() {
    static const std::string text = embedded::kDefaultConfig;
    return text;
}

Config parse_config(std::istream& in) {
    Config c;
    const auto desc = describe(c);
    po::variables_map vm;
    try {
        // program_options keeps the first value stored per key, so the user
        // file goes in before the defaults.
        po::store(po::parse_config_file(in, desc, false), vm);
        std::istringstream defaults(default_config_text());
        po::store(po::parse_config_file(defaults, desc, false), vm);
        po::notify(vm);
    } catch (const po::error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

Config default_config() {
    std::istringstream empty;
    return parse_config(empty);
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config " + path.string());
    }
    try {
        return parse_config(in);
    } catch (const UsageError& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

std::string profile_to_text(const CalibrationProfile& p) {
    std::ostringstream out;
    out << "gravity_alpha = " << number(p.gravity_alpha) << '\n'
        << "rms_window_ms = " << number(p.rms_window_ms) << '\n'
        << "proxy_smoothing = " << number(p.proxy_smoothing) << '\n'
        << "median_taps = " << p.median_taps << '\n'
        << "d_forward_mm = " << number(p.d_forward_mm) << '\n'
        << "d_upright_mm = " << number(p.d_upright_mm) << '\n'
        << "v_stop = " << number(p.v_stop) << '\n'
        << "resume_threshold = " << number(p.resume_threshold) << '\n'
        << "stop_hold_ms = " << number(p.stop_hold_ms) << '\n';
    return out.str();
}

}  // namespace rnr
