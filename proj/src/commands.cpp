#include "rnr/commands.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "rnr/calibrate.hpp"
#include "rnr/errors.hpp"
#include "rnr/wav.hpp"

namespace rnr {
namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw UsageError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw UsageError("write failed: " + path.string());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void prepare_out(const CommonOptions& common) {
    std::error_code ec;
    fs::create_directories(common.out, ec);
    if (ec) {
        throw UsageError("cannot create output directory " + common.out.string() + ": " + ec.message());
    }
}

RunReport replay_and_write(const Trace& trace, const std::string& trace_id, const Config& config,
                           const CommonOptions& common, std::ostream& log) {
    const ReplayResult result = replay(trace, config);
    RunReport report = build_report(trace_id, result, config);
    write_text(common.out / "state.jsonl", state_log(result));
    write_text(common.out / "events.jsonl", event_log(result));
    write_text(common.out / "report.json", report_to_json(report).dump(2) + "\n");
    if (common.pretty) {
        log << report_to_table(report);
    } else {
        log << report_to_json(report).dump() << "\n";
    }
    return report;
}

}  // namespace

Config resolve_config(const CommonOptions& common) {
    Config config = common.config ? load_config(*common.config) : default_config();
    config.noise.rng_seed = common.seed;
    return config;
}

Trace simulate_trace(const std::vector<ScriptEntry>& script, const Config& config, std::uint64_t seed,
                     const SimulateOptions& options) {
    ScenarioOptions so;
    so.rate_hz = options.rate_hz.value_or(config.rate_hz);
    so.duration_s = options.duration_s.value_or(default_duration_s(script));
    if (!(so.rate_hz > 0.0 && so.rate_hz <= 10000.0)) {
        throw UsageError("--rate-hz must be in (0, 10000]");
    }
    if (!(so.duration_s > 0.0 && so.duration_s <= 86400.0)) {
        throw UsageError("--duration-s must be in (0, 86400]");
    }
    NoiseConfig noise = config.noise;
    noise.rng_seed = seed;

    Trace trace;
    trace.header.rate_hz = so.rate_hz;
    trace.header.extra["seed"] = seed;
    trace.header.extra["duration_s"] = so.duration_s;

    ScenarioRunner runner(script, so, config.bike, noise);
    trace.records.reserve(runner.total_samples());
    while (!runner.done()) {
        ScenarioFrame frame = runner.next();
        if (frame.marker) {
            trace.records.emplace_back(TraceMarker{*frame.marker});
        }
        trace.records.emplace_back(frame.sample);
    }
    return trace;
}

RunReport cmd_replay(const fs::path& trace_path, const CommonOptions& common, std::ostream& log) {
    const Config config = resolve_config(common);
    const std::string text = read_text(trace_path);
    std::istringstream in(text);
    const Trace trace = parse_trace(in);
    prepare_out(common);
    return replay_and_write(trace, fnv1a_hex(text), config, common, log);
}

RunReport cmd_simulate(const fs::path& script_path, const CommonOptions& common, const SimulateOptions& options,
                       std::ostream& log) {
    const Config config = resolve_config(common);
    const auto script = load_script(script_path);
    const Trace trace = simulate_trace(script, config, common.seed, options);
    const std::string text = trace_to_string(trace);
    prepare_out(common);
    write_text(common.out / "trace.jsonl", text);
    return replay_and_write(trace, fnv1a_hex(text), config, common, log);
}

StimulusSpec parse_stimulus_spec(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw UsageError("stimulus spec must be a JSON object");
    }
    StimulusSpec spec;
    int sample_rate = 44100;
    if (j.contains("sample_rate")) {
        if (!j["sample_rate"].is_number_integer()) {
            throw UsageError("sample_rate must be an integer");
        }
        sample_rate = j["sample_rate"].get<int>();
    }
    if (!j.contains("pairs")) {
        return spec;
    }
    const auto& pairs = j["pairs"];
    if (!pairs.is_array()) {
        throw UsageError("pairs must be an array");
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        const std::string where = "pairs[" + std::to_string(i) + "]: ";
        if (!p.is_object()) {
            throw UsageError(where + "expected an object");
        }
        StimulusRequest r;
        r.sample_rate = sample_rate;
        const auto param = p.contains("parameter") && p["parameter"].is_string()
                               ? parse_stimulus_parameter(p["parameter"].get<std::string>())
                               : std::nullopt;
        if (!param) {
            throw UsageError(where + "parameter must be \"tempo\" or \"volume\"");
        }
        const auto contrast = p.contains("contrast") && p["contrast"].is_string()
                                  ? parse_contrast(p["contrast"].get<std::string>())
                                  : std::nullopt;
        if (!contrast) {
            throw UsageError(where + "contrast must be \"easy\" or \"hard\"");
        }
        if (!p.contains("seed") || !p["seed"].is_number_unsigned()) {
            throw UsageError(where + "seed must be a non-negative integer");
        }
        r.parameter = *param;
        r.contrast = *contrast;
        r.seed = p["seed"].get<std::uint64_t>();
        for (auto [key, field] : {std::pair{"base_bpm", &r.base_bpm}, std::pair{"base_gain", &r.base_gain},
                                  std::pair{"duration_s", &r.duration_s}}) {
            if (p.contains(key)) {
                if (!p[key].is_number()) {
                    throw UsageError(where + key + " must be a number");
                }
                *field = p[key].get<double>();
            }
        }
        spec.pairs.push_back(r);
    }
    return spec;
}

bool key_confirmed(const StimulusPair& pair, const std::array<ClipMeasurement, 2>& measured) {
    const auto& fast = measured[static_cast<std::size_t>(pair.answer)];
    const auto& slow = measured[static_cast<std::size_t>(1 - pair.answer)];
    if (pair.request.parameter == StimulusParameter::Tempo) {
        return fast.onset_bpm > slow.onset_bpm;
    }
    return fast.rms > slow.rms;
}

std::vector<ManifestEntry> cmd_stimuli(const fs::path& spec_path, const CommonOptions& common, int jobs,
                                       std::ostream& log) {
    if (jobs < 1) {
        throw UsageError("--jobs must be at least 1");
    }
    const Config config = resolve_config(common);
    const DrumPattern pattern = config.drum_pattern();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(spec_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(spec_path.string() + ": " + e.what());
    }
    const StimulusSpec spec = parse_stimulus_spec(j);
    prepare_out(common);

    std::vector<ManifestEntry> entries(spec.pairs.size());
    std::atomic<std::size_t> cursor{0};
    std::mutex error_mu;
    std::exception_ptr error;

    auto worker = [&] {
        for (std::size_t i = cursor++; i < entries.size(); i = cursor++) {
            try {
                ManifestEntry e;
                e.pair = make_stimulus_pair(spec.pairs[i], pattern);
                char name[32];
                for (int c = 0; c < 2; ++c) {
                    std::snprintf(name, sizeof name, "pair_%03zu_%c.wav", i, c == 0 ? 'a' : 'b');
                    e.files[c] = name;
                    write_wav(common.out / name, e.pair.clips[c].pcm);
                    e.measured[c] = measure_clip(read_wav(common.out / name), pattern.steps_per_beat);
                    e.pair.clips[c].pcm.samples.clear();
                }
                e.key_confirmed = key_confirmed(e.pair, e.measured);
                entries[i] = std::move(e);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
                cursor = entries.size();
            }
        }
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), std::max<std::size_t>(1, entries.size()));
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < n_threads; ++t) {
        threads.emplace_back(worker);
    }
    worker();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);

    nlohmann::ordered_json manifest;
    manifest["sample_rate"] = spec.pairs.empty() ? 44100 : spec.pairs.front().sample_rate;
    manifest["pairs"] = nlohmann::ordered_json::array();
    std::size_t unconfirmed = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        nlohmann::ordered_json p;
        p["index"] = i;
        p["parameter"] = to_string(e.pair.request.parameter);
        p["contrast"] = to_string(e.pair.request.contrast);
        p["seed"] = e.pair.request.seed;
        p["answer"] = e.files[static_cast<std::size_t>(e.pair.answer)];
        p["clips"] = nlohmann::ordered_json::array();
        for (int c = 0; c < 2; ++c) {
            nlohmann::ordered_json clip;
            clip["file"] = e.files[c];
            clip["bpm"] = e.pair.clips[c].bpm;
            clip["gain"] = e.pair.clips[c].gain;
            clip["measured_onsets"] = e.measured[c].onset_count;
            clip["measured_bpm"] = e.measured[c].onset_bpm;
            clip["measured_rms"] = e.measured[c].rms;
            clip["measured_peak"] = e.measured[c].peak;
            p["clips"].push_back(std::move(clip));
        }
        p["key_confirmed"] = e.key_confirmed;
        unconfirmed += e.key_confirmed ? 0 : 1;
        manifest["pairs"].push_back(std::move(p));
    }
    write_text(common.out / "manifest.json", manifest.dump(2) + "\n");
    log << entries.size() << " pairs, " << 2 * entries.size() << " clips written to " << common.out.string() << "\n";
    if (unconfirmed > 0) {
        throw DomainError(std::to_string(unconfirmed) + " pair(s) failed answer-key confirmation");
    }
    return entries;
}

CalibrationProfile cmd_calibrate(const fs::path& trace_path, const CommonOptions& common, std::ostream& log) {
    const Config config = resolve_config(common);
    const Trace trace = load_trace(trace_path);
    const CalibrationProfile profile = calibrate(trace, config.sensing);
    const std::string text = profile_to_text(profile);
    prepare_out(common);
    write_text(common.out / "profile.conf", text);
    log << text;
    return profile;
}

}  // namespace rnr
