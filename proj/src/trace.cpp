#include "rnr/trace.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rnr/errors.hpp"

namespace rnr {
namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw UsageError("line " + std::to_string(line) + ": " + what);
}

double finite_number(const ojson& obj, const char* key, std::size_t line) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        fail(line, std::string("missing or non-numeric \"") + key + "\"");
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) {
        fail(line, std::string("\"") + key + "\" is not finite");
    }
    return v;
}

SensorSample parse_sample(const ojson& obj, std::size_t line) {
    SensorSample s;
    const auto t = obj.find("t_ms");
    if (t == obj.end() || !t->is_number_integer()) {
        fail(line, "missing or non-integer \"t_ms\"");
    }
    s.t_ms = t->get<std::int64_t>();
    s.accel = {finite_number(obj, "ax", line), finite_number(obj, "ay", line), finite_number(obj, "az", line)};

    const auto u = obj.find("ultra_mm");
    if (u == obj.end()) {
        fail(line, "missing \"ultra_mm\" (use null for a dropout)");
    }
    if (!u->is_null()) {
        if (!u->is_number_integer()) {
            fail(line, "\"ultra_mm\" must be an integer or null");
        }
        const auto mm = u->get<std::int64_t>();
        if (mm < 0 || mm > kUltraMaxMm) {
            fail(line, "\"ultra_mm\" outside [0, 5000]");
        }
        s.ultra_mm = static_cast<int>(mm);
    }

    if (const auto b = obj.find("button"); b != obj.end()) {
        if (b->is_boolean()) {
            s.button_presses = b->get<bool>() ? 1 : 0;
        } else if (b->is_number_integer() && b->get<int>() >= 0) {
            s.button_presses = b->get<int>();
        } else {
            fail(line, "\"button\" must be a boolean or a count");
        }
    }
    return s;
}

}  // namespace

std::vector<SensorSample> Trace::samples() const {
    std::vector<SensorSample> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (const auto* s = std::get_if<SensorSample>(&r)) {
            out.push_back(*s);
        }
    }
    return out;
}

Trace parse_trace(std::istream& in) {
    Trace trace;
    std::string text;
    std::size_t line = 0;
    bool have_header = false;
    std::optional<std::int64_t> last_t;

    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        ojson obj;
        try {
            obj = ojson::parse(text);
        } catch (const ojson::parse_error&) {
            fail(line, "not valid JSON (truncated or corrupt line)");
        }
        if (!obj.is_object()) {
            fail(line, "expected a JSON object");
        }

        if (!have_header) {
            const auto schema = obj.find("schema");
            if (schema == obj.end() || !schema->is_string()) {
                fail(line, "first line must be a trace header with \"schema\"");
            }
            if (schema->get<std::string>() != kTraceSchema) {
                fail(line, "unsupported trace schema \"" + schema->get<std::string>() + "\"");
            }
            const auto rate = obj.find("rate_hz");
            if (rate == obj.end() || !rate->is_number() || !(rate->get<double>() > 0.0)) {
                fail(line, "header needs a positive \"rate_hz\"");
            }
            trace.header.rate_hz = rate->get<double>();
            for (auto it = obj.begin(); it != obj.end(); ++it) {
                if (it.key() != "schema" && it.key() != "rate_hz") {
                    trace.header.extra[it.key()] = it.value();
                }
            }
            have_header = true;
            continue;
        }

        if (const auto m = obj.find("marker"); m != obj.end()) {
            if (!m->is_string()) {
                fail(line, "\"marker\" must be a string");
            }
            trace.records.emplace_back(TraceMarker{m->get<std::string>()});
            continue;
        }

        SensorSample s = parse_sample(obj, line);
        if (last_t && s.t_ms <= *last_t) {
            fail(line, "t_ms " + std::to_string(s.t_ms) + " does not increase");
        }
        last_t = s.t_ms;
        trace.records.emplace_back(s);
    }
    if (!have_header) {
        fail(line + 1, "empty trace (no header)");
    }
    return trace;
}

Trace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read trace " + path.string());
    }
    try {
        return parse_trace(in);
    } catch (const UsageError& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

std::string header_line(const TraceHeader& header) {
    ojson j;
    j["schema"] = kTraceSchema;
    j["rate_hz"] = header.rate_hz;
    for (auto it = header.extra.begin(); it != header.extra.end(); ++it) {
        j[it.key()] = it.value();
    }
    return j.dump();
}

std::string sample_line(const SensorSample& s) {
    ojson j;
    j["t_ms"] = s.t_ms;
    j["ax"] = s.accel.x;
    j["ay"] = s.accel.y;
    j["az"] = s.accel.z;
    j["ultra_mm"] = s.ultra_mm ? ojson(*s.ultra_mm) : ojson(nullptr);
    if (s.button_presses > 0) {
        j["button"] = s.button_presses;
    }
    return j.dump();
}

std::string marker_line(const TraceMarker& marker) {
    ojson j;
    j["marker"] = marker.label;
    return j.dump();
}

void write_trace(std::ostream& out, const Trace& trace) {
    out << header_line(trace.header) << '\n';
    for (const auto& r : trace.records) {
        if (const auto* s = std::get_if<SensorSample>(&r)) {
            out << sample_line(*s) << '\n';
        } else {
            out << marker_line(std::get<TraceMarker>(r)) << '\n';
        }
    }
}

std::string trace_to_string(const Trace& trace) {
    std::ostringstream ss;
    write_trace(ss, trace);
    return ss.str();
}

}  // namespace rnr
