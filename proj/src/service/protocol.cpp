#include "rnr/service/protocol.hpp"

#include <optional>
#include <type_traits>

#include <nlohmann/json.hpp>

namespace rnr::service {
namespace {

using ojson = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ErrorMsg bad(std::string detail) { return {"bad_msg", std::move(detail)}; }

/// Reads a required field; returns false when missing or of the wrong type.
template <typename T>
bool field(const ojson& j, const char* key, T& out) {
    const auto it = j.find(key);
    if (it == j.end()) {
        return false;
    }
    if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) return false;
    } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) return false;
    } else {
        if (!it->is_number()) return false;
    }
    out = it->get<T>();
    return true;
}

std::optional<ojson> parse_object(std::string_view wire, std::string& type, ErrorMsg& err) {
    ojson j = ojson::parse(wire.begin(), wire.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        err = bad("frame is not a JSON object");
        return std::nullopt;
    }
    if (!field(j, "type", type)) {
        err = bad("missing \"type\"");
        return std::nullopt;
    }
    return j;
}

bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

std::string encode(const ClientMessage& msg) {
    ojson j;
    std::visit(overloaded{
                   [&](const Control& m) {
                       j["type"] = "control";
                       j["effort"] = m.effort;
                       j["lean"] = m.lean;
                   },
                   [&](const Button&) { j["type"] = "button"; },
                   [&](const SetMode& m) {
                       j["type"] = "set_mode";
                       j["mode"] = to_string(m.mode);
                   },
                   [&](const LoadScenario& m) {
                       j["type"] = "load_scenario";
                       j["path"] = m.path;
                   },
                   [&](const Ping&) { j["type"] = "ping"; },
               },
               msg);
    return j.dump();
}

std::string encode(const ServerMessage& msg) {
    ojson j;
    std::visit(overloaded{
                   [&](const StateMsg& m) {
                       j["type"] = "state";
                       j["t_ms"] = m.t_ms;
                       j["mode"] = to_string(m.mode);
                       j["bpm"] = m.bpm;
                       j["vol"] = m.vol;
                       j["speed_proxy"] = m.speed_proxy;
                       j["posture"] = m.posture;
                       j["ride_state"] = to_string(m.ride_state);
                       j["v"] = m.v;
                       j["lean"] = m.lean;
                   },
                   [&](const BeatMsg& m) {
                       j["type"] = "beat";
                       j["t_ms"] = m.t_ms;
                       j["step"] = m.step;
                       j["voice"] = to_string(m.voice);
                       j["bpm"] = m.bpm;
                       j["vol"] = m.vol;
                   },
                   [&](const ErrorMsg& m) {
                       j["type"] = "error";
                       j["code"] = m.code;
                       j["detail"] = m.detail;
                   },
                   [&](const Pong&) { j["type"] = "pong"; },
               },
               msg);
    return j.dump();
}

std::variant<ClientMessage, ErrorMsg> decode_client(std::string_view wire) {
    std::string type;
    ErrorMsg err;
    const auto j = parse_object(wire, type, err);
    if (!j) {
        return err;
    }
    if (type == "control") {
        Control m;
        if (!field(*j, "effort", m.effort) || !field(*j, "lean", m.lean)) {
            return bad("control needs numeric effort and lean");
        }
        if (!unit_interval(m.effort) || !unit_interval(m.lean)) {
            return bad("effort and lean must be in [0,1]");
        }
        return ClientMessage{m};
    }
    if (type == "button") {
        return ClientMessage{Button{}};
    }
    if (type == "set_mode") {
        std::string name;
        if (!field(*j, "mode", name)) {
            return bad("set_mode needs \"mode\"");
        }
        const auto mode = parse_mode(name);
        if (!mode) {
            return bad("unknown mode '" + name + "'");
        }
        return ClientMessage{SetMode{*mode}};
    }
    if (type == "load_scenario") {
        LoadScenario m;
        if (!field(*j, "path", m.path)) {
            return bad("load_scenario needs \"path\"");
        }
        return ClientMessage{m};
    }
    if (type == "ping") {
        return ClientMessage{Ping{}};
    }
    return bad("unknown message type '" + type + "'");
}

std::variant<ServerMessage, ErrorMsg> decode_server(std::string_view wire) {
    std::string type;
    ErrorMsg err;
    const auto j = parse_object(wire, type, err);
    if (!j) {
        return err;
    }
    if (type == "state") {
        StateMsg m;
        std::string mode;
        std::string ride;
        if (!field(*j, "t_ms", m.t_ms) || !field(*j, "mode", mode) || !field(*j, "bpm", m.bpm) ||
            !field(*j, "vol", m.vol) || !field(*j, "speed_proxy", m.speed_proxy) ||
            !field(*j, "posture", m.posture) || !field(*j, "ride_state", ride) || !field(*j, "v", m.v) ||
            !field(*j, "lean", m.lean)) {
            return bad("incomplete state message");
        }
        const auto parsed = parse_mode(mode);
        if (!parsed || (ride != "riding" && ride != "stopped")) {
            return bad("bad mode or ride_state in state message");
        }
        m.mode = *parsed;
        m.ride_state = ride == "riding" ? RideState::Riding : RideState::Stopped;
        return ServerMessage{m};
    }
    if (type == "beat") {
        BeatMsg m;
        std::string voice;
        if (!field(*j, "t_ms", m.t_ms) || !field(*j, "step", m.step) || !field(*j, "voice", voice) ||
            !field(*j, "bpm", m.bpm) || !field(*j, "vol", m.vol)) {
            return bad("incomplete beat message");
        }
        const auto v = parse_voice(voice);
        if (!v) {
            return bad("unknown voice '" + voice + "'");
        }
        m.voice = *v;
        return ServerMessage{m};
    }
    if (type == "error") {
        ErrorMsg m;
        if (!field(*j, "code", m.code)) {
            return bad("error message needs \"code\"");
        }
        field(*j, "detail", m.detail);
        return ServerMessage{m};
    }
    if (type == "pong") {
        return ServerMessage{Pong{}};
    }
    return bad("unknown message type '" + type + "'");
}

BeatMsg to_beat_msg(const BeatEvent& e) { return {e.t_ms, e.step_index, e.voice, e.bpm, e.vol}; }

BeatEvent to_beat_event(const BeatMsg& m) { return {m.t_ms, m.step, m.voice, m.bpm, m.vol}; }

}  // namespace rnr::service
