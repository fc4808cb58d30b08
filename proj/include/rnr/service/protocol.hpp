#pragma once

// Wire schema for /session: one JSON document per text frame, tagged by
// "type". Unknown fields are ignored on decode.
//
//   client: {"type":"control","effort":f,"lean":f} {"type":"button"}
//           {"type":"set_mode","mode":"volume_only|tempo_only|both"}
//           {"type":"load_scenario","path":s} {"type":"ping"}
//   server: {"type":"state","t_ms","mode","bpm","vol","speed_proxy","posture","ride_state","v","lean"}
//           {"type":"beat","t_ms","step","voice","bpm","vol"}
//           {"type":"error","code","detail"} {"type":"pong"}

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "rnr/mapping.hpp"
#include "rnr/sequencer.hpp"

namespace rnr::service {

struct Control {
    double effort = 0.0;
    double lean = 0.0;
    friend bool operator==(const Control&, const Control&) = default;
};
struct Button {
    friend bool operator==(const Button&, const Button&) = default;
};
struct SetMode {
    Mode mode = Mode::VolumeOnly;
    friend bool operator==(const SetMode&, const SetMode&) = default;
};
struct LoadScenario {
    std::string path;
    friend bool operator==(const LoadScenario&, const LoadScenario&) = default;
};
struct Ping {
    friend bool operator==(const Ping&, const Ping&) = default;
};

using ClientMessage = std::variant<Control, Button, SetMode, LoadScenario, Ping>;

struct StateMsg {
    std::int64_t t_ms = 0;
    Mode mode = Mode::VolumeOnly;
    double bpm = 0.0;
    double vol = 0.0;
    double speed_proxy = 0.0;
    double posture = 0.0;
    RideState ride_state = RideState::Stopped;
    double v = 0.0;     // simulated bike speed, m/s
    double lean = 0.0;  // simulated lean, 0 upright .. 1 forward
    friend bool operator==(const StateMsg&, const StateMsg&) = default;
};
struct BeatMsg {
    double t_ms = 0.0;
    std::size_t step = 0;
    Voice voice = Voice::Kick;
    double bpm = 0.0;
    double vol = 0.0;
    friend bool operator==(const BeatMsg&, const BeatMsg&) = default;
};
struct ErrorMsg {
    std::string code;
    std::string detail;
    friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};
struct Pong {
    friend bool operator==(const Pong&, const Pong&) = default;
};

using ServerMessage = std::variant<StateMsg, BeatMsg, ErrorMsg, Pong>;

std::string encode(const ClientMessage& msg);
std::string encode(const ServerMessage& msg);

/// Malformed input decodes to ErrorMsg{"bad_msg", reason}.
std::variant<ClientMessage, ErrorMsg> decode_client(std::string_view wire);
std::variant<ServerMessage, ErrorMsg> decode_server(std::string_view wire);

BeatMsg to_beat_msg(const BeatEvent& e);
BeatEvent to_beat_event(const BeatMsg& m);

}  // namespace rnr::service
