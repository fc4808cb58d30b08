#pragma once

#include <string>
#include <vector>

#include "rnr/config.hpp"
#include "rnr/mapping.hpp"
#include "rnr/sensing.hpp"
#include "rnr/sequencer.hpp"
#include "rnr/trace.hpp"

namespace rnr {

struct TickOutput {
    SensingOutput sensed;
    EngineState state;
    std::vector<BeatEvent> events;
};

/// sensing -> mapping -> sequencer for one sample stream. The offline replay
/// and the live service both drive this class, so they cannot disagree.
class Engine {
public:
    explicit Engine(const Config& config);

    TickOutput process(const SensorSample& sample);

    void press_button();
    void set_mode(Mode mode);

    const EngineState& state() const { return state_; }
    const Config& config() const { return config_; }

private:
    Config config_;
    SensingPipeline sensing_;
    Sequencer sequencer_;
    EngineState state_;
    bool started_ = false;
};

struct ReplayResult {
    std::vector<EngineState> states;
    std::vector<BeatEvent> events;
};

ReplayResult replay(const Trace& trace, const Config& config);

std::string state_log_line(const EngineState& state);
std::string event_log_line(const BeatEvent& event);
std::string state_log(const ReplayResult& result);
std::string event_log(const ReplayResult& result);

}  // namespace rnr
