#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "rnr/config.hpp"
#include "rnr/engine.hpp"
#include "rnr/service/protocol.hpp"
#include "rnr/simulator.hpp"

namespace rnr::service {

using ClientId = std::uint64_t;

struct Outgoing {
    std::optional<ClientId> to;  // empty: broadcast
    ServerMessage message;
};

/// The live engine loop without transport or wall-clock time: each tick()
/// applies queued client input in arrival order, steps the bike (from the
/// latest Control, or from a loaded scenario), runs the Engine and returns the
/// messages to send. Beats go out in the tick that produced them; State goes
/// out every tick_hz/state_hz ticks and on the last tick of a scenario.
///
/// Scenario runs reuse ScenarioRunner and Engine unchanged, so their beats
/// equal the offline `simulate` output shifted by the scenario start time.
class LiveSession {
public:
    LiveSession(Config config, std::uint64_t seed);

    void submit(ClientId from, ClientMessage message);
    void client_left(ClientId id);

    /// Replaces the current run with a scripted one starting at the current
    /// session time. duration_s defaults to the script's default duration.
    void load_scenario(std::vector<ScriptEntry> script, std::optional<double> duration_s = std::nullopt);

    std::vector<Outgoing> tick();

    bool scenario_active() const { return scenario_.has_value(); }
    /// Session time of the next tick.
    std::int64_t now_ms() const { return epoch_ms_ + sample_time_ms(run_index_, config_.tick_hz); }
    /// Session time at which the current scenario's final tick lands.
    std::optional<std::int64_t> scenario_end_ms() const;
    const EngineState& engine_state() const { return engine_->state(); }
    std::optional<ClientId> driver() const { return driver_; }

private:
    void reset_run();

    Config config_;
    std::uint64_t seed_;
    std::unique_ptr<Engine> engine_;
    std::unique_ptr<LiveBike> bike_;
    std::optional<ScenarioRunner> scenario_;
    std::deque<std::pair<ClientId, ClientMessage>> inbox_;
    Control control_;
    std::optional<ClientId> driver_;
    std::int64_t epoch_ms_ = 0;
    std::size_t run_index_ = 0;
    std::uint64_t tick_count_ = 0;
    std::uint64_t state_every_ = 1;
};

}  // namespace rnr::service
