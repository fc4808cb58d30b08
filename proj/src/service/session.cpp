#include "rnr/service/session.hpp"

#include <algorithm>
#include <cmath>

#include "rnr/errors.hpp"

namespace rnr::service {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

LiveSession::LiveSession(Config config, std::uint64_t seed) : config_(std::move(config)), seed_(seed) {
    config_.noise.rng_seed = seed_;
    config_.validate();
    state_every_ = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(config_.tick_hz / config_.state_hz)));
    reset_run();
}

void LiveSession::reset_run() {
    engine_ = std::make_unique<Engine>(config_);
    bike_ = std::make_unique<LiveBike>(config_.tick_hz, config_.bike, config_.noise);
    run_index_ = 0;
}

void LiveSession::submit(ClientId from, ClientMessage message) { inbox_.emplace_back(from, std::move(message)); }

void LiveSession::client_left(ClientId id) {
    if (driver_ == id) {
        driver_.reset();
    }
}

void LiveSession::load_scenario(std::vector<ScriptEntry> script, std::optional<double> duration_s) {
    const double duration = duration_s.value_or(default_duration_s(script));
    ScenarioRunner runner(std::move(script), {config_.tick_hz, duration}, config_.bike, config_.noise);
    epoch_ms_ = now_ms();
    scenario_.emplace(std::move(runner));
    control_ = {};
    reset_run();
}

std::optional<std::int64_t> LiveSession::scenario_end_ms() const {
    if (!scenario_) {
        return std::nullopt;
    }
    return epoch_ms_ + sample_time_ms(scenario_->total_samples() - 1, config_.tick_hz);
}

std::vector<Outgoing> LiveSession::tick() {
    std::vector<Outgoing> out;
    auto error_to = [&](ClientId id, std::string code, std::string detail) {
        out.push_back({id, ErrorMsg{std::move(code), std::move(detail)}});
    };

    while (!inbox_.empty()) {
        auto [from, message] = std::move(inbox_.front());
        inbox_.pop_front();
        std::visit(overloaded{
                       [&](const Control& c) {
                           if (scenario_) {
                               error_to(from, "scenario_active", "a scripted scenario is driving the bike");
                               return;
                           }
                           if (!driver_) {
                               driver_ = from;
                           }
                           if (*driver_ != from) {
                               error_to(from, "not_driver", "another client is driving");
                               return;
                           }
                           control_ = c;
                       },
                       [&](const Button&) { engine_->press_button(); },
                       [&](const SetMode& m) { engine_->set_mode(m.mode); },
                       [&](const LoadScenario& m) {
                           try {
                               load_scenario(load_script(m.path));
                           } catch (const UsageError& e) {
                               error_to(from, "bad_scenario", e.what());
                           }
                       },
                       [&](const Ping&) { out.push_back({from, Pong{}}); },
                   },
                   message);
    }

    const ScenarioFrame frame = scenario_ ? scenario_->next() : bike_->step({control_.effort, control_.lean, 0});
    const TickOutput result = engine_->process(frame.sample);
    const std::int64_t t_session = epoch_ms_ + frame.sample.t_ms;
    for (const auto& e : result.events) {
        BeatMsg beat = to_beat_msg(e);
        beat.t_ms += static_cast<double>(epoch_ms_);
        out.push_back({std::nullopt, beat});
    }
    ++run_index_;

    const bool scenario_done = scenario_ && scenario_->done();
    if (tick_count_ % state_every_ == 0 || scenario_done) {
        const EngineState& s = result.state;
        out.push_back({std::nullopt, StateMsg{t_session, s.mode, s.bpm, s.vol, s.speed_proxy, s.posture, s.ride_state,
                                              frame.bike.v, frame.bike.lean_actual}});
    }
    ++tick_count_;

    if (scenario_done) {
        // Back to interactive riding on a fresh bike, continuing the clock.
        epoch_ms_ = now_ms();
        scenario_.reset();
        control_ = {};
        reset_run();
    }
    return out;
}

}  // namespace rnr::service
