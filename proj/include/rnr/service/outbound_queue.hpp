#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>

namespace rnr::service {

enum class MessageKind { State, Beat, Other };

/// Per-client send queue. Past `soft_cap` the oldest queued State is dropped
/// to make room (or the incoming State itself when none is queued); Beat and
/// other messages are kept until `hard_cap`, where push reports Overflow and
/// the client should be disconnected as lagging.
class OutboundQueue {
public:
    enum class Push { Queued, DroppedState, Overflow };

    OutboundQueue(std::size_t soft_cap, std::size_t hard_cap);

    Push push(std::string message, MessageKind kind);
    std::optional<std::string> pop();
    void clear() { items_.clear(); }

    std::size_t size() const { return items_.size(); }
    std::size_t dropped_states() const { return dropped_states_; }

private:
    struct Item {
        std::string message;
        MessageKind kind;
    };
    std::size_t soft_cap_;
    std::size_t hard_cap_;
    std::deque<Item> items_;
    std::size_t dropped_states_ = 0;
};

}  // namespace rnr::service
