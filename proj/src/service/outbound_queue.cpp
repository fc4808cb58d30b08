#include "rnr/service/outbound_queue.hpp"

#include <algorithm>

namespace rnr::service {

OutboundQueue::OutboundQueue(std::size_t soft_cap, std::size_t hard_cap)
    : soft_cap_(soft_cap), hard_cap_(std::max(soft_cap, hard_cap)) {}

OutboundQueue::Push OutboundQueue::push(std::string message, MessageKind kind) {
    if (items_.size() >= soft_cap_) {
        const auto oldest_state =
            std::find_if(items_.begin(), items_.end(), [](const Item& i) { return i.kind == MessageKind::State; });
        if (oldest_state != items_.end()) {
            items_.erase(oldest_state);
            ++dropped_states_;
        } else if (kind == MessageKind::State) {
            ++dropped_states_;
            return Push::DroppedState;
        }
    }
    if (items_.size() >= hard_cap_) {
        return Push::Overflow;
    }
    items_.push_back({std::move(message), kind});
    return Push::Queued;
}

std::optional<std::string> OutboundQueue::pop() {
    if (items_.empty()) {
        return std::nullopt;
    }
    std::string msg = std::move(items_.front().message);
    items_.pop_front();
    return msg;
}

}  // namespace rnr::service
