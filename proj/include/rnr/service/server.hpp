#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "rnr/config.hpp"

namespace rnr::service {

struct ServerOptions {
    std::string address = "0.0.0.0";
    std::uint16_t port = 8787;  // 0 picks a free port
    /// Wall-clock speed-up of the tick loop; simulated time per tick is fixed.
    double speed = 1.0;
    std::optional<std::filesystem::path> scenario;
    std::optional<double> duration_s;
    std::size_t queue_soft_cap = 256;
    std::size_t queue_hard_cap = 4096;
};

/// HTTP/WebSocket front end: GET /healthz answers 200, /session upgrades to a
/// message stream bound to the single LiveSession. The engine tick runs on
/// its own thread, starting when the first client connects; connection I/O
/// runs on a separate thread and only exchanges messages with it.
class Server {
public:
    Server(Config config, std::uint64_t seed, ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts both threads. Throws on bind failure.
    void start();
    /// Bound port (useful with port 0).
    std::uint16_t port() const;
    void stop();
    /// Blocks until SIGINT/SIGTERM, then stops.
    void run_until_signal();

private:
    class Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace rnr::service
