#include "rnr/service/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "rnr/service/outbound_queue.hpp"
#include "rnr/service/protocol.hpp"
#include "rnr/service/session.hpp"

namespace rnr::service {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct Wire {
    std::optional<ClientId> to;
    std::shared_ptr<const std::string> text;
    MessageKind kind;
};

MessageKind kind_of(const ServerMessage& m) {
    if (std::holds_alternative<StateMsg>(m)) return MessageKind::State;
    if (std::holds_alternative<BeatMsg>(m)) return MessageKind::Beat;
    return MessageKind::Other;
}

}  // namespace

class Server::Impl {
public:
    class Connection;
    class HttpSession;

    Impl(Config config, std::uint64_t seed, ServerOptions options)
        : options_(std::move(options)), session_(config, seed), tick_hz_(config.tick_hz) {
        if (options_.scenario) {
            session_.load_scenario(load_script(*options_.scenario), options_.duration_s);
        }
    }

    ~Impl() { stop(); }

    void start() {
        const tcp::endpoint endpoint(net::ip::make_address(options_.address), options_.port);
        acceptor_.open(endpoint.protocol());
        acceptor_.set_option(net::socket_base::reuse_address(true));
        acceptor_.bind(endpoint);
        acceptor_.listen(net::socket_base::max_listen_connections);
        port_ = acceptor_.local_endpoint().port();
        do_accept();
        io_thread_ = std::thread([this] { ioc_.run(); });
        tick_thread_ = std::thread([this] { tick_loop(); });
    }

    void stop();

    std::uint16_t port() const { return port_; }

    // --- called on the I/O thread ---

    ClientId next_id() { return next_id_++; }

    void attach(ClientId id, std::shared_ptr<Connection> conn) {
        connections_[id] = std::move(conn);
        {
            std::lock_guard lock(inbox_mu_);
            first_client_ = true;
        }
        start_cv_.notify_all();
    }

    void detach(ClientId id) {
        if (connections_.erase(id) > 0) {
            std::lock_guard lock(inbox_mu_);
            inbox_.push_back({id, std::nullopt});
        }
    }

    void inbound(ClientId id, ClientMessage msg) {
        std::lock_guard lock(inbox_mu_);
        inbox_.push_back({id, std::move(msg)});
    }

    void deliver(const std::vector<Wire>& wires);

    ServerOptions options_;

private:
    struct Inbound {
        ClientId from;
        std::optional<ClientMessage> message;  // empty: client left
    };

    void do_accept();
    void tick_loop();

    net::io_context ioc_;
    tcp::acceptor acceptor_{ioc_};
    std::uint16_t port_ = 0;
    std::thread io_thread_;
    std::thread tick_thread_;
    std::atomic<bool> stopping_{false};

    // shared between threads, guarded by inbox_mu_
    std::mutex inbox_mu_;
    std::condition_variable start_cv_;
    std::vector<Inbound> inbox_;
    bool first_client_ = false;

    // I/O thread only
    std::map<ClientId, std::shared_ptr<Connection>> connections_;
    ClientId next_id_ = 1;

    // tick thread only
    LiveSession session_;
    double tick_hz_;
};

class Server::Impl::Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket&& socket, Impl& impl, ClientId id)
        : ws_(std::move(socket)),
          impl_(impl),
          id_(id),
          queue_(impl.options_.queue_soft_cap, impl.options_.queue_hard_cap) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
    }

    void send(const std::string& text, MessageKind kind) {
        if (closing_) {
            return;
        }
        if (queue_.push(text, kind) == OutboundQueue::Push::Overflow) {
            queue_.clear();
            queue_.push(encode(ServerMessage{ErrorMsg{"lagging", "outbound queue overflow; disconnecting"}}),
                        MessageKind::Other);
            closing_ = true;
        }
        if (!writing_) {
            do_write();
        }
    }

    void shutdown() {
        beast::error_code ec;
        beast::get_lowest_layer(ws_).socket().close(ec);
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) {
            return;
        }
        impl_.attach(id_, shared_from_this());
        do_read();
    }

    void do_read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            impl_.detach(id_);
            return;
        }
        const std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        auto decoded = decode_client(text);
        if (auto* err = std::get_if<ErrorMsg>(&decoded)) {
            send(encode(ServerMessage{*err}), MessageKind::Other);
        } else {
            impl_.inbound(id_, std::get<ClientMessage>(std::move(decoded)));
        }
        do_read();
    }

    void do_write() {
        auto next = queue_.pop();
        if (!next) {
            writing_ = false;
            if (closing_) {
                ws_.async_close(websocket::close_code::policy_error,
                                [self = shared_from_this()](beast::error_code) { self->impl_.detach(self->id_); });
            }
            return;
        }
        writing_ = true;
        current_ = std::move(*next);
        ws_.text(true);
        ws_.async_write(net::buffer(current_), beast::bind_front_handler(&Connection::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            writing_ = false;
            impl_.detach(id_);
            return;
        }
        do_write();
    }

    websocket::stream<beast::tcp_stream> ws_;
    Impl& impl_;
    ClientId id_;
    beast::flat_buffer buffer_;
    OutboundQueue queue_;
    std::string current_;
    bool writing_ = false;
    bool closing_ = false;
};

class Server::Impl::HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, Impl& impl) : stream_(std::move(socket)), impl_(impl) {}

    void run() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
    }

private:
    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            return;
        }
        if (websocket::is_upgrade(req_) && req_.target() == "/session") {
            stream_.expires_never();
            auto conn = std::make_shared<Connection>(stream_.release_socket(), impl_, impl_.next_id());
            conn->run(std::move(req_));
            return;
        }
        res_.version(req_.version());
        res_.set(http::field::content_type, "text/plain");
        if (req_.method() == http::verb::get && req_.target() == "/healthz") {
            res_.result(http::status::ok);
            res_.body() = "ok\n";
        } else {
            res_.result(http::status::not_found);
            res_.body() = "not found\n";
        }
        res_.keep_alive(false);
        res_.prepare_payload();
        http::async_write(stream_, res_, [self = shared_from_this()](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    beast::tcp_stream stream_;
    Impl& impl_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    http::response<http::string_body> res_;
};

void Server::Impl::stop() {
    if (stopping_.exchange(true)) {
        return;
    }
    start_cv_.notify_all();
    if (tick_thread_.joinable()) tick_thread_.join();
    ioc_.stop();
    if (io_thread_.joinable()) io_thread_.join();
    // the I/O thread is gone; close sockets so peers see the disconnect
    beast::error_code ec;
    acceptor_.close(ec);
    for (auto& [id, conn] : connections_) {
        conn->shutdown();
    }
    connections_.clear();
}

void Server::Impl::do_accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
        if (!ec) {
            std::make_shared<HttpSession>(std::move(socket), *this)->run();
        }
        if (!stopping_) {
            do_accept();
        }
    });
}

void Server::Impl::deliver(const std::vector<Wire>& wires) {
    for (const auto& w : wires) {
        if (w.to) {
            if (auto it = connections_.find(*w.to); it != connections_.end()) {
                it->second->send(*w.text, w.kind);
            }
            continue;
        }
        // send() may detach on a failed write; iterate over a snapshot
        std::vector<std::shared_ptr<Connection>> targets;
        targets.reserve(connections_.size());
        for (const auto& [id, conn] : connections_) {
            targets.push_back(conn);
        }
        for (const auto& conn : targets) {
            conn->send(*w.text, w.kind);
        }
    }
}

void Server::Impl::tick_loop() {
    {
        std::unique_lock lock(inbox_mu_);
        start_cv_.wait(lock, [this] { return first_client_ || stopping_; });
    }
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(1.0 / (tick_hz_ * options_.speed)));
    auto next = clock::now();

    while (!stopping_) {
        std::vector<Inbound> pending;
        {
            std::lock_guard lock(inbox_mu_);
            pending.swap(inbox_);
        }
        for (auto& in : pending) {
            if (in.message) {
                session_.submit(in.from, std::move(*in.message));
            } else {
                session_.client_left(in.from);
            }
        }

        auto out = session_.tick();
        if (!out.empty()) {
            std::vector<Wire> wires;
            wires.reserve(out.size());
            for (const auto& o : out) {
                wires.push_back({o.to, std::make_shared<const std::string>(encode(o.message)), kind_of(o.message)});
            }
            net::post(ioc_, [this, wires = std::move(wires)] { deliver(wires); });
        }

        next += period;
        const auto now = clock::now();
        if (now - next > 5 * period) {
            next = now;  // fell far behind; do not burst to catch up
        }
        std::this_thread::sleep_until(next);
    }
}

Server::Server(Config config, std::uint64_t seed, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), seed, std::move(options))) {}

Server::~Server() = default;

void Server::start() { impl_->start(); }

std::uint16_t Server::port() const { return impl_->port(); }

void Server::stop() { impl_->stop(); }

void Server::run_until_signal() {
    net::io_context signals_ioc;
    net::signal_set signals(signals_ioc, SIGINT, SIGTERM);
    signals.async_wait([](beast::error_code, int) {});
    signals_ioc.run();
    stop();
}

}  // namespace rnr::service
