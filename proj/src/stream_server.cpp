#include "retrax/stream_server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <cstdio>
#include <sstream>

#include "retrax/errors.hpp"

namespace retrax {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kPollSliceMs = 100;
constexpr auto kDrainTimeout = std::chrono::seconds(2);

bool write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

std::string error_line(const std::string& message, std::size_t lineno) {
    ojson j;
    j["error"] = message;
    j["line"] = lineno;
    return j.dump();
}

std::string make_session_id(std::size_t ordinal) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "session-%lld-%04zu", static_cast<long long>(ms), ordinal);
    return buf;
}

// After the last event: send FIN, then read and discard until the peer
// closes. Closing with unread input would make the kernel send RST, which
// can destroy events the client has not read yet.
void drain_and_close(int fd) {
    ::shutdown(fd, SHUT_WR);
    const auto deadline = Clock::now() + kDrainTimeout;
    char buf[4096];
    while (Clock::now() < deadline) {
        pollfd p{fd, POLLIN, 0};
        if (::poll(&p, 1, kPollSliceMs) <= 0) continue;
        const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
        if (n <= 0) break;
    }
    ::close(fd);
}

}  // namespace

std::string_view to_string(EndReason r) {
    switch (r) {
        case EndReason::LevelCompleted: return "LevelCompleted";
        case EndReason::ClientClosed: return "ClientClosed";
        case EndReason::IdleTimeout: return "IdleTimeout";
        case EndReason::ProtocolError: return "ProtocolError";
        case EndReason::ServerStopped: return "ServerStopped";
    }
    return "ClientClosed";
}

StreamServer::StreamServer(StreamConfig config) : config_(std::move(config)) {
    // Fail before accepting anything if the session setup is unusable.
    Session probe(config_.profile, config_.level, config_.params.engine, config_.params.guard);
    (void)probe;
    if (!(config_.idle_timeout_s > 0.0)) throw ConfigError("idle_timeout_s must be > 0");
}

StreamServer::~StreamServer() {
    stop();
    for (auto& t : workers_) {
        if (t.joinable()) t.join();
    }
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

std::uint16_t StreamServer::start() {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE | AI_NUMERICSERV;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(config_.port);
    const char* host = config_.bind_address.empty() ? nullptr : config_.bind_address.c_str();
    if (int rc = ::getaddrinfo(host, port.c_str(), &hints, &res); rc != 0) {
        throw ConfigError("cannot resolve bind address " + config_.bind_address + ": " + ::gai_strerror(rc));
    }

    std::string last_error = "no usable address";
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        const int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 16) == 0) {
            listen_fd_ = fd;
            break;
        }
        last_error = std::strerror(errno);
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (listen_fd_ < 0) throw ConfigError("cannot listen on " + config_.bind_address + ":" + port + ": " + last_error);

    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    if (addr.ss_family == AF_INET) {
        port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    } else {
        port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
    return port_;
}

void StreamServer::stop() { stopping_.store(true); }

void StreamServer::run() {
    if (listen_fd_ < 0) start();
    std::size_t accepted = 0;
    while (!stopping_.load()) {
        if (config_.max_connections != 0 && accepted >= config_.max_connections) break;
        pollfd p{listen_fd_, POLLIN, 0};
        const int rc = ::poll(&p, 1, kPollSliceMs);
        if (rc <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        const std::size_t ordinal = ++accepted;
        workers_.emplace_back([this, fd, ordinal] { serve_connection(fd, ordinal); });
    }
    for (auto& t : workers_) {
        if (t.joinable()) t.join();
    }
    workers_.clear();
}

std::vector<ConnectionResult> StreamServer::results() const {
    std::lock_guard lock(results_mutex_);
    return results_;
}

void StreamServer::serve_connection(int fd, std::size_t ordinal) {
    ConnectionResult result = drive_session(fd, ordinal);
    drain_and_close(fd);
    std::lock_guard lock(results_mutex_);
    results_.push_back(std::move(result));
}

ConnectionResult StreamServer::drive_session(int fd, std::size_t ordinal) {
    Session session(config_.profile, config_.level, config_.params.engine, config_.params.guard);
    ConnectionResult result;
    result.session_id = make_session_id(ordinal);

    const auto idle = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config_.idle_timeout_s));
    auto last_activity = Clock::now();
    std::string pending;
    std::size_t lineno = 0;
    bool open = true;
    char buf[8192];

    auto handle_line = [&](std::string line) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) return;
        try {
            const PoseSample sample = parse_sample(line);
            for (const auto& e : session.ingest(sample)) {
                if (!write_all(fd, event_line(e) + "\n")) {
                    open = false;
                    result.reason = EndReason::ClientClosed;
                }
                if (e.is<LevelCompleted>()) {
                    open = false;
                    result.reason = EndReason::LevelCompleted;
                }
            }
        } catch (const SessionClosedError&) {
            open = false;
        } catch (const Error& e) {
            ++result.error_lines;
            write_all(fd, error_line(e.what(), lineno) + "\n");
            if (config_.strict) {
                open = false;
                result.reason = EndReason::ProtocolError;
            }
        }
    };

    while (open) {
        if (stopping_.load()) {
            result.reason = EndReason::ServerStopped;
            break;
        }
        const auto now = Clock::now();
        if (now - last_activity >= idle) {
            result.reason = EndReason::IdleTimeout;
            break;
        }
        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(idle - (now - last_activity));
        pollfd p{fd, POLLIN, 0};
        const int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(remaining.count() + 1, kPollSliceMs)));
        if (rc < 0 && errno != EINTR) {
            result.reason = EndReason::ClientClosed;
            break;
        }
        if (rc <= 0) continue;

        const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            if (!pending.empty()) handle_line(std::exchange(pending, {}));
            if (open) result.reason = EndReason::ClientClosed;
            break;
        }
        last_activity = Clock::now();
        pending.append(buf, static_cast<std::size_t>(n));
        std::size_t start = 0;
        for (std::size_t nl; open && (nl = pending.find('\n', start)) != std::string::npos; start = nl + 1) {
            handle_line(pending.substr(start, nl - start));
        }
        pending.erase(0, std::min(start, pending.size()));
    }

    result.summary = session.finish();
    result.events = session.events();
    if (config_.store_dir) {
        SessionRecord record{result.session_id, config_.profile, config_.level, config_.params,
                             result.events,     result.summary, utc_timestamp(), kSchemaVersion};
        try {
            result.saved_dir = save_session(*config_.store_dir, record);
        } catch (const Error& e) {
            std::fprintf(stderr, "retrax: failed to save %s: %s\n", result.session_id.c_str(), e.what());
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

Trace receive_trace(const std::string& host, std::uint16_t port, double idle_timeout_s) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE | AI_NUMERICSERV;
    addrinfo* res = nullptr;
    const std::string p = std::to_string(port);
    if (int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), p.c_str(), &hints, &res); rc != 0) {
        throw ConfigError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    int lfd = -1;
    for (addrinfo* ai = res; ai != nullptr && lfd < 0; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        const int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 1) == 0) {
            lfd = fd;
        } else {
            ::close(fd);
        }
    }
    ::freeaddrinfo(res);
    if (lfd < 0) throw ConfigError("cannot listen on " + host + ":" + p);

    const int timeout_ms = static_cast<int>(idle_timeout_s * 1000.0);
    pollfd lp{lfd, POLLIN, 0};
    if (::poll(&lp, 1, timeout_ms) <= 0) {
        ::close(lfd);
        throw ConfigError("no client connected within the idle timeout");
    }
    const int fd = ::accept(lfd, nullptr, nullptr);
    ::close(lfd);
    if (fd < 0) throw ConfigError(std::string("accept failed: ") + std::strerror(errno));

    std::string data;
    char buf[8192];
    while (true) {
        pollfd cp{fd, POLLIN, 0};
        const int rc = ::poll(&cp, 1, timeout_ms);
        if (rc < 0 && errno == EINTR) continue;
        if (rc <= 0) break;
        const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        data.append(buf, static_cast<std::size_t>(n));
    }
    ::close(fd);
    std::istringstream in(data);
    return read_trace(in);
}

LineClient::LineClient(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_NUMERICSERV;
    addrinfo* res = nullptr;
    const std::string p = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), p.c_str(), &hints, &res); rc != 0) {
        throw ConfigError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            fd_ = fd;
            break;
        }
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw ConfigError("cannot connect to " + host + ":" + p);
}

LineClient::~LineClient() {
    if (fd_ >= 0) ::close(fd_);
}

bool LineClient::send_line(const std::string& line) { return write_all(fd_, line + "\n"); }

void LineClient::shutdown_write() { ::shutdown(fd_, SHUT_WR); }

std::optional<std::string> LineClient::read_line(std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    while (true) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (left.count() <= 0) return std::nullopt;
        pollfd p{fd_, POLLIN, 0};
        const int rc = ::poll(&p, 1, static_cast<int>(left.count()));
        if (rc < 0 && errno == EINTR) continue;
        if (rc <= 0) return std::nullopt;
        char buf[4096];
        const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return std::nullopt;
        buffer_.append(buf, static_cast<std::size_t>(n));
    }
}

}  // namespace retrax
