#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "retrax/calibration.hpp"
#include "retrax/session.hpp"
#include "retrax/session_io.hpp"

namespace retrax {

struct StreamConfig {
    std::string bind_address = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks an ephemeral port
    CalibrationProfile profile;
    LevelSpec level;
    Params params;
    double idle_timeout_s = 30.0;
    bool strict = false;  // close the connection on the first bad line
    std::optional<std::filesystem::path> store_dir;  // session directories are written here
    std::size_t max_connections = 0;  // stop accepting after this many; 0 = unlimited
};

enum class EndReason { LevelCompleted, ClientClosed, IdleTimeout, ProtocolError, ServerStopped };

std::string_view to_string(EndReason r);

struct ConnectionResult {
    std::string session_id;
    EndReason reason = EndReason::ClientClosed;
    SessionSummary summary;
    std::vector<SessionEvent> events;
    std::size_t error_lines = 0;
    std::optional<std::filesystem::path> saved_dir;
};

/// Line-oriented TCP endpoint. Each connection gets its own Session: inbound
/// lines are pose JSONL records, outbound lines are SessionEvent JSONL written
/// as soon as they are produced. Connections are served on independent
/// threads and share nothing but the results list.
class StreamServer {
  public:
    explicit StreamServer(StreamConfig config);
    ~StreamServer();

    StreamServer(const StreamServer&) = delete;
    StreamServer& operator=(const StreamServer&) = delete;

    /// Binds and listens; returns the bound port. Throws Error on failure.
    std::uint16_t start();

    /// Accept loop. Returns after stop() or once max_connections connections
    /// have been accepted and served.
    void run();

    /// Thread-safe; makes run() return and open connections finish.
    void stop();

    std::uint16_t port() const { return port_; }

    std::vector<ConnectionResult> results() const;

  private:
    void serve_connection(int fd, std::size_t ordinal);
    ConnectionResult drive_session(int fd, std::size_t ordinal);

    StreamConfig config_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::vector<std::thread> workers_;
    mutable std::mutex results_mutex_;
    std::vector<ConnectionResult> results_;
};

/// Accepts one connection on host:port and reads pose lines until the client
/// closes or stays silent for idle_timeout_s. Used for calibration capture.
Trace receive_trace(const std::string& host, std::uint16_t port, double idle_timeout_s);

/// Minimal blocking line client, used by tests and tooling.
class LineClient {
  public:
    LineClient(const std::string& host, std::uint16_t port);
    ~LineClient();

    LineClient(const LineClient&) = delete;
    LineClient& operator=(const LineClient&) = delete;

    /// Returns false if the peer has gone away.
    bool send_line(const std::string& line);

    /// Next line without the newline, or nullopt on EOF/timeout.
    std::optional<std::string> read_line(std::chrono::milliseconds timeout = std::chrono::seconds(10));

    /// Half-closes the write side so the server sees end of stream.
    void shutdown_write();

  private:
    int fd_ = -1;
    std::string buffer_;
};

}  // namespace retrax
