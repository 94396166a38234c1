#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "lbdx/pipeline.hpp"

namespace httplib {
class Server;
}

namespace lbdx::service {

using pipeline::Snapshot;

/// Query string parameters; same shape as httplib::Params.
using Query = std::multimap<std::string, std::string>;

struct Response {
    int status = 200;
    std::string body;
    std::map<std::string, std::string> headers;
};

/// Read-only JSON API over an immutable snapshot. Every handler is a pure
/// function of the snapshot and the request, so handlers can run on any
/// number of threads. The snapshot can be swapped atomically.
class Api {
public:
    explicit Api(std::shared_ptr<const Snapshot> snapshot = nullptr);

    void replace_snapshot(std::shared_ptr<const Snapshot> snapshot);
    std::shared_ptr<const Snapshot> snapshot() const;

    /// Route a GET request. `path` excludes the query string.
    Response handle(std::string_view path, const Query &query) const;

    Response entry_points() const;
    Response entry_point(std::string_view id) const;
    Response documents(const Query &query) const;
    Response token_frequencies(const Query &query) const;
    Response document(std::string_view id, const Query &query) const;
    Response meta() const;

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors_origin = "*";
    /// Optional directory served at "/" (the browser client bundle).
    std::string static_dir;
};

/// HTTP front end for Api, backed by cpp-httplib.
class Server {
public:
    Server(std::shared_ptr<Api> api, ServerOptions options);
    ~Server();
    Server(const Server &) = delete;
    Server &operator=(const Server &) = delete;

    /// Bind the listening socket. Returns false if the port is unavailable.
    /// Port 0 binds an ephemeral port; see port().
    bool bind();
    int port() const noexcept { return port_; }
    /// Serve until stop() is called. Requires a successful bind().
    bool listen();
    /// Safe to call from any thread, including before listen() has started
    /// accepting.
    void stop();
    void wait_until_ready() const;

private:
    std::shared_ptr<Api> api_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> server_;
    int port_ = 0;
    std::atomic<bool> listening_{false};
    std::atomic<bool> stop_requested_{false};
    std::atomic<bool> finished_{false};
};

}  // namespace lbdx::service
