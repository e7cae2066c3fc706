#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rag/countermeasures.hpp"

namespace rag {

struct ServiceConfig {
    std::filesystem::path graph_dir = ".";
    std::optional<std::filesystem::path> ui_dir;
    std::vector<std::filesystem::path> profile_dirs;
    std::chrono::seconds session_timeout{3600};
};

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// What-if overlays keyed by opaque tokens, expiring after an idle timeout.
class SessionStore {
public:
    using Clock = std::chrono::steady_clock;

    explicit SessionStore(std::chrono::seconds timeout) : timeout_(timeout) {}

    std::string create(const Overlay& overlay, Clock::time_point now = Clock::now());
    /// Atomically reads the overlay for `token`, lets `update` modify it and
    /// stores the result. Returns false for unknown or expired tokens.
    template <typename F>
    bool update(const std::string& token, F&& update, Clock::time_point now = Clock::now()) {
        std::lock_guard lock(mutex_);
        expire(now);
        auto it = sessions_.find(token);
        if (it == sessions_.end()) return false;
        update(it->second.overlay);
        it->second.last_used = now;
        return true;
    }
    std::size_t size(Clock::time_point now = Clock::now());

private:
    struct Session {
        Overlay overlay;
        Clock::time_point last_used;
    };
    void expire(Clock::time_point now);

    std::chrono::seconds timeout_;
    std::mutex mutex_;
    std::map<std::string, Session> sessions_;
};

/// Request handling, independent of the socket layer.
class Service {
public:
    explicit Service(ServiceConfig config);

    HttpResponse list_graphs() const;
    HttpResponse get_graph(const std::string& id) const;
    HttpResponse save_graph(const std::string& id, const std::string& body) const;
    HttpResponse list_profiles() const;
    HttpResponse evaluate(const std::string& body) const;
    HttpResponse whatif(const std::string& body);

    const ServiceConfig& config() const noexcept { return config_; }
    SessionStore& sessions() noexcept { return sessions_; }

private:
    ServiceConfig config_;
    SessionStore sessions_;
};

/// Error body {code, message, path}.
HttpResponse error_response(int status, const std::string& code, const std::string& message,
                            const std::string& path = "");

/// The service behind an HTTP listener.
class HttpServer {
public:
    explicit HttpServer(ServiceConfig config);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Port 0 picks a free port. Returns false when binding fails.
    bool bind(const std::string& host, int port);
    int port() const noexcept { return port_; }
    /// Blocks until stop().
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

/// Binds and serves until stopped. Returns 1 when the port cannot be bound.
int serve(const ServiceConfig& config, const std::string& host, int port, std::ostream& log);

}  // namespace rag
