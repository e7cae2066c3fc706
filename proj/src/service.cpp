#include "rag/service.hpp"

#include <fstream>
#include <iomanip>
#include <random>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "rag/error.hpp"
#include "rag/feasibility.hpp"
#include "rag/io.hpp"

namespace rag {

using nlohmann::json;

std::string SessionStore::create(const Overlay& overlay, Clock::time_point now) {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream token;
    token << std::hex << std::setfill('0') << std::setw(16) << rng() << std::setw(16) << rng();
    std::lock_guard lock(mutex_);
    expire(now);
    sessions_[token.str()] = {overlay, now};
    return token.str();
}

std::size_t SessionStore::size(Clock::time_point now) {
    std::lock_guard lock(mutex_);
    expire(now);
    return sessions_.size();
}

void SessionStore::expire(Clock::time_point now) {
    std::erase_if(sessions_, [&](const auto& s) { return now - s.second.last_used > timeout_; });
}

HttpResponse error_response(int status, const std::string& code, const std::string& message,
                            const std::string& path) {
    return {status, json{{"code", code}, {"message", message}, {"path", path}}.dump(2) + "\n"};
}

namespace {

HttpResponse ok(const json& body) { return {200, body.dump(2) + "\n"}; }

bool safe_id(const std::string& id) {
    static const std::regex pattern("[A-Za-z0-9_][A-Za-z0-9_.-]*");
    return std::regex_match(id, pattern) && id.find("..") == std::string::npos;
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

HttpResponse from_parse_error(const ParseError& e, const std::string& prefix) {
    return error_response(400, "parse_error", e.what(), prefix + e.path());
}

struct Target {
    RiskGraph graph;
    Profile profile;
    json request;
};

// Reads {graph_id | graph, profile} from a request body.
std::variant<Target, HttpResponse> resolve(const ServiceConfig& config, const std::string& body) {
    json request;
    try {
        request = json::parse(body);
    } catch (const json::exception& e) {
        return error_response(400, "malformed_body", e.what());
    }
    if (!request.is_object()) return error_response(400, "malformed_body", "expected a JSON object");
    RiskGraph graph;
    try {
        if (auto it = request.find("graph"); it != request.end()) {
            graph = graph_from_json(*it, ParseMode::Lenient);
        } else if (auto id = request.find("graph_id"); id != request.end() && id->is_string()) {
            std::string gid = id->get<std::string>();
            if (!safe_id(gid)) return error_response(400, "bad_graph_id", "invalid graph id", "/graph_id");
            auto text = read_file(config.graph_dir / (gid + ".rag"));
            if (!text) return error_response(404, "unknown_graph", "no graph '" + gid + "'", "/graph_id");
            graph = parse_graph(*text, ParseMode::Lenient);
        } else {
            return error_response(400, "malformed_body", "request needs 'graph_id' or 'graph'");
        }
    } catch (const ParseError& e) {
        return from_parse_error(e, request.contains("graph") ? "/graph" : "");
    }
    std::optional<std::string> profile_name;
    if (auto it = request.find("profile"); it != request.end() && !it->is_null()) {
        if (!it->is_string()) return error_response(400, "malformed_body", "expected a profile name", "/profile");
        profile_name = it->get<std::string>();
    }
    try {
        Profile profile = graph_profile(graph, profile_name, config.profile_dirs);
        return Target{std::move(graph), std::move(profile), std::move(request)};
    } catch (const Error& e) {
        return error_response(400, "profile_error", e.what(), "/profile");
    }
}

template <typename F>
HttpResponse guarded(F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        const auto& v = e.report().violations.front();
        return error_response(422, "invalid_graph", e.what(), v.subject);
    } catch (const ParseError& e) {
        return from_parse_error(e, "");
    } catch (const UnknownTarget& e) {
        return error_response(422, "unknown_target", e.what(), "/overlay");
    } catch (const OutOfDomain& e) {
        return error_response(422, "out_of_domain", e.what(), "/overlay");
    } catch (const Error& e) {
        return error_response(422, "evaluation_error", e.what());
    }
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)), sessions_(config_.session_timeout) {}

HttpResponse Service::list_graphs() const {
    json graphs = json::array();
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(config_.graph_dir, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".rag") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        json item = {{"id", path.stem().string()}};
        if (auto text = read_file(path)) {
            try {
                RiskGraph g = parse_graph(*text, ParseMode::Lenient);
                item["profile"] = g.profile_name();
                item["metadata"] = g.metadata();
            } catch (const ParseError& e) {
                item["error"] = e.what();
            }
        }
        graphs.push_back(std::move(item));
    }
    return ok({{"graphs", std::move(graphs)}});
}

HttpResponse Service::get_graph(const std::string& id) const {
    if (!safe_id(id)) return error_response(400, "bad_graph_id", "invalid graph id");
    auto text = read_file(config_.graph_dir / (id + ".rag"));
    if (!text) return error_response(404, "unknown_graph", "no graph '" + id + "'");
    try {
        return ok(graph_to_json(parse_graph(*text, ParseMode::Lenient)));
    } catch (const ParseError& e) {
        return error_response(500, "stored_graph_unreadable", e.what(), e.path());
    }
}

HttpResponse Service::save_graph(const std::string& id, const std::string& body) const {
    if (!safe_id(id)) return error_response(400, "bad_graph_id", "invalid graph id");
    RiskGraph graph;
    try {
        graph = parse_graph(body, ParseMode::Strict);
    } catch (const ParseError& e) {
        return from_parse_error(e, "");
    }
    json response = {{"id", id}};
    try {
        Profile profile = graph_profile(graph, std::nullopt, config_.profile_dirs);
        response["validation"] = validation_to_json(validate(graph, profile));
    } catch (const Error& e) {
        return error_response(400, "profile_error", e.what(), "/profile");
    }
    auto target = config_.graph_dir / (id + ".rag");
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << serialize_graph(graph);
        if (!out) return error_response(500, "write_failed", "cannot write graph '" + id + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) return error_response(500, "write_failed", ec.message());
    return ok(response);
}

HttpResponse Service::list_profiles() const {
    json profiles = json::array();
    for (const auto& name : available_profiles(config_.profile_dirs)) {
        try {
            profiles.push_back(serialize_profile(resolve_profile(name, config_.profile_dirs)));
        } catch (const Error& e) {
            profiles.push_back({{"name", name}, {"error", e.what()}});
        }
    }
    return ok({{"profiles", std::move(profiles)}});
}

HttpResponse Service::evaluate(const std::string& body) const {
    auto resolved = resolve(config_, body);
    if (auto* r = std::get_if<HttpResponse>(&resolved)) return *r;
    auto& t = std::get<Target>(resolved);
    return guarded([&] {
        Overlay overlay;
        if (auto it = t.request.find("overlay"); it != t.request.end()) overlay = overlay_from_json(*it, t.profile);
        Evaluation ev = evaluate_graph(t.graph, t.profile, overlay);
        return HttpResponse{200, emit_report(ev, t.graph, t.profile, ReportFormat::Json)};
    });
}

HttpResponse Service::whatif(const std::string& body) {
    auto resolved = resolve(config_, body);
    if (auto* r = std::get_if<HttpResponse>(&resolved)) return *r;
    auto& t = std::get<Target>(resolved);
    return guarded([&] {
        std::optional<Overlay> requested;
        if (auto it = t.request.find("overlay"); it != t.request.end())
            requested = overlay_from_json(*it, t.profile);
        bool with_baseline = t.request.value("baseline", false);

        std::string token;
        Overlay overlay;
        if (auto it = t.request.find("session"); it != t.request.end() && it->is_string()) {
            token = it->get<std::string>();
            bool found = sessions_.update(token, [&](Overlay& stored) {
                if (requested) {
                    check_overlay(t.graph, t.profile, *requested);
                    stored = *requested;
                }
                overlay = stored;
            });
            if (!found) return error_response(404, "unknown_session", "session expired or unknown", "/session");
        } else {
            overlay = requested.value_or(Overlay{});
            check_overlay(t.graph, t.profile, overlay);
            token = sessions_.create(overlay);
        }

        WhatIfReport report = what_if(t.graph, t.profile, overlay);
        json out = what_if_to_json(report);
        if (!with_baseline) out.erase("baseline");
        out["session"] = token;
        out["overlay"] = overlay_to_json(overlay);
        return ok(out);
    });
}

struct HttpServer::Impl {
    explicit Impl(ServiceConfig config) : service(std::move(config)) {}
    Service service;
    httplib::Server server;
};

HttpServer::HttpServer(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
    auto& service = impl_->service;
    auto& server = impl_->server;
    // the library default adds SO_REUSEPORT, which would let a second server
    // share an occupied port
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    auto reply = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get("/api/v1/graphs", [&service, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, service.list_graphs());
    });
    server.Get(R"(/api/v1/graphs/([^/]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.get_graph(req.matches[1]));
    });
    server.Post(R"(/api/v1/graphs/([^/]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.save_graph(req.matches[1], req.body));
    });
    server.Get("/api/v1/profiles", [&service, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, service.list_profiles());
    });
    server.Post("/api/v1/evaluate", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.evaluate(req.body));
    });
    server.Post("/api/v1/whatif", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.whatif(req.body));
    });
    const auto& ui = service.config().ui_dir;
    if (ui && std::filesystem::is_directory(*ui)) server.set_mount_point("/", ui->string());
    server.set_error_handler([reply](const httplib::Request& req, httplib::Response& res) {
        if (res.status == 404 && res.body.empty())
            reply(res, error_response(404, "not_found", "no route for " + req.method + " " + req.path, req.path));
    });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        return port_ > 0;
    }
    if (!impl_->server.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

int serve(const ServiceConfig& config, const std::string& host, int port, std::ostream& log) {
    HttpServer server(config);
    if (!server.bind(host, port)) {
        log << "error: cannot listen on " << host << ":" << port << " (port in use?)\n";
        return 1;
    }
    log << "listening on http://" << host << ":" << server.port() << "\n";
    return server.run() ? 0 : 1;
}

}  // namespace rag
