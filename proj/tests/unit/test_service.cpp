#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>

#include "helpers.hpp"
#include "rag/service.hpp"

using namespace rag;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct GraphDir {
    GraphDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("rag-service-" + std::to_string(rd()));
        fs::create_directories(path);
        for (const char* name : {"weiss-din.rag", "gates.rag", "cyclic.rag"})
            fs::copy_file(fixture::path(name), path / name);
    }
    ~GraphDir() { fs::remove_all(path); }

    ServiceConfig config() const {
        ServiceConfig c;
        c.graph_dir = path;
        return c;
    }

    fs::path path;
};

json body(const HttpResponse& r) { return json::parse(r.body); }

void check_error(const HttpResponse& r, int status, const std::string& code) {
    CHECK(r.status == status);
    auto doc = body(r);
    CHECK(doc.at("code") == code);
    CHECK(doc.contains("message"));
    CHECK(doc.contains("path"));
}

}  // namespace

TEST_CASE("graph listing and retrieval") {
    GraphDir dir;
    Service service(dir.config());
    auto list = body(service.list_graphs());
    REQUIRE(list.at("graphs").size() == 3);
    CHECK(list.at("graphs")[0].at("id") == "cyclic");
    CHECK(list.at("graphs")[2].at("id") == "weiss-din");
    CHECK(list.at("graphs")[2].at("profile") == "din-vde-0831-104");

    auto got = service.get_graph("gates");
    CHECK(got.status == 200);
    CHECK(parse_graph(got.body) == fixture::graph("gates.rag"));
    check_error(service.get_graph("nope"), 404, "unknown_graph");
    check_error(service.get_graph("../etc"), 400, "bad_graph_id");
}

TEST_CASE("saving a graph writes it and reports validation") {
    GraphDir dir;
    Service service(dir.config());
    auto saved = service.save_graph("copy", fixture::text("minimal.rag"));
    CHECK(saved.status == 200);
    CHECK(body(saved).at("validation").at("valid") == true);
    CHECK(parse_graph(service.get_graph("copy").body) == fixture::graph("minimal.rag"));
    check_error(service.save_graph("broken", "{"), 400, "parse_error");
    CHECK_FALSE(fs::exists(dir.path / "broken.rag"));
}

TEST_CASE("profiles are listed") {
    Service service(ServiceConfig{});
    auto doc = body(service.list_profiles());
    std::set<std::string> names;
    for (const auto& p : doc.at("profiles")) names.insert(p.at("name").get<std::string>());
    CHECK(names.count(kDinProfile));
    CHECK(names.count(kIsoProfile));
    CHECK(names.count(kClcProfile));
}

TEST_CASE("evaluate by id or inline, with an overlay") {
    GraphDir dir;
    Service service(dir.config());
    auto g = fixture::graph("weiss-din.rag");
    auto expected = emit_report(evaluate_graph(g, fixture::din()), g, fixture::din(), ReportFormat::Json);
    CHECK(service.evaluate(R"({"graph_id": "weiss-din"})").body == expected);
    json inline_request = {{"graph", json::parse(fixture::text("weiss-din.rag"))}};
    CHECK(service.evaluate(inline_request.dump()).body == expected);

    auto off = service.evaluate(R"({"graph_id": "weiss-din", "overlay": {"disabled": ["physical-access-restriction"]}})");
    CHECK(body(off).at("nodes").at("break-in").at("feasibility") == 4);

    auto explicit_profile = service.evaluate(R"({"graph_id": "gates", "profile": "din-vde-0831-104"})");
    CHECK(explicit_profile.status == 200);
}

TEST_CASE("evaluate errors") {
    GraphDir dir;
    Service service(dir.config());
    check_error(service.evaluate("not json"), 400, "malformed_body");
    check_error(service.evaluate("[]"), 400, "malformed_body");
    check_error(service.evaluate("{}"), 400, "malformed_body");
    check_error(service.evaluate(R"({"graph_id": "ghost"})"), 404, "unknown_graph");
    check_error(service.evaluate(R"({"graph_id": "weiss-din", "profile": "nope"})"), 400, "profile_error");
    check_error(service.evaluate(R"({"graph_id": "cyclic"})"), 422, "invalid_graph");
    check_error(service.evaluate(R"({"graph_id": "weiss-din", "overlay": {"disabled": ["moat"]}})"), 422, "unknown_target");
    auto bad_graph = service.evaluate(R"({"graph": {"format_version": "1", "nodes": 3, "edges": []}})");
    check_error(bad_graph, 400, "parse_error");
    CHECK(body(bad_graph).at("path") == "/graph/nodes");
}

TEST_CASE("whatif sessions keep the overlay") {
    GraphDir dir;
    Service service(dir.config());
    auto first = body(service.whatif(R"({"graph_id": "weiss-din", "overlay": {"disabled": ["firewall"]}, "baseline": true})"));
    std::string token = first.at("session");
    CHECK(token.size() == 32);
    CHECK(first.contains("baseline"));
    CHECK(first.at("overlay").at("disabled") == json::array({"firewall"}));
    CHECK(first.contains("risk_changes"));

    json again = {{"graph_id", "weiss-din"}, {"session", token}};
    auto second = body(service.whatif(again.dump()));
    CHECK(second.at("session") == token);
    CHECK(second.at("overlay") == first.at("overlay"));
    CHECK_FALSE(second.contains("baseline"));

    json reset = {{"graph_id", "weiss-din"}, {"session", token}, {"overlay", {{"disabled", json::array()}}}};
    auto third = body(service.whatif(reset.dump()));
    CHECK(third.at("feasibility_changes").empty());

    check_error(service.whatif(R"({"graph_id": "weiss-din", "session": "0000"})"), 404, "unknown_session");
}

TEST_CASE("sessions expire after the idle timeout") {
    SessionStore store(std::chrono::seconds(10));
    auto t0 = SessionStore::Clock::now();
    auto token = store.create({}, t0);
    CHECK(store.update(token, [](Overlay& o) { o.disabled.insert("x"); }, t0 + std::chrono::seconds(5)));
    CHECK(store.update(token, [](Overlay&) {}, t0 + std::chrono::seconds(14)));
    CHECK(store.size(t0 + std::chrono::seconds(14)) == 1);
    CHECK_FALSE(store.update(token, [](Overlay&) {}, t0 + std::chrono::seconds(25)));
    CHECK(store.size(t0 + std::chrono::seconds(25)) == 0);
}

TEST_CASE("concurrent session updates are not lost") {
    SessionStore store(std::chrono::seconds(60));
    auto token = store.create({});
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 100; ++i)
                store.update(token, [&](Overlay& o) { o.disabled.insert(std::to_string(t * 100 + i)); });
        });
    for (auto& th : threads) th.join();
    std::size_t count = 0;
    store.update(token, [&](Overlay& o) { count = o.disabled.size(); });
    CHECK(count == 800);
}

TEST_CASE("HTTP server end to end") {
    GraphDir dir;
    HttpServer server(dir.config());
    REQUIRE(server.bind("127.0.0.1", 0));
    std::thread runner([&] { server.run(); });
    httplib::Client client("127.0.0.1", server.port());
    for (int i = 0; i < 100 && !client.Get("/api/v1/profiles"); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));

    auto graphs = client.Get("/api/v1/graphs");
    REQUIRE(graphs);
    CHECK(graphs->status == 200);
    CHECK(json::parse(graphs->body).at("graphs").size() == 3);

    auto evaluated = client.Post("/api/v1/evaluate", R"({"graph_id": "gates"})", "application/json");
    REQUIRE(evaluated);
    CHECK(evaluated->status == 200);
    CHECK(json::parse(evaluated->body).at("consequences").at("outage").at("risk") == 3);

    auto malformed = client.Post("/api/v1/evaluate", "{nope", "application/json");
    REQUIRE(malformed);
    CHECK(malformed->status == 400);
    CHECK(json::parse(malformed->body).at("code") == "malformed_body");

    auto missing = client.Get("/api/v1/elsewhere");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body).at("code") == "not_found");

    HttpServer second(dir.config());
    CHECK_FALSE(second.bind("127.0.0.1", server.port()));

    server.stop();
    runner.join();
}

TEST_CASE("serve reports an occupied port") {
    HttpServer holder(ServiceConfig{});
    REQUIRE(holder.bind("127.0.0.1", 0));
    std::ostringstream log;
    CHECK(serve(ServiceConfig{}, "127.0.0.1", holder.port(), log) == 1);
    CHECK(log.str().find("cannot listen") != std::string::npos);
}
