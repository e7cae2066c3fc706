#include "rag/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rag/error.hpp"
#include "rag/feasibility.hpp"
#include "rag/io.hpp"
#include "rag/risk.hpp"
#include "rag/service.hpp"

namespace rag::cli {

namespace {

struct Loaded {
    RiskGraph graph;
    Profile profile;
};

// Returns nullopt after filling `result` on failure.
std::optional<Loaded> load(const CommonOptions& options, CommandResult& result) {
    std::ifstream in(options.graph, std::ios::binary);
    if (!in) {
        result = {kParseFailure, "", "error: cannot read " + options.graph.string() + "\n"};
        return std::nullopt;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    RiskGraph graph;
    try {
        graph = parse_graph(buffer.str(), options.strict ? ParseMode::Strict : ParseMode::Lenient);
    } catch (const ParseError& e) {
        result = {kParseFailure, "", options.graph.string() + ": " + e.what() + "\n"};
        return std::nullopt;
    }
    try {
        Profile profile = graph_profile(graph, options.profile, profile_search_dirs());
        return Loaded{std::move(graph), std::move(profile)};
    } catch (const Error& e) {
        result = {kFailed, "", std::string("error: profile: ") + e.what() + "\n"};
        return std::nullopt;
    }
}

}  // namespace

CommandResult cmd_validate(const CommonOptions& options) {
    CommandResult result;
    auto loaded = load(options, result);
    if (!loaded) return result;
    ValidationReport report = validate(loaded->graph, loaded->profile);
    result.out = format_validation(report);
    result.exit_code = report.ok() ? kOk : kFailed;
    return result;
}

CommandResult cmd_evaluate(const EvaluateOptions& options) {
    CommandResult result;
    auto format = report_format_from_string(options.format);
    if (!format) return {kFailed, "", "error: unknown format '" + options.format + "'\n"};
    auto loaded = load(options, result);
    if (!loaded) return result;
    const auto& [graph, profile] = *loaded;
    try {
        Overlay overlay;
        for (const auto& id : options.disable) {
            if (id == "all")
                overlay.disabled.merge(disable_all(graph).disabled);
            else
                overlay.disabled.insert(id);
        }
        for (const auto& s : options.set) {
            auto [key, value] = parse_override(s, profile);
            overlay.rating_overrides[key] = value;
        }
        if (overlay.empty()) {
            result.out = emit_report(evaluate_graph(graph, profile), graph, profile, *format);
            return result;
        }
        WhatIfReport report = what_if(graph, profile, overlay);
        result.out = emit_report(report.evaluation, graph, profile, *format);
        if (*format == ReportFormat::Text) {
            std::ostringstream delta;
            delta << "\nChanges versus baseline:\n";
            const auto& risk = profile.risk_schema();
            for (const auto& r : report.risks)
                delta << "  " << r.consequence << ": " << risk.display(r.before) << " -> " << risk.display(r.after)
                      << "\n";
            for (const auto& f : report.feasibility)
                delta << "  " << f.node << ": " << profile.risk.feasibility << " " << f.before << " -> " << f.after
                      << "\n";
            result.out += delta.str();
        }
    } catch (const ValidationError& e) {
        return {kFailed, "", format_validation(e.report())};
    } catch (const Error& e) {
        return {kFailed, "", std::string("error: ") + e.what() + "\n"};
    }
    return result;
}

CommandResult cmd_critical_path(const CriticalPathOptions& options) {
    CommandResult result;
    if (options.format != "text" && options.format != "json")
        return {kFailed, "", "error: unknown format '" + options.format + "'\n"};
    auto loaded = load(options, result);
    if (!loaded) return result;
    const auto& [graph, profile] = *loaded;
    try {
        Evaluation ev = evaluate_graph(graph, profile);
        CriticalPath path = critical_path(ev, graph, options.consequence);
        const ConsequenceRisk& c = ev.consequences.at(options.consequence);
        if (options.format == "json") {
            nlohmann::json j = {{"consequence", options.consequence},
                                {"risk", c.risk},
                                {"edge", c.edge},
                                {"tree", path.tree},
                                {"path", path.nodes}};
            result.out = j.dump(2) + "\n";
            return result;
        }
        std::ostringstream out;
        out << (path.tree ? "Critical attack tree" : "Critical attack path") << " for " << options.consequence
            << " (risk " << profile.risk_schema().display(c.risk) << "):\n";
        for (const Id& id : path.nodes) {
            const Node* n = graph.find_node(id);
            out << "  " << id << "  " << n->label << "  " << profile.risk.feasibility << " "
                << ev.nodes.at(id).feasibility << "\n";
        }
        result.out = out.str();
    } catch (const ValidationError& e) {
        return {kFailed, "", format_validation(e.report())};
    } catch (const Error& e) {
        return {kFailed, "", std::string("error: ") + e.what() + "\n"};
    }
    return result;
}

int run(int argc, char** argv) {
    CLI::App app{"Risk assessment graph engine"};
    app.require_subcommand(1);

    CommonOptions validate_opts;
    auto* validate_cmd = app.add_subcommand("validate", "Check a graph against its profile");
    validate_cmd->add_option("graph", validate_opts.graph, "Graph file (.rag)")->required();
    validate_cmd->add_option("--profile", validate_opts.profile, "Profile name or .ragp path");
    validate_cmd->add_flag("--strict", validate_opts.strict, "Reject unknown fields");

    EvaluateOptions eval_opts;
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate feasibility and risk");
    eval_cmd->add_option("graph", eval_opts.graph, "Graph file (.rag)")->required();
    eval_cmd->add_option("--profile", eval_opts.profile, "Profile name or .ragp path");
    eval_cmd->add_flag("--strict", eval_opts.strict, "Reject unknown fields");
    eval_cmd->add_option("--format", eval_opts.format, "text, json or dot")
        ->check(CLI::IsMember({"text", "json", "dot"}));
    eval_cmd->add_option("--disable", eval_opts.disable, "Countermeasure id to disable, or 'all'");
    eval_cmd->add_option("--set", eval_opts.set, "Override as node.attribute=rank");

    CriticalPathOptions path_opts;
    auto* path_cmd = app.add_subcommand("critical-path", "Show the critical attack path of a consequence");
    path_cmd->add_option("graph", path_opts.graph, "Graph file (.rag)")->required();
    path_cmd->add_option("--profile", path_opts.profile, "Profile name or .ragp path");
    path_cmd->add_flag("--strict", path_opts.strict, "Reject unknown fields");
    path_cmd->add_option("--consequence", path_opts.consequence, "Consequence node id")->required();
    path_cmd->add_option("--format", path_opts.format, "text or json")->check(CLI::IsMember({"text", "json"}));

    ServiceConfig serve_opts;
    std::string host = "127.0.0.1";
    int port = 8080;
    int timeout = static_cast<int>(serve_opts.session_timeout.count());
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP evaluation service");
    serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--graph-dir", serve_opts.graph_dir, "Directory of .rag files");
    serve_cmd->add_option("--ui-dir", serve_opts.ui_dir, "Static UI bundle to serve at /");
    serve_cmd->add_option("--session-timeout", timeout, "Idle seconds before a session expires")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kParseFailure;
    }

    CommandResult result;
    if (*validate_cmd) {
        result = cmd_validate(validate_opts);
    } else if (*eval_cmd) {
        result = cmd_evaluate(eval_opts);
    } else if (*path_cmd) {
        result = cmd_critical_path(path_opts);
    } else {
        serve_opts.session_timeout = std::chrono::seconds(timeout);
        serve_opts.profile_dirs = profile_search_dirs();
        return serve(serve_opts, host, port, std::cerr);
    }
    std::cout << result.out;
    std::cerr << result.err;
    return result.exit_code;
}

}  // namespace rag::cli
