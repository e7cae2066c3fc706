#include <algorithm>
#include <set>
#include <sstream>

#include "rag/error.hpp"
#include "rag/io.hpp"

namespace rag {

using nlohmann::json;

std::optional<ReportFormat> report_format_from_string(std::string_view text) {
    if (text == "text") return ReportFormat::Text;
    if (text == "json") return ReportFormat::Json;
    if (text == "dot") return ReportFormat::Dot;
    return std::nullopt;
}

json evaluation_to_json(const Evaluation& ev) {
    json nodes = json::object();
    for (const auto& [id, r] : ev.nodes) {
        nodes[id] = {{"attributes", r.attributes}, {"original", r.original},   {"stages", r.stages},
                     {"feasibility", r.feasibility}, {"connector", r.connector}, {"selected", r.selected}};
    }
    json edges = json::object();
    for (const auto& [id, e] : ev.edges) {
        edges[id] = {{"consequence", e.consequence}, {"topmost", e.topmost},
                     {"impact", e.impact},           {"original_impact", e.original_impact},
                     {"feasibility", e.feasibility}, {"risk", e.risk}};
    }
    json consequences = json::object();
    for (const auto& [id, c] : ev.consequences) {
        consequences[id] = {{"risk", c.risk},
                            {"edge", c.edge},
                            {"critical_path", c.critical_path},
                            {"critical_tree", c.critical_tree},
                            {"multi_edge", c.multi_edge}};
    }
    return {{"profile", ev.profile},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)},
            {"consequences", std::move(consequences)},
            {"countermeasures", ev.countermeasures},
            {"diagnostics", ev.diagnostics}};
}

Evaluation evaluation_from_json(const json& doc) {
    try {
        Evaluation ev;
        ev.profile = doc.at("profile").get<std::string>();
        for (const auto& [id, j] : doc.at("nodes").items()) {
            NodeResult r;
            r.attributes = j.at("attributes").get<AttributeMap>();
            r.original = j.at("original").get<AttributeMap>();
            r.stages = j.at("stages").get<std::map<std::string, Rank>>();
            r.feasibility = j.at("feasibility").get<Rank>();
            r.connector = j.at("connector").get<std::string>();
            r.selected = j.at("selected").get<std::vector<Id>>();
            ev.nodes[id] = std::move(r);
        }
        for (const auto& [id, j] : doc.at("edges").items()) {
            ev.edges[id] = {j.at("consequence").get<Id>(), j.at("topmost").get<Id>(),
                            j.at("impact").get<Rank>(),    j.at("original_impact").get<Rank>(),
                            j.at("feasibility").get<Rank>(), j.at("risk").get<Rank>()};
        }
        for (const auto& [id, j] : doc.at("consequences").items()) {
            ConsequenceRisk c;
            c.risk = j.at("risk").get<Rank>();
            c.edge = j.at("edge").get<Id>();
            c.critical_path = j.at("critical_path").get<std::vector<Id>>();
            c.critical_tree = j.at("critical_tree").get<bool>();
            c.multi_edge = j.at("multi_edge").get<bool>();
            ev.consequences[id] = std::move(c);
        }
        ev.countermeasures = doc.at("countermeasures").get<std::map<Id, bool>>();
        ev.diagnostics = doc.at("diagnostics").get<std::vector<std::string>>();
        return ev;
    } catch (const json::exception& e) {
        throw ParseError(0, 0, "", std::string("malformed evaluation: ") + e.what());
    }
}

json what_if_to_json(const WhatIfReport& report) {
    json risks = json::array();
    for (const auto& r : report.risks)
        risks.push_back({{"consequence", r.consequence}, {"before", r.before}, {"after", r.after}});
    json feas = json::array();
    for (const auto& f : report.feasibility)
        feas.push_back({{"node", f.node}, {"before", f.before}, {"after", f.after}});
    return {{"baseline", evaluation_to_json(report.baseline)},
            {"evaluation", evaluation_to_json(report.evaluation)},
            {"risk_changes", std::move(risks)},
            {"feasibility_changes", std::move(feas)}};
}

namespace {

std::string label_or_id(const RiskGraph& graph, const Id& id) {
    const Node* n = graph.find_node(id);
    return n && !n->label.empty() ? n->label : id;
}

std::string text_report(const Evaluation& ev, const RiskGraph& graph, const Profile& profile) {
    const AttributeSchema& risk = profile.risk_schema();
    const AttributeSchema& feas = profile.feasibility_schema();
    std::ostringstream out;
    out << "Profile: " << ev.profile << "\n\n";
    out << "Consequence | " << profile.risk.impact << " | " << profile.risk.feasibility << " | Risk\n";
    for (const auto& [cid, c] : ev.consequences) {
        const EdgeRisk& e = ev.edges.at(c.edge);
        out << label_or_id(graph, cid) << " | " << e.impact << " | " << e.feasibility << " | "
            << risk.display(c.risk) << "\n";
    }
    for (const Node& n : graph.nodes())
        if (n.kind == NodeKind::Consequence && !ev.consequences.contains(n.id))
            out << label_or_id(graph, n.id) << " | - | - | not linked\n";

    for (const auto& [cid, c] : ev.consequences) {
        out << "\n" << (c.critical_tree ? "Critical attack tree" : "Critical attack path") << " for "
            << label_or_id(graph, cid) << ":\n";
        for (const Id& id : c.critical_path) {
            const NodeResult& r = ev.nodes.at(id);
            out << "  " << label_or_id(graph, id) << " [" << id << "] " << profile.risk.feasibility << " "
                << feas.display(r.feasibility);
            if (r.connector != "" && r.connector != "PASS") out << " (" << r.connector << ")";
            out << "\n";
        }
    }
    if (!ev.diagnostics.empty()) {
        out << "\nDiagnostics:\n";
        for (const auto& d : ev.diagnostics) out << "  " << d << "\n";
    }
    return out.str();
}

std::string html(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string quoted(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

// Green to red by position in the domain.
std::string heat(const AttributeSchema& schema, Rank value) {
    static const char* colors[] = {"#8fd18f", "#e8e36a", "#f5b04c", "#ef6b4a", "#c9302c"};
    auto idx = schema.index_of(value).value_or(0);
    std::size_t n = schema.values().size();
    std::size_t slot = n <= 1 ? 0 : idx * 4 / (n - 1);
    return colors[std::min<std::size_t>(slot, 4)];
}

std::string dot_report(const Evaluation& ev, const RiskGraph& graph, const Profile& profile) {
    std::set<Id> highlighted;
    for (const auto& [_, c] : ev.consequences) highlighted.insert(c.critical_path.begin(), c.critical_path.end());

    std::ostringstream out;
    out << "digraph rag {\n  rankdir=TB;\n  node [fontname=\"Helvetica\", fontsize=10];\n";
    for (const Node& n : graph.nodes()) {
        out << "  " << quoted(n.id) << " [";
        if (n.kind == NodeKind::Consequence) {
            auto it = ev.consequences.find(n.id);
            out << "shape=box, style=\"rounded,filled\", fillcolor=\""
                << (it == ev.consequences.end() ? "white" : heat(profile.risk_schema(), it->second.risk)) << "\", label=<"
                << html(n.label.empty() ? n.id : n.label);
            if (it != ev.consequences.end())
                out << "<BR/>Risk: " << html(profile.risk_schema().display(it->second.risk));
            out << ">";
        } else if (n.kind == NodeKind::Countermeasure) {
            out << "shape=box, style=filled, fillcolor=lightblue, label=<" << html(n.label.empty() ? n.id : n.label);
            for (const auto& [a, d] : n.ratings) out << "<BR/>" << html(a) << " " << (d >= 0 ? "+" : "") << d;
            if (!ev.countermeasures.empty() && !ev.countermeasures.at(n.id)) out << "<BR/>(disabled)";
            out << ">";
        } else {
            const NodeResult& r = ev.nodes.at(n.id);
            out << "shape=box, label=<<TABLE BORDER=\"0\" CELLSPACING=\"0\"><TR><TD ALIGN=\"LEFT\">"
                << html(n.label.empty() ? n.id : n.label) << "</TD><TD BGCOLOR=\""
                << heat(profile.feasibility_schema(), r.feasibility) << "\">" << r.feasibility << "</TD></TR>";
            for (const auto& [a, v] : r.attributes) {
                out << "<TR><TD ALIGN=\"LEFT\" COLSPAN=\"2\">" << html(a) << " ";
                auto o = r.original.find(a);
                if (o != r.original.end() && o->second != v)
                    out << "<FONT COLOR=\"blue\"><S>" << o->second << "</S></FONT> ";
                out << v << "</TD></TR>";
            }
            out << "</TABLE>>";
            if (highlighted.contains(n.id)) out << ", penwidth=2.5, color=\"#c9302c\"";
            if (r.connector != "" && r.connector != "PASS") out << ", xlabel=" << quoted(r.connector);
        }
        out << "];\n";
    }
    for (const Edge& e : graph.edges()) {
        bool cm_on_edge = e.kind == EdgeKind::Countermeasure && !graph.find_node(e.source);
        const Edge* target_edge = cm_on_edge ? graph.find_edge(e.source) : nullptr;
        Id from = target_edge ? target_edge->source : e.source;
        out << "  " << quoted(from) << " -> " << quoted(e.target) << " [";
        if (e.kind == EdgeKind::Consequence) {
            auto it = ev.edges.find(e.id);
            out << "label=";
            if (it == ev.edges.end()) {
                out << quoted(e.id);
            } else {
                out << "<" << html(profile.risk.impact) << " ";
                if (it->second.original_impact != it->second.impact)
                    out << "<FONT COLOR=\"blue\"><S>" << it->second.original_impact << "</S></FONT> ";
                out << it->second.impact << ">";
            }
        } else if (e.kind == EdgeKind::Countermeasure) {
            out << "style=dashed, color=\"#4a90d9\"";
            if (cm_on_edge) out << ", label=" << quoted("on " + e.source);
        } else if (highlighted.contains(e.source) && highlighted.contains(e.target)) {
            out << "penwidth=2.5, color=\"#c9302c\"";
        }
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace

std::string emit_report(const Evaluation& evaluation, const RiskGraph& graph, const Profile& profile,
                        ReportFormat format) {
    switch (format) {
        case ReportFormat::Text: return text_report(evaluation, graph, profile);
        case ReportFormat::Json: return evaluation_to_json(evaluation).dump(2) + "\n";
        case ReportFormat::Dot: return dot_report(evaluation, graph, profile);
    }
    return {};
}

std::string format_validation(const ValidationReport& report) {
    std::ostringstream out;
    for (const auto& v : report.violations) out << "error " << v.rule << " " << v.subject << ": " << v.message << "\n";
    for (const auto& n : report.notes) out << "note " << n.rule << " " << n.subject << ": " << n.message << "\n";
    if (report.ok())
        out << "valid";
    else
        out << report.violations.size() << (report.violations.size() == 1 ? " violation" : " violations");
    if (!report.notes.empty()) out << " (" << report.notes.size() << (report.notes.size() == 1 ? " note)" : " notes)");
    out << "\n";
    return out.str();
}

json validation_to_json(const ValidationReport& report) {
    auto list = [](const std::vector<Violation>& vs) {
        json out = json::array();
        for (const auto& v : vs)
            out.push_back({{"rule", v.rule}, {"subject", v.subject}, {"message", v.message}, {"involved", v.involved}});
        return out;
    };
    return {{"valid", report.ok()}, {"violations", list(report.violations)}, {"notes", list(report.notes)}};
}

}  // namespace rag
