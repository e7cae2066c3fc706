#include "rag/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "rag/error.hpp"

namespace rag {

bool ValidationReport::has(const std::string& rule) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

namespace {

std::string summarize(const ValidationReport& report) {
    std::string out = "graph failed validation";
    if (!report.violations.empty())
        out += ": " + report.violations.front().rule + " " + report.violations.front().subject + " (" +
               std::to_string(report.violations.size()) + " violation(s))";
    return out;
}

std::string join(const std::vector<Id>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}

class Checker {
public:
    Checker(const RiskGraph& graph, const Profile& profile) : g_(graph), p_(profile) {}

    ValidationReport run() {
        ids();
        edges();
        nodes();
        cycles();
        countermeasures();
        auto order = [](const Violation& a, const Violation& b) {
            return std::tie(a.subject, a.rule, a.message) < std::tie(b.subject, b.rule, b.message);
        };
        std::sort(report_.violations.begin(), report_.violations.end(), order);
        std::sort(report_.notes.begin(), report_.notes.end(), order);
        return std::move(report_);
    }

private:
    void fail(std::string rule, const Id& subject, std::string message, std::vector<Id> involved = {}) {
        if (involved.empty()) involved.push_back(subject);
        report_.violations.push_back({std::move(rule), subject, std::move(message), std::move(involved)});
    }

    void note(std::string rule, const Id& subject, std::string message, std::vector<Id> involved = {}) {
        if (involved.empty()) involved.push_back(subject);
        report_.notes.push_back({std::move(rule), subject, std::move(message), std::move(involved)});
    }

    void ids() {
        std::set<Id> seen;
        for (const auto& n : g_.nodes()) {
            if (n.id.empty()) fail("EMPTY_ID", n.id, "node without an id");
            else if (!seen.insert(n.id).second) fail("DUPLICATE_NODE_ID", n.id, "node id '" + n.id + "' is used twice");
        }
        std::set<Id> edge_ids;
        for (const auto& e : g_.edges()) {
            if (e.id.empty()) fail("EMPTY_ID", e.id, "edge without an id");
            else if (!edge_ids.insert(e.id).second) fail("DUPLICATE_EDGE_ID", e.id, "edge id '" + e.id + "' is used twice");
        }
    }

    const Node* node_of_kind(const Id& id, NodeKind kind) const {
        const Node* n = g_.find_node(id);
        return n && n->kind == kind ? n : nullptr;
    }

    void edges() {
        const auto& impact = p_.impact_schema();
        std::size_t consequences = 0;
        for (const auto& n : g_.nodes())
            if (n.kind == NodeKind::Consequence) ++consequences;
        if (consequences == 0)
            fail("NO_CONSEQUENCE", "", "no consequence node: this is a plain attack graph, not a risk assessment graph");

        std::map<Id, std::set<Id>> consequence_targets;
        for (const auto& e : g_.edges()) {
            switch (e.kind) {
                case EdgeKind::Refinement: {
                    for (const Id* end : {&e.source, &e.target})
                        if (!g_.find_node(*end)) fail("UNKNOWN_NODE", e.id, "edge references unknown node '" + *end + "'");
                        else if (!node_of_kind(*end, NodeKind::Attack))
                            fail("REFINEMENT_KIND", e.id, "refinement edges must connect attack nodes ('" + *end + "' is not one)");
                    if (!e.attributes.empty()) fail("UNKNOWN_ATTRIBUTE", e.id, "refinement edges carry no attributes");
                    break;
                }
                case EdgeKind::Consequence: {
                    if (!g_.find_node(e.source)) fail("UNKNOWN_NODE", e.id, "edge references unknown node '" + e.source + "'");
                    else if (!node_of_kind(e.source, NodeKind::Consequence))
                        fail("CONSEQUENCE_EDGE_KIND", e.id, "consequence edges start at a consequence node");
                    if (!g_.find_node(e.target)) fail("UNKNOWN_NODE", e.id, "edge references unknown node '" + e.target + "'");
                    else if (!node_of_kind(e.target, NodeKind::Attack))
                        fail("CONSEQUENCE_EDGE_KIND", e.id, "consequence edges end at an attack node");
                    else if (!g_.is_topmost(e.target))
                        fail("CONSEQUENCE_NOT_TOPMOST", e.id, "'" + e.target + "' is refined from another attack node");
                    if (node_of_kind(e.source, NodeKind::Consequence)) consequence_targets[e.source].insert(e.target);
                    auto it = e.attributes.find(impact.name());
                    if (it == e.attributes.end())
                        fail("MISSING_IMPACT", e.id, "consequence edge has no '" + impact.name() + "' value");
                    else if (!impact.contains(it->second))
                        fail("IMPACT_OUT_OF_DOMAIN", e.id, std::to_string(it->second) + " is not a value of '" + impact.name() + "'");
                    for (const auto& [attr, _] : e.attributes)
                        if (attr != impact.name())
                            fail("UNKNOWN_ATTRIBUTE", e.id, "consequence edges carry only '" + impact.name() + "', found '" + attr + "'");
                    break;
                }
                case EdgeKind::Countermeasure: {
                    const Node* src = g_.find_node(e.source);
                    const Edge* src_edge = src ? nullptr : g_.find_edge(e.source);
                    if (!src && !src_edge) fail("UNKNOWN_TARGET", e.id, "countermeasure target '" + e.source + "' does not exist");
                    else if (src && src->kind != NodeKind::Attack)
                        fail("COUNTERMEASURE_EDGE_KIND", e.id, "countermeasures attach to attack nodes or consequence edges");
                    else if (src_edge && src_edge->kind != EdgeKind::Consequence)
                        fail("COUNTERMEASURE_EDGE_KIND", e.id, "only consequence edges can carry countermeasures");
                    if (!g_.find_node(e.target)) fail("UNKNOWN_NODE", e.id, "edge references unknown node '" + e.target + "'");
                    else if (!node_of_kind(e.target, NodeKind::Countermeasure))
                        fail("COUNTERMEASURE_EDGE_KIND", e.id, "attachment must end at a countermeasure node");
                    break;
                }
            }
        }
        std::map<Id, int> outgoing, incoming;
        for (const auto& e : g_.edges()) {
            ++outgoing[e.source];
            ++incoming[e.target];
        }
        for (const auto& n : g_.nodes()) {
            if (n.kind == NodeKind::Countermeasure && outgoing.count(n.id))
                fail("COUNTERMEASURE_NOT_LEAF", n.id, "countermeasure nodes have no successors");
            if (n.kind == NodeKind::Consequence) {
                if (incoming.count(n.id))
                    fail("CONSEQUENCE_INCOMING", n.id, "consequence nodes have no incoming edges");
                auto it = consequence_targets.find(n.id);
                if (it == consequence_targets.end())
                    note("UNLINKED_CONSEQUENCE", n.id, "consequence is not linked to any attack node");
                else if (it->second.size() > 1)
                    note("MULTI_TOPMOST", n.id, "consequence is reached from several topmost attack nodes; risk takes the maximum",
                         {it->second.begin(), it->second.end()});
            }
        }
    }

    void nodes() {
        const auto rated = p_.rated_schemas();
        for (const auto& n : g_.nodes()) {
            if (n.kind == NodeKind::Consequence) {
                if (!n.ratings.empty()) fail("UNEXPECTED_RATING", n.id, "consequence nodes carry no ratings");
                if (n.connector) fail("CONNECTOR_MISPLACED", n.id, "consequence nodes have no connector");
            }
            if (n.kind == NodeKind::Countermeasure && n.connector)
                fail("CONNECTOR_MISPLACED", n.id, "countermeasure nodes have no connector");
            if (n.kind != NodeKind::Countermeasure && n.combine)
                fail("UNKNOWN_ATTRIBUTE", n.id, "only countermeasure nodes declare a combine rule");
            if (n.kind != NodeKind::Attack) continue;
            const auto& children = g_.attack_children(n.id);
            if (children.empty()) {
                for (const auto* schema : rated) {
                    auto it = n.ratings.find(schema->name());
                    if (it == n.ratings.end())
                        fail("MISSING_RATING", n.id, "basic attack node has no '" + schema->name() + "' rating");
                    else if (!schema->contains(it->second))
                        fail("RATING_OUT_OF_DOMAIN", n.id,
                             std::to_string(it->second) + " is not a value of '" + schema->name() + "'");
                }
                for (const auto& [attr, _] : n.ratings) {
                    const auto* s = p_.find_schema(attr);
                    if (!s || !s->rated()) fail("UNKNOWN_ATTRIBUTE", n.id, "'" + attr + "' is not a rated attribute of the profile");
                }
            } else if (!n.ratings.empty()) {
                fail("RATING_ON_INNER_NODE", n.id, "only basic attack nodes are rated; inner values are aggregated");
            }
            if (n.connector) {
                const Connector* c = p_.find_connector(*n.connector);
                if (!c) fail("UNKNOWN_CONNECTOR", n.id, "connector '" + *n.connector + "' is not registered in the profile");
                if (children.size() < 2)
                    fail("CONNECTOR_MISPLACED", n.id, "connectors apply to nodes with at least two attack children");
                else if (c && c->kind == Connector::Kind::Threshold && static_cast<std::size_t>(c->k) > children.size())
                    fail("THRESHOLD_TOO_FEW", n.id,
                         "connector '" + c->name + "' needs " + std::to_string(c->k) + " children");
            }
        }
    }

    void cycles() {
        for (auto& cycle : refinement_cycles(g_))
            fail("CYCLE", cycle.front(), "refinement cycle through " + join(cycle), cycle);
    }

    void countermeasures() {
        const auto& impact = p_.impact_schema();
        std::set<Id> attached;
        for (const Edge* e : g_.countermeasure_edges()) {
            const Node* cm = node_of_kind(e->target, NodeKind::Countermeasure);
            if (!cm) continue;
            attached.insert(cm->id);
            const bool edge_target = g_.find_node(e->source) == nullptr;
            const AttributeMap& deltas = e->attributes.empty() ? cm->ratings : e->attributes;
            for (const auto& [attr, delta] : deltas) {
                if (edge_target) {
                    if (attr != impact.name())
                        fail("DELTA_ATTRIBUTE", e->id, "edge-targeted countermeasures change '" + impact.name() + "' only");
                } else {
                    const auto* s = p_.find_schema(attr);
                    if (!s || !s->rated()) fail("DELTA_ATTRIBUTE", e->id, "'" + attr + "' is not a rated attribute");
                    else if (delta < 0)
                        fail("NEGATIVE_DELTA", e->id, "node-targeted countermeasures cannot make an attack easier");
                }
            }
        }
        for (const auto& n : g_.nodes()) {
            if (n.kind != NodeKind::Countermeasure) continue;
            if (n.combine && !base_function_from_string(*n.combine))
                fail("UNKNOWN_COMBINE", n.id, "combine must be max, min, sum or product");
            if (!attached.count(n.id)) note("UNATTACHED_COUNTERMEASURE", n.id, "countermeasure is not attached to anything");
        }
    }

    const RiskGraph& g_;
    const Profile& p_;
    ValidationReport report_;
};

}  // namespace

ValidationError::ValidationError(ValidationReport report) : Error(summarize(report)), report_(std::move(report)) {}

ValidationReport validate(const RiskGraph& graph, const Profile& profile) { return Checker(graph, profile).run(); }

std::vector<std::vector<Id>> refinement_cycles(const RiskGraph& graph) {
    // Tarjan over attack -> attack refinements.
    const auto ids = graph.attack_nodes();
    std::map<Id, int> index, low;
    std::set<Id> on_stack;
    std::vector<Id> stack;
    std::vector<std::vector<Id>> out;
    int counter = 0;
    std::function<void(const Id&)> visit = [&](const Id& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& w : graph.attack_children(v)) {
            if (!index.count(w)) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack.count(w)) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] != index[v]) return;
        std::vector<Id> component;
        Id w;
        do {
            w = stack.back();
            stack.pop_back();
            on_stack.erase(w);
            component.push_back(w);
        } while (w != v);
        const auto& kids = graph.attack_children(v);
        const bool self_loop = std::find(kids.begin(), kids.end(), v) != kids.end();
        if (component.size() > 1 || self_loop) {
            std::sort(component.begin(), component.end());
            out.push_back(std::move(component));
        }
    };
    for (const auto& id : ids)
        if (!index.count(id)) visit(id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Id> topological_order(const RiskGraph& graph) {
    const auto ids = graph.attack_nodes();
    std::map<Id, std::size_t> pending;
    std::set<Id> ready;
    for (const auto& id : ids) {
        pending[id] = graph.attack_children(id).size();
        if (pending[id] == 0) ready.insert(id);
    }
    std::vector<Id> order;
    order.reserve(ids.size());
    while (!ready.empty()) {
        Id next = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(next);
        for (const auto& parent : graph.attack_parents(next))
            if (--pending[parent] == 0) ready.insert(parent);
    }
    if (order.size() != ids.size()) {
        auto cycles = refinement_cycles(graph);
        throw CycleError("refinement cycle through " + (cycles.empty() ? std::string("?") : join(cycles.front())));
    }
    return order;
}

}  // namespace rag
