#include "rag/countermeasures.hpp"

#include <algorithm>

#include "rag/error.hpp"
#include "rag/feasibility.hpp"

namespace rag {

Overlay disable_all(const RiskGraph& graph) {
    Overlay o;
    for (const auto& n : graph.nodes())
        if (n.kind == NodeKind::Countermeasure) o.disabled.insert(n.id);
    return o;
}

std::vector<CountermeasureEffect> countermeasure_effects(const RiskGraph& graph) {
    std::vector<CountermeasureEffect> out;
    for (const Edge* e : graph.countermeasure_edges()) {
        const Node* cm = graph.find_node(e->target);
        if (!cm || cm->kind != NodeKind::Countermeasure) continue;
        CountermeasureEffect eff;
        eff.countermeasure = cm->id;
        eff.attachment = e->id;
        eff.target = e->source;
        eff.edge_target = graph.find_node(e->source) == nullptr && graph.find_edge(e->source) != nullptr;
        eff.deltas = e->attributes.empty() ? cm->ratings : e->attributes;
        if (cm->combine)
            eff.combine = base_function_from_string(*cm->combine).value_or(BaseFunction::Sum);
        out.push_back(std::move(eff));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.countermeasure, a.attachment) < std::tie(b.countermeasure, b.attachment);
    });
    return out;
}

void check_overlay(const RiskGraph& graph, const Profile& profile, const Overlay& overlay) {
    for (const Id& id : overlay.disabled) {
        const Node* n = graph.find_node(id);
        if (!n || n->kind != NodeKind::Countermeasure)
            throw UnknownTarget("'" + id + "' is not a countermeasure");
    }
    for (const auto& [key, value] : overlay.rating_overrides) {
        const auto& [id, attr] = key;
        const AttributeSchema* schema = nullptr;
        if (const Node* n = graph.find_node(id)) {
            if (n->kind != NodeKind::Attack || !graph.is_basic(id))
                throw UnknownTarget("'" + id + "' is not a basic attack node");
            schema = profile.find_schema(attr);
            if (!schema || !schema->rated())
                throw UnknownTarget("'" + attr + "' is not a rated attribute");
        } else if (const Edge* e = graph.find_edge(id)) {
            if (e->kind != EdgeKind::Consequence || attr != profile.risk.impact)
                throw UnknownTarget("'" + id + "." + attr + "' cannot be overridden");
            schema = &profile.impact_schema();
        } else {
            throw UnknownTarget("no node or edge '" + id + "'");
        }
        if (!schema->contains(value))
            throw OutOfDomain(id + "." + attr + ": " + std::to_string(value) + " is not in " + schema->name());
    }
}

AttributeMap apply_effects(const AttributeMap& values, const std::vector<const CountermeasureEffect*>& effects,
                           const Profile& profile) {
    AttributeMap out = values;
    for (const CountermeasureEffect* e : effects) {
        for (const auto& [attr, delta] : e->deltas) {
            auto it = out.find(attr);
            const AttributeSchema* schema = profile.find_schema(attr);
            if (it == out.end() || !schema) continue;
            const Rank pair[] = {it->second, delta};
            it->second = apply_aggregator(AttributeAggregator{e->combine}, pair, *schema);
        }
    }
    return out;
}

EffectiveValues apply_countermeasures(const RiskGraph& graph, const Profile& profile, const Overlay& overlay) {
    check_overlay(graph, profile, overlay);
    EffectiveValues out;

    for (const auto& n : graph.nodes()) {
        if (n.kind == NodeKind::Countermeasure) out.enabled[n.id] = !overlay.disabled.contains(n.id);
        if (n.kind == NodeKind::Attack && graph.is_basic(n.id)) out.original_ratings[n.id] = n.ratings;
    }
    const std::string& impact = profile.risk.impact;
    for (const Edge* e : graph.consequence_edges()) {
        auto it = e->attributes.find(impact);
        if (it != e->attributes.end()) out.original_impacts[e->id] = it->second;
    }
    for (const auto& [key, value] : overlay.rating_overrides) {
        if (auto it = out.original_ratings.find(key.first); it != out.original_ratings.end())
            it->second[key.second] = value;
        else
            out.original_impacts[key.first] = value;
    }

    std::map<Id, std::vector<CountermeasureEffect>> edge_effects;
    for (auto& e : countermeasure_effects(graph)) {
        if (!out.enabled[e.countermeasure]) continue;
        if (e.edge_target)
            edge_effects[e.target].push_back(std::move(e));
        else
            out.node_effects[e.target].push_back(std::move(e));
    }

    for (const auto& [id, original] : out.original_ratings) {
        std::vector<const CountermeasureEffect*> ptrs;
        if (auto it = out.node_effects.find(id); it != out.node_effects.end())
            for (const auto& e : it->second) ptrs.push_back(&e);
        out.ratings[id] = apply_effects(original, ptrs, profile);
    }
    for (const auto& [id, original] : out.original_impacts) {
        std::vector<const CountermeasureEffect*> ptrs;
        if (auto it = edge_effects.find(id); it != edge_effects.end())
            for (const auto& e : it->second) ptrs.push_back(&e);
        out.impacts[id] = apply_effects({{impact, original}}, ptrs, profile).at(impact);
    }
    return out;
}

WhatIfReport what_if(const RiskGraph& graph, const Profile& profile, const Overlay& overlay) {
    WhatIfReport r;
    r.baseline = evaluate_graph(graph, profile);
    r.evaluation = evaluate_graph(graph, profile, overlay);
    for (const auto& [id, before] : r.baseline.consequences) {
        auto it = r.evaluation.consequences.find(id);
        r.risks.push_back({id, before.risk, it == r.evaluation.consequences.end() ? 0 : it->second.risk});
    }
    for (const auto& [id, before] : r.baseline.nodes) {
        Rank after = r.evaluation.nodes.at(id).feasibility;
        if (after != before.feasibility) r.feasibility.push_back({id, before.feasibility, after});
    }
    return r;
}

}  // namespace rag
