#include "rag/risk.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "rag/error.hpp"
#include "rag/validate.hpp"

namespace rag {

void determine_risk(Evaluation& evaluation, const RiskGraph& graph, const Profile& profile,
                    const std::map<Id, Rank>& impacts, const std::map<Id, Rank>& original_impacts) {
    std::map<Id, std::vector<const EdgeRisk*>> by_consequence;
    for (const Edge* e : graph.consequence_edges()) {
        EdgeRisk er;
        er.consequence = e->source;
        er.topmost = e->target;
        er.impact = impacts.at(e->id);
        auto orig = original_impacts.find(e->id);
        er.original_impact = orig == original_impacts.end() ? er.impact : orig->second;
        er.feasibility = evaluation.nodes.at(e->target).feasibility;
        er.risk = risk_lookup(profile, er.impact, er.feasibility);
        by_consequence[e->source].push_back(&(evaluation.edges[e->id] = er));
    }
    for (const auto& [cid, risks] : by_consequence) {
        // ties: higher feasibility, higher impact, then lowest edge id (map order)
        const EdgeRisk* best = nullptr;
        Id best_edge;
        for (const auto& [eid, er] : evaluation.edges) {
            if (er.consequence != cid) continue;
            if (!best || std::tie(er.risk, er.feasibility, er.impact) >
                             std::tie(best->risk, best->feasibility, best->impact)) {
                best = &er;
                best_edge = eid;
            }
        }
        ConsequenceRisk cr;
        cr.risk = best->risk;
        cr.edge = best_edge;
        cr.multi_edge = risks.size() > 1;
        if (cr.multi_edge)
            evaluation.diagnostics.push_back("consequence " + cid + ": risk is the maximum over " +
                                             std::to_string(risks.size()) + " edges");
        evaluation.consequences[cid] = std::move(cr);
    }
}

CriticalPath critical_path(const Evaluation& evaluation, const RiskGraph& graph, const Id& consequence) {
    auto it = evaluation.consequences.find(consequence);
    if (it == evaluation.consequences.end()) throw UnknownConsequence("unknown consequence '" + consequence + "'");
    const Id& top = evaluation.edges.at(it->second.edge).topmost;

    CriticalPath out;
    std::set<Id> on_path;
    std::vector<Id> stack{top};
    while (!stack.empty()) {
        Id id = stack.back();
        stack.pop_back();
        if (!on_path.insert(id).second) continue;
        const NodeResult& r = evaluation.nodes.at(id);
        if (r.selected.size() > 1) out.tree = true;
        for (const Id& c : r.selected) stack.push_back(c);
    }
    auto order = topological_order(graph);
    for (auto o = order.rbegin(); o != order.rend(); ++o)
        if (on_path.contains(*o)) out.nodes.push_back(*o);
    return out;
}

}  // namespace rag
