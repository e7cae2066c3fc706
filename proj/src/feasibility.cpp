#include "rag/feasibility.hpp"

#include <algorithm>
#include <type_traits>

#include "rag/error.hpp"
#include "rag/risk.hpp"
#include "rag/validate.hpp"

namespace rag {

namespace {

Rank fetch(const AttributeMap& env, const std::string& stage, const std::string& name) {
    auto it = env.find(name);
    if (it == env.end()) throw MissingAttribute(stage, name);
    return it->second;
}

Rank run_stage(const MatrixStage& stage, const AttributeMap& env, const Profile& profile) {
    auto it = profile.matrices.find(stage.matrix);
    if (it == profile.matrices.end()) throw Error("unknown matrix '" + stage.matrix + "'");
    const LookupMatrix& matrix = it->second;
    std::vector<Rank> coords;
    for (const auto& axis : matrix.axes()) coords.push_back(fetch(env, stage.output, axis));
    return matrix.at(coords);
}

Rank run_stage(const FunctionStage& stage, const AttributeMap& env, const Profile&) {
    Rank out = 0;
    for (std::size_t i = 0; i < stage.inputs.size(); ++i) {
        Rank v = fetch(env, stage.output, stage.inputs[i]);
        switch (stage.function) {
            case StageFunction::Add: out += v; break;
            case StageFunction::Subtract: out = i == 0 ? v : out - v; break;
            case StageFunction::Affine: out += stage.weights.at(i) * v; break;
        }
    }
    if (stage.function == StageFunction::Affine) out += stage.bias;
    return out;
}

Rank run_stage(const BandStage& stage, const AttributeMap& env, const Profile&) {
    Rank v = fetch(env, stage.output, stage.input);
    for (const auto& band : stage.bands)
        if (v >= band.min && (!band.max || v <= *band.max)) return band.value;
    throw OutOfDomain("stage '" + stage.output + "': " + std::to_string(v) + " falls outside every band");
}

Rank metric_of(const NodeResult& r, const std::string& metric) {
    if (auto it = r.stages.find(metric); it != r.stages.end()) return it->second;
    if (auto it = r.attributes.find(metric); it != r.attributes.end()) return it->second;
    throw MissingAttribute("selection", metric);
}

}  // namespace

FeasibilityResult compute_feasibility(const AttributeMap& node_attributes, const Profile& profile) {
    AttributeMap env = node_attributes;
    FeasibilityResult out;
    for (const auto& stage : profile.feasibility.stages) {
        Rank v = std::visit([&](const auto& s) { return run_stage(s, env, profile); }, stage);
        env[stage_output(stage)] = v;
        out.stages[stage_output(stage)] = v;
    }
    const auto& final_name = profile.feasibility.final_output;
    out.raw = fetch(env, final_name, final_name);
    out.value = profile.feasibility_schema().clamp(out.raw);
    out.stages[final_name] = out.value;
    return out;
}

Evaluation evaluate_graph(const RiskGraph& graph, const Profile& profile, const Overlay& overlay) {
    ValidationReport report = validate(graph, profile);
    if (!report.ok()) throw ValidationError(std::move(report));

    EffectiveValues eff = apply_countermeasures(graph, profile, overlay);
    Evaluation ev;
    ev.profile = profile.name;
    ev.countermeasures = eff.enabled;

    const auto rated = profile.rated_schemas();
    const auto& final_name = profile.feasibility.final_output;
    static const std::vector<CountermeasureEffect> no_effects;

    for (const Id& id : topological_order(graph)) {
        NodeResult r;
        const auto& children = graph.attack_children(id);
        if (children.empty()) {
            r.original = eff.original_ratings.at(id);
            r.attributes = eff.ratings.at(id);
        } else {
            if (children.size() == 1) {
                r.connector = "PASS";
                r.selected = children;
                r.original = ev.nodes.at(children.front()).attributes;
            } else {
                const Node* node = graph.find_node(id);
                const std::string name = node->connector.value_or(profile.default_connector);
                const Connector* conn = profile.find_connector(name);
                if (!conn) throw Error("unknown connector '" + name + "'");
                r.connector = conn->name;

                std::vector<Candidate> candidates;
                for (const Id& c : children) {
                    const NodeResult& cr = ev.nodes.at(c);
                    candidates.push_back({c, &cr.attributes, metric_of(cr, conn->policy.metric.empty()
                                                                               ? final_name
                                                                               : conn->policy.metric)});
                }
                std::vector<AttributeMap> parts;
                switch (conn->kind) {
                    case Connector::Kind::Select: {
                        std::size_t idx = aggregate_or(candidates, conn->policy);
                        r.selected = {children[idx]};
                        r.original = ev.nodes.at(children[idx]).attributes;
                        break;
                    }
                    case Connector::Kind::Combine:
                        r.selected = children;
                        for (const Id& c : children) parts.push_back(ev.nodes.at(c).attributes);
                        r.original = combine_children(parts, rated, conn->aggregators);
                        break;
                    case Connector::Kind::Threshold: {
                        auto order = rank_candidates(candidates, conn->policy);
                        order.resize(static_cast<std::size_t>(conn->k));
                        std::sort(order.begin(), order.end());
                        for (std::size_t i : order) {
                            r.selected.push_back(children[i]);
                            parts.push_back(ev.nodes.at(children[i]).attributes);
                        }
                        r.original = combine_children(parts, rated, conn->aggregators);
                        break;
                    }
                }
            }
            auto it = eff.node_effects.find(id);
            const auto& effects = it == eff.node_effects.end() ? no_effects : it->second;
            std::vector<const CountermeasureEffect*> ptrs;
            for (const auto& e : effects) ptrs.push_back(&e);
            r.attributes = apply_effects(r.original, ptrs, profile);
        }

        FeasibilityResult f = compute_feasibility(r.attributes, profile);
        if (f.clamped())
            ev.diagnostics.push_back("node " + id + ": " + final_name + " " + std::to_string(f.raw) +
                                     " clamped to " + std::to_string(f.value));
        r.stages = std::move(f.stages);
        r.feasibility = f.value;
        ev.nodes.emplace(id, std::move(r));
    }

    determine_risk(ev, graph, profile, eff.impacts, eff.original_impacts);
    for (auto& [cid, cr] : ev.consequences) {
        CriticalPath path = critical_path(ev, graph, cid);
        cr.critical_path = std::move(path.nodes);
        cr.critical_tree = path.tree;
    }
    return ev;
}

}  // namespace rag
