#include "rag/graph.hpp"

#include <algorithm>

namespace rag {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Consequence: return "consequence";
        case NodeKind::Attack: return "attack";
        case NodeKind::Countermeasure: return "countermeasure";
    }
    return "attack";
}

std::string_view to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::Refinement: return "refinement";
        case EdgeKind::Consequence: return "consequence";
        case EdgeKind::Countermeasure: return "countermeasure";
    }
    return "refinement";
}

std::optional<NodeKind> node_kind_from_string(std::string_view text) {
    if (text == "consequence") return NodeKind::Consequence;
    if (text == "attack") return NodeKind::Attack;
    if (text == "countermeasure") return NodeKind::Countermeasure;
    return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view text) {
    if (text == "refinement") return EdgeKind::Refinement;
    if (text == "consequence") return EdgeKind::Consequence;
    if (text == "countermeasure") return EdgeKind::Countermeasure;
    return std::nullopt;
}

RiskGraph::RiskGraph(std::vector<Node> nodes, std::vector<Edge> edges, std::string profile,
                     nlohmann::json metadata)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      profile_(std::move(profile)),
      metadata_(std::move(metadata)) {
    index();
}

void RiskGraph::index() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) node_index_.try_emplace(nodes_[i].id, i);
    for (std::size_t i = 0; i < edges_.size(); ++i) edge_index_.try_emplace(edges_[i].id, i);
    for (const auto& e : edges_) {
        if (e.kind != EdgeKind::Refinement) continue;
        const Node* s = find_node(e.source);
        const Node* t = find_node(e.target);
        if (!s || !t || s->kind != NodeKind::Attack || t->kind != NodeKind::Attack) continue;
        children_[e.source].push_back(e.target);
        parents_[e.target].push_back(e.source);
    }
    for (auto* m : {&children_, &parents_})
        for (auto& [_, list] : *m) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
}

const Node* RiskGraph::find_node(const Id& id) const {
    auto it = node_index_.find(id);
    return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const Edge* RiskGraph::find_edge(const Id& id) const {
    auto it = edge_index_.find(id);
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

const std::vector<Id>& RiskGraph::attack_children(const Id& id) const {
    static const std::vector<Id> none;
    auto it = children_.find(id);
    return it == children_.end() ? none : it->second;
}

const std::vector<Id>& RiskGraph::attack_parents(const Id& id) const {
    static const std::vector<Id> none;
    auto it = parents_.find(id);
    return it == parents_.end() ? none : it->second;
}

std::vector<Id> RiskGraph::attack_nodes() const {
    std::vector<Id> out;
    for (const auto& [id, idx] : node_index_)
        if (nodes_[idx].kind == NodeKind::Attack) out.push_back(id);
    return out;
}

bool RiskGraph::is_basic(const Id& id) const {
    const Node* n = find_node(id);
    return n && n->kind == NodeKind::Attack && attack_children(id).empty();
}

bool RiskGraph::is_topmost(const Id& id) const {
    const Node* n = find_node(id);
    return n && n->kind == NodeKind::Attack && attack_parents(id).empty();
}

namespace {

std::vector<const Edge*> edges_of(const std::vector<Edge>& edges, EdgeKind kind) {
    std::vector<const Edge*> out;
    for (const auto& e : edges)
        if (e.kind == kind) out.push_back(&e);
    std::stable_sort(out.begin(), out.end(), [](const Edge* a, const Edge* b) { return a->id < b->id; });
    return out;
}

}  // namespace

std::vector<const Edge*> RiskGraph::consequence_edges() const { return edges_of(edges_, EdgeKind::Consequence); }

std::vector<const Edge*> RiskGraph::countermeasure_edges() const {
    return edges_of(edges_, EdgeKind::Countermeasure);
}

RiskGraph RiskGraph::without_countermeasure(const Id& countermeasure) const {
    std::vector<Node> nodes;
    for (const auto& n : nodes_)
        if (!(n.id == countermeasure && n.kind == NodeKind::Countermeasure)) nodes.push_back(n);
    std::vector<Edge> edges;
    for (const auto& e : edges_)
        if (!(e.kind == EdgeKind::Countermeasure && e.target == countermeasure)) edges.push_back(e);
    RiskGraph out(std::move(nodes), std::move(edges), profile_, metadata_);
    out.inline_profile_ = inline_profile_;
    out.display = display;
    out.extra = extra;
    return out;
}

bool RiskGraph::operator==(const RiskGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_ && profile_ == other.profile_ &&
           metadata_ == other.metadata_ && inline_profile_ == other.inline_profile_ &&
           display == other.display && extra == other.extra;
}

}  // namespace rag
