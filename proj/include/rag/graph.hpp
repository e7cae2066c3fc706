#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rag/schema.hpp"

namespace rag {

enum class NodeKind { Consequence, Attack, Countermeasure };
enum class EdgeKind { Refinement, Consequence, Countermeasure };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view text);
std::optional<EdgeKind> edge_kind_from_string(std::string_view text);

struct Node {
    Id id;
    std::string label;
    NodeKind kind = NodeKind::Attack;
    /// Basic attack nodes: their rating. Countermeasure nodes: default deltas.
    AttributeMap ratings;
    /// Attack nodes with several attack children; absent means the profile default.
    std::optional<std::string> connector;
    /// Countermeasure nodes: how deltas merge into the target ("sum" if absent).
    std::optional<std::string> combine;
    /// Opaque display hints and, in lenient parsing, unknown fields.
    nlohmann::json display;
    nlohmann::json extra;

    bool operator==(const Node&) const = default;
};

/// Refinement: goal -> sub-goal (attack -> attack).
/// Consequence: consequence node -> topmost attack node, carries the impact.
/// Countermeasure: attack node or consequence-edge id -> countermeasure node;
/// non-empty `attributes` override the countermeasure's default deltas.
struct Edge {
    Id id;
    EdgeKind kind = EdgeKind::Refinement;
    Id source;
    Id target;
    AttributeMap attributes;
    nlohmann::json display;
    nlohmann::json extra;

    bool operator==(const Edge&) const = default;
};

/// Immutable Risk Assessment Graph. Construction never rejects input; use
/// validate() to check structure. Lookups resolve duplicate ids to the first
/// occurrence.
class RiskGraph {
public:
    RiskGraph() = default;
    RiskGraph(std::vector<Node> nodes, std::vector<Edge> edges, std::string profile = {},
              nlohmann::json metadata = nlohmann::json::object());

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::string& profile_name() const noexcept { return profile_; }
    const nlohmann::json& metadata() const noexcept { return metadata_; }

    /// Inline profile document, when the graph carries one instead of a name.
    const nlohmann::json& inline_profile() const noexcept { return inline_profile_; }
    void set_inline_profile(nlohmann::json doc) { inline_profile_ = std::move(doc); }

    /// Top-level display hints and unknown fields.
    nlohmann::json display;
    nlohmann::json extra;

    const Node* find_node(const Id& id) const;
    const Edge* find_edge(const Id& id) const;

    /// Attack children via refinement edges, ascending id, deduplicated.
    const std::vector<Id>& attack_children(const Id& id) const;
    const std::vector<Id>& attack_parents(const Id& id) const;

    /// Attack nodes by ascending id.
    std::vector<Id> attack_nodes() const;
    /// Attack node with no attack children.
    bool is_basic(const Id& id) const;
    /// Attack node with no attack parents.
    bool is_topmost(const Id& id) const;

    /// Consequence edges by ascending id.
    std::vector<const Edge*> consequence_edges() const;
    /// Countermeasure attachments by ascending id.
    std::vector<const Edge*> countermeasure_edges() const;

    /// Copy without `countermeasure` and its attachment edges.
    RiskGraph without_countermeasure(const Id& countermeasure) const;

    bool operator==(const RiskGraph& other) const;

private:
    void index();

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::string profile_;
    nlohmann::json metadata_ = nlohmann::json::object();
    nlohmann::json inline_profile_;

    std::map<Id, std::size_t> node_index_;
    std::map<Id, std::size_t> edge_index_;
    std::map<Id, std::vector<Id>> children_;
    std::map<Id, std::vector<Id>> parents_;
};

}  // namespace rag
