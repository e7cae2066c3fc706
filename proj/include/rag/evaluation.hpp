#pragma once

#include <map>
#include <string>
#include <vector>

#include "rag/schema.hpp"

namespace rag {

struct NodeResult {
    /// Effective attribute values after aggregation and countermeasures.
    AttributeMap attributes;
    /// Values before this node's own countermeasures (equal to `attributes`
    /// when none apply). Shown crossed out next to the effective values.
    AttributeMap original;
    /// Every feasibility-pipeline output, including the final one.
    std::map<std::string, Rank> stages;
    Rank feasibility = 0;
    /// Connector applied: empty for basic nodes, "PASS" for a single child.
    std::string connector;
    /// Children the connector selected (OR: one; threshold: k; AND: all).
    std::vector<Id> selected;

    bool operator==(const NodeResult&) const = default;
};

struct EdgeRisk {
    Id consequence;
    Id topmost;
    Rank impact = 0;
    Rank original_impact = 0;
    Rank feasibility = 0;
    Rank risk = 0;

    bool operator==(const EdgeRisk&) const = default;
};

struct ConsequenceRisk {
    Rank risk = 0;
    /// Consequence edge realizing `risk`.
    Id edge;
    /// Critical attack path (or AND sub-DAG) from the topmost node down,
    /// parents before children.
    std::vector<Id> critical_path;
    /// True when an AND-like connector made the path a sub-DAG.
    bool critical_tree = false;
    /// True when several consequence edges competed (risk is their maximum).
    bool multi_edge = false;

    bool operator==(const ConsequenceRisk&) const = default;
};

struct Evaluation {
    std::string profile;
    std::map<Id, NodeResult> nodes;
    std::map<Id, EdgeRisk> edges;
    std::map<Id, ConsequenceRisk> consequences;
    /// Countermeasure id -> enabled in this evaluation.
    std::map<Id, bool> countermeasures;
    std::vector<std::string> diagnostics;

    bool operator==(const Evaluation&) const = default;
};

}  // namespace rag
