#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rag/aggregation.hpp"
#include "rag/evaluation.hpp"
#include "rag/graph.hpp"
#include "rag/profile.hpp"

namespace rag {

struct CountermeasureEffect {
    Id countermeasure;
    /// Attachment edge that carries the effect.
    Id attachment;
    /// Attack node id, or consequence-edge id when `edge_target`.
    Id target;
    bool edge_target = false;
    AttributeMap deltas;
    BaseFunction combine = BaseFunction::Sum;

    bool operator==(const CountermeasureEffect&) const = default;
};

/// What-if state evaluated on top of a stored graph.
struct Overlay {
    std::set<Id> disabled;
    /// (basic node id or consequence-edge id, attribute) -> rank.
    std::map<std::pair<Id, std::string>, Rank> rating_overrides;

    bool empty() const noexcept { return disabled.empty() && rating_overrides.empty(); }
    bool operator==(const Overlay&) const = default;
};

/// Overlay disabling every countermeasure of `graph`.
Overlay disable_all(const RiskGraph& graph);

/// All attachments, ordered by (countermeasure id, attachment id).
std::vector<CountermeasureEffect> countermeasure_effects(const RiskGraph& graph);

/// Throws UnknownTarget for ids that do not exist or cannot be overridden and
/// OutOfDomain for override values outside their schema.
void check_overlay(const RiskGraph& graph, const Profile& profile, const Overlay& overlay);

/// Folds `effects` into `values` in order, keeping each result in its schema.
AttributeMap apply_effects(const AttributeMap& values, const std::vector<const CountermeasureEffect*>& effects,
                           const Profile& profile);

struct EffectiveValues {
    /// Basic attack nodes: ratings after overrides and countermeasures.
    std::map<Id, AttributeMap> ratings;
    /// Basic attack nodes: ratings after overrides, before countermeasures.
    std::map<Id, AttributeMap> original_ratings;
    /// Consequence edges: impact after overrides and countermeasures.
    std::map<Id, Rank> impacts;
    std::map<Id, Rank> original_impacts;
    /// Enabled effects per attack node (basic or inner).
    std::map<Id, std::vector<CountermeasureEffect>> node_effects;
    std::map<Id, bool> enabled;
};

/// Requires a validated graph. Throws UnknownTarget / OutOfDomain via
/// check_overlay.
EffectiveValues apply_countermeasures(const RiskGraph& graph, const Profile& profile, const Overlay& overlay);

struct RiskChange {
    Id consequence;
    Rank before = 0;
    Rank after = 0;

    bool operator==(const RiskChange&) const = default;
};

struct FeasibilityChange {
    Id node;
    Rank before = 0;
    Rank after = 0;

    bool operator==(const FeasibilityChange&) const = default;
};

struct WhatIfReport {
    Evaluation baseline;
    Evaluation evaluation;
    /// Every consequence, ascending id.
    std::vector<RiskChange> risks;
    /// Attack nodes whose feasibility moved, ascending id.
    std::vector<FeasibilityChange> feasibility;
};

/// Re-evaluates under `overlay` and diffs against the baseline (all
/// countermeasures enabled, no overrides).
WhatIfReport what_if(const RiskGraph& graph, const Profile& profile, const Overlay& overlay);

}  // namespace rag
