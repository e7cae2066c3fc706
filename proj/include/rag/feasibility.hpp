#pragma once

#include <map>
#include <string>

#include "rag/countermeasures.hpp"
#include "rag/evaluation.hpp"
#include "rag/graph.hpp"
#include "rag/profile.hpp"

namespace rag {

struct FeasibilityResult {
    /// Final output, clamped into the feasibility schema.
    Rank value = 0;
    /// Final output before clamping.
    Rank raw = 0;
    std::map<std::string, Rank> stages;

    bool clamped() const noexcept { return raw != value; }
};

/// Runs the profile's feasibility pipeline over one node's attributes.
/// Throws MissingAttribute naming the failing stage.
FeasibilityResult compute_feasibility(const AttributeMap& node_attributes, const Profile& profile);

/// Validates, applies the overlay's countermeasure state, propagates
/// attributes children-first, computes feasibility at every attack node,
/// then risk and critical paths per consequence. Throws ValidationError;
/// never returns a partial result.
Evaluation evaluate_graph(const RiskGraph& graph, const Profile& profile, const Overlay& overlay = {});

}  // namespace rag
