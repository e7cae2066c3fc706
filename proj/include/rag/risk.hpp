#pragma once

#include <map>
#include <vector>

#include "rag/evaluation.hpp"
#include "rag/graph.hpp"
#include "rag/profile.hpp"

namespace rag {

/// Fills `evaluation.edges` and `evaluation.consequences` (risk and chosen
/// edge; paths are left to critical_path). Needs feasibility for every
/// topmost node. `impacts` maps consequence-edge id to effective impact,
/// `original_impacts` to the pre-countermeasure one.
void determine_risk(Evaluation& evaluation, const RiskGraph& graph, const Profile& profile,
                    const std::map<Id, Rank>& impacts, const std::map<Id, Rank>& original_impacts);

struct CriticalPath {
    std::vector<Id> nodes;
    bool tree = false;

    bool operator==(const CriticalPath&) const = default;
};

/// Follows the recorded selections down from the consequence's highest-risk
/// topmost node. Throws UnknownConsequence.
CriticalPath critical_path(const Evaluation& evaluation, const RiskGraph& graph, const Id& consequence);

}  // namespace rag
