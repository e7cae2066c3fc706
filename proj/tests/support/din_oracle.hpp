#pragma once

#include <map>
#include <string>
#include <vector>

#include "rag/graph.hpp"

namespace rag::testing {

/// Reference DIN evaluation written straight from the tables: plain
/// recursion, no memoization, no use of the engine's profile machinery.
struct OracleValue {
    int resources = 0;
    int knowledge = 0;
    int location = 0;
    int af = 0;

    bool operator==(const OracleValue&) const = default;
};

class DinOracle {
public:
    explicit DinOracle(const RiskGraph& graph);

    OracleValue value(const std::string& attack) const;
    /// Consequence id -> risk rank (Low 1 .. Very High 4).
    std::map<std::string, int> risks() const;
    /// Every choice of one child per OR node is enumerated; a choice is
    /// admissible when each chosen child is a best child (highest AF, then
    /// lowest Resources, then lowest Knowledge). The lexicographically first
    /// admissible choice (by node id) determines the path, listed parents
    /// first.
    std::vector<std::string> critical_path(const std::string& consequence) const;

    static int paf(int resources, int knowledge);
    static int af(int resources, int knowledge, int location);
    static int risk(int impact, int af);

private:
    bool is_and(const std::string& id) const;
    std::string topmost_for(const std::string& consequence) const;

    const RiskGraph& graph_;
    std::map<std::string, std::vector<std::string>> children_;
    std::map<std::string, std::vector<std::pair<std::string, std::map<std::string, int>>>> hardening_;
};

}  // namespace rag::testing
