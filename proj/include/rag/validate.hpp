#pragma once

#include <string>
#include <vector>

#include "rag/error.hpp"
#include "rag/graph.hpp"
#include "rag/profile.hpp"

namespace rag {

struct Violation {
    std::string rule;
    /// Node or edge id the violation is about (first of `involved`).
    Id subject;
    std::string message;
    /// Every id taking part, ascending (e.g. all nodes on a cycle).
    std::vector<Id> involved;

    bool operator==(const Violation&) const = default;
};

/// Violations are invariant failures; notes are informational and never make
/// a graph invalid.
struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<Violation> notes;

    bool ok() const noexcept { return violations.empty(); }
    bool has(const std::string& rule) const;

    bool operator==(const ValidationReport&) const = default;
};

/// Structural and profile-conformance checks. Pure; deterministic ordering
/// (by subject, then rule).
ValidationReport validate(const RiskGraph& graph, const Profile& profile);

/// Raised by evaluation entry points that require a valid graph.
class ValidationError : public Error {
public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// Attack node ids, children before parents, ties by ascending id. Throws
/// CycleError.
std::vector<Id> topological_order(const RiskGraph& graph);

/// Strongly connected refinement components that form cycles, each sorted.
std::vector<std::vector<Id>> refinement_cycles(const RiskGraph& graph);

}  // namespace rag
