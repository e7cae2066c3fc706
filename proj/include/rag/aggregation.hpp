#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rag/schema.hpp"

namespace rag {

// Base value functions. Each throws EmptyInput on an empty span.
Rank f_max(std::span<const Rank> values);
Rank f_min(std::span<const Rank> values);
/// min(sum, x_max)
Rank f_sum(std::span<const Rank> values, Rank x_max);
/// min(product, x_max)
Rank f_prod(std::span<const Rank> values, Rank x_max);

enum class BaseFunction { Max, Min, Sum, Product };

std::string_view to_string(BaseFunction fn);
std::optional<BaseFunction> base_function_from_string(std::string_view text);

/// One attribute's combination rule inside a connector. Sum and Product are
/// capped at the schema's x_max unless the schema is unbounded.
struct AttributeAggregator {
    BaseFunction function = BaseFunction::Sum;

    bool operator==(const AttributeAggregator&) const = default;
};

/// Applies `aggregator` and keeps the result inside the schema range.
Rank apply_aggregator(const AttributeAggregator& aggregator, std::span<const Rank> values,
                      const AttributeSchema& schema);

/// A d-dimensional total lookup table over schema domains.
///
/// Cells are stored row-major in the order of `axes`, indexed by each axis
/// value's position in its schema domain.
class LookupMatrix {
public:
    LookupMatrix(std::vector<const AttributeSchema*> axes, const AttributeSchema& output,
                 std::vector<Rank> cells);

    /// Per-axis monotonicity the table claims (-1 non-increasing, +1
    /// non-decreasing, 0 unconstrained). Throws Error if the cells disagree.
    void declare_monotone(std::vector<int> directions);
    const std::vector<int>& declared_monotone() const noexcept { return monotone_; }

    const std::vector<std::string>& axes() const noexcept { return axis_names_; }
    const std::vector<std::vector<Rank>>& axis_ranks() const noexcept { return axis_ranks_; }
    const std::string& output() const noexcept { return output_; }
    const std::vector<Rank>& cells() const noexcept { return cells_; }

    /// Throws OutOfDomain when `ranks.size()` does not match or a rank is not
    /// in its axis domain.
    Rank at(std::span<const Rank> ranks) const;

    /// True when the table never rises (direction < 0) or never falls
    /// (direction > 0) along `axis` with every other coordinate fixed.
    bool monotone_along(std::size_t axis, int direction) const;

    bool operator==(const LookupMatrix&) const = default;

private:
    std::vector<std::string> axis_names_;
    std::vector<std::vector<Rank>> axis_ranks_;
    std::string output_;
    std::vector<Rank> cells_;
    std::vector<int> monotone_;
};

/// Reads the axes named by the matrix out of `coords`; keys that are not axes
/// are ignored. Throws MissingAxis or OutOfDomain.
Rank matrix_lookup(const LookupMatrix& matrix, const AttributeMap& coords);

/// Synthetic tie-break attribute: the sum of all of a child's attribute values.
inline constexpr std::string_view kAttributeSum = "@sum";

enum class Direction { Lowest, Highest };

struct TieBreaker {
    std::string attribute;
    Direction direction = Direction::Lowest;

    bool operator==(const TieBreaker&) const = default;
};

/// Selection order for disjunctive refinements: the highest `metric` wins,
/// then each tiebreaker in turn, then the lowest node id.
struct TieBreakPolicy {
    std::string metric;
    std::vector<TieBreaker> tiebreakers;

    bool operator==(const TieBreakPolicy&) const = default;
};

struct Candidate {
    Id id;
    const AttributeMap* attributes = nullptr;
    Rank metric = 0;
};

/// Strict "a is preferred over b" under `policy`.
bool preferred(const Candidate& a, const Candidate& b, const TieBreakPolicy& policy);

/// Index of the selected candidate. Throws EmptyInput.
std::size_t aggregate_or(std::span<const Candidate> candidates, const TieBreakPolicy& policy);

/// Candidate indices in preference order.
std::vector<std::size_t> rank_candidates(std::span<const Candidate> candidates,
                                         const TieBreakPolicy& policy);

/// Capped sum per schema over complete child maps. Throws EmptyInput or
/// SchemaMismatch when a child lacks (or adds) an attribute.
AttributeMap aggregate_and(std::span<const AttributeMap> children,
                           std::span<const AttributeSchema* const> schemas);

/// General per-attribute combination used by AND-like connectors.
AttributeMap combine_children(std::span<const AttributeMap> children,
                              std::span<const AttributeSchema* const> schemas,
                              const std::map<std::string, AttributeAggregator>& aggregators);

/// Refinement semantics registered under a connector name.
///
/// Combine: every child is required; attributes merge per `aggregators`.
/// Select: one child suffices; the preferred child's attributes are adopted.
/// Threshold: `k` of the children suffice; the k preferred children are
/// combined as in Combine. Threshold connectors are experimental.
struct Connector {
    enum class Kind { Combine, Select, Threshold };

    std::string name;
    Kind kind = Kind::Select;
    std::map<std::string, AttributeAggregator> aggregators;
    TieBreakPolicy policy;
    int k = 0;

    bool operator==(const Connector&) const = default;
};

std::string_view to_string(Connector::Kind kind);

}  // namespace rag
