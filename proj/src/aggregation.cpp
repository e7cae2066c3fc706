#include "rag/aggregation.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "rag/error.hpp"

namespace rag {

namespace {

void require_values(std::span<const Rank> values) {
    if (values.empty()) throw EmptyInput();
}

Rank sum_unbounded(std::span<const Rank> values) {
    std::int64_t total = 0;
    for (Rank v : values) total += v;
    return static_cast<Rank>(std::clamp<std::int64_t>(total, INT32_MIN, INT32_MAX));
}

}  // namespace

Rank f_max(std::span<const Rank> values) {
    require_values(values);
    return *std::max_element(values.begin(), values.end());
}

Rank f_min(std::span<const Rank> values) {
    require_values(values);
    return *std::min_element(values.begin(), values.end());
}

Rank f_sum(std::span<const Rank> values, Rank x_max) {
    require_values(values);
    return std::min(sum_unbounded(values), x_max);
}

Rank f_prod(std::span<const Rank> values, Rank x_max) {
    require_values(values);
    std::int64_t product = 1;
    for (Rank v : values) {
        product *= v;
        // saturate; a later zero factor must still produce zero
        product = std::clamp<std::int64_t>(product, -(std::int64_t{1} << 40), std::int64_t{1} << 40);
    }
    return static_cast<Rank>(std::min<std::int64_t>(product, x_max));
}

std::string_view to_string(BaseFunction fn) {
    switch (fn) {
        case BaseFunction::Max: return "max";
        case BaseFunction::Min: return "min";
        case BaseFunction::Sum: return "sum";
        case BaseFunction::Product: return "product";
    }
    return "sum";
}

std::optional<BaseFunction> base_function_from_string(std::string_view text) {
    if (text == "max") return BaseFunction::Max;
    if (text == "min") return BaseFunction::Min;
    if (text == "sum") return BaseFunction::Sum;
    if (text == "product") return BaseFunction::Product;
    return std::nullopt;
}

Rank apply_aggregator(const AttributeAggregator& aggregator, std::span<const Rank> values,
                      const AttributeSchema& schema) {
    require_values(values);
    Rank result = 0;
    switch (aggregator.function) {
        case BaseFunction::Max: result = f_max(values); break;
        case BaseFunction::Min: result = f_min(values); break;
        case BaseFunction::Sum:
            result = schema.bounded() ? f_sum(values, schema.x_max()) : sum_unbounded(values);
            break;
        case BaseFunction::Product:
            result = f_prod(values, schema.bounded() ? schema.x_max() : INT32_MAX);
            break;
    }
    // Underflow is impossible for in-domain inputs; the clamp keeps x_min as a floor anyway.
    return schema.clamp(result);
}

// ---------------------------------------------------------------------------
// LookupMatrix

LookupMatrix::LookupMatrix(std::vector<const AttributeSchema*> axes, const AttributeSchema& output,
                           std::vector<Rank> cells)
    : output_(output.name()), cells_(std::move(cells)) {
    if (axes.empty()) throw Error("lookup matrix needs at least one axis");
    std::size_t expected = 1;
    for (const AttributeSchema* axis : axes) {
        axis_names_.push_back(axis->name());
        std::vector<Rank> ranks;
        for (const auto& v : axis->values()) ranks.push_back(v.rank);
        expected *= ranks.size();
        axis_ranks_.push_back(std::move(ranks));
    }
    if (cells_.size() != expected)
        throw Error("lookup matrix has " + std::to_string(cells_.size()) + " cells, expected " +
                    std::to_string(expected));
    for (Rank cell : cells_)
        if (!output.contains(cell))
            throw OutOfDomain("lookup matrix cell " + std::to_string(cell) + " is outside '" +
                              output.name() + "'");
}

void LookupMatrix::declare_monotone(std::vector<int> directions) {
    if (directions.size() != axis_ranks_.size())
        throw Error("monotonicity needs one entry per axis");
    for (std::size_t a = 0; a < directions.size(); ++a)
        if (directions[a] != 0 && !monotone_along(a, directions[a]))
            throw Error(std::string("matrix is not ") +
                        (directions[a] < 0 ? "non-increasing" : "non-decreasing") + " along '" +
                        axis_names_[a] + "'");
    monotone_ = std::move(directions);
}

Rank LookupMatrix::at(std::span<const Rank> ranks) const {
    if (ranks.size() != axis_ranks_.size())
        throw OutOfDomain("lookup matrix expects " + std::to_string(axis_ranks_.size()) + " coordinates");
    std::size_t offset = 0;
    for (std::size_t a = 0; a < ranks.size(); ++a) {
        const auto& domain = axis_ranks_[a];
        auto it = std::find(domain.begin(), domain.end(), ranks[a]);
        if (it == domain.end())
            throw OutOfDomain("value " + std::to_string(ranks[a]) + " is outside axis '" +
                              axis_names_[a] + "'");
        offset = offset * domain.size() + static_cast<std::size_t>(it - domain.begin());
    }
    return cells_[offset];
}

bool LookupMatrix::monotone_along(std::size_t axis, int direction) const {
    const std::size_t dims = axis_ranks_.size();
    std::vector<std::size_t> stride(dims, 1);
    for (std::size_t a = dims - 1; a > 0; --a) stride[a - 1] = stride[a] * axis_ranks_[a].size();
    const std::size_t len = axis_ranks_[axis].size();
    for (std::size_t offset = 0; offset < cells_.size(); ++offset) {
        const std::size_t pos = (offset / stride[axis]) % len;
        if (pos + 1 == len) continue;
        const Rank here = cells_[offset];
        const Rank next = cells_[offset + stride[axis]];
        if (direction < 0 && next > here) return false;
        if (direction > 0 && next < here) return false;
    }
    return true;
}

Rank matrix_lookup(const LookupMatrix& matrix, const AttributeMap& coords) {
    std::vector<Rank> ranks;
    ranks.reserve(matrix.axes().size());
    for (const auto& axis : matrix.axes()) {
        auto it = coords.find(axis);
        if (it == coords.end()) throw MissingAxis("no value for matrix axis '" + axis + "'");
        ranks.push_back(it->second);
    }
    return matrix.at(ranks);
}

// ---------------------------------------------------------------------------
// Selection

namespace {

Rank tiebreak_value(const AttributeMap& attrs, const std::string& attribute) {
    if (attribute == kAttributeSum)
        return std::accumulate(attrs.begin(), attrs.end(), Rank{0},
                               [](Rank acc, const auto& kv) { return acc + kv.second; });
    auto it = attrs.find(attribute);
    return it == attrs.end() ? 0 : it->second;
}

}  // namespace

bool preferred(const Candidate& a, const Candidate& b, const TieBreakPolicy& policy) {
    if (a.metric != b.metric) return a.metric > b.metric;
    for (const auto& tb : policy.tiebreakers) {
        const Rank va = tiebreak_value(*a.attributes, tb.attribute);
        const Rank vb = tiebreak_value(*b.attributes, tb.attribute);
        if (va != vb) return tb.direction == Direction::Lowest ? va < vb : va > vb;
    }
    return a.id < b.id;
}

std::size_t aggregate_or(std::span<const Candidate> candidates, const TieBreakPolicy& policy) {
    if (candidates.empty()) throw EmptyInput();
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (preferred(candidates[i], candidates[best], policy)) best = i;
    return best;
}

std::vector<std::size_t> rank_candidates(std::span<const Candidate> candidates,
                                         const TieBreakPolicy& policy) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preferred(candidates[a], candidates[b], policy);
    });
    return order;
}

AttributeMap combine_children(std::span<const AttributeMap> children,
                              std::span<const AttributeSchema* const> schemas,
                              const std::map<std::string, AttributeAggregator>& aggregators) {
    if (children.empty()) throw EmptyInput();
    for (const auto& child : children)
        if (child.size() != schemas.size())
            throw SchemaMismatch("child carries " + std::to_string(child.size()) +
                                 " attributes, expected " + std::to_string(schemas.size()));
    AttributeMap result;
    std::vector<Rank> column(children.size());
    for (const AttributeSchema* schema : schemas) {
        for (std::size_t i = 0; i < children.size(); ++i) {
            auto it = children[i].find(schema->name());
            if (it == children[i].end())
                throw SchemaMismatch("child is missing attribute '" + schema->name() + "'");
            column[i] = it->second;
        }
        auto agg = aggregators.find(schema->name());
        const AttributeAggregator rule = agg == aggregators.end() ? AttributeAggregator{} : agg->second;
        result[schema->name()] = apply_aggregator(rule, column, *schema);
    }
    return result;
}

AttributeMap aggregate_and(std::span<const AttributeMap> children,
                           std::span<const AttributeSchema* const> schemas) {
    return combine_children(children, schemas, {});
}

std::string_view to_string(Connector::Kind kind) {
    switch (kind) {
        case Connector::Kind::Combine: return "combine";
        case Connector::Kind::Select: return "select";
        case Connector::Kind::Threshold: return "threshold";
    }
    return "select";
}

}  // namespace rag
