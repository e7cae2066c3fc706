#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rag {

using Rank = int;
using Id = std::string;

/// Attribute name -> rank. Ordered so every report iterates deterministically.
using AttributeMap = std::map<std::string, Rank>;

enum class SchemaKind { Node, Edge, Consequence };

std::string_view to_string(SchemaKind kind);
std::optional<SchemaKind> schema_kind_from_string(std::string_view text);

struct SchemaValue {
    std::string label;
    Rank rank = 0;

    bool operator==(const SchemaValue&) const = default;
};

/// A named, ordered, finite value domain.
///
/// Ranks are strictly increasing and labels unique; the constructor enforces
/// both. Node schemas are either rated (assigned on basic attack nodes) or
/// computed (produced by the feasibility pipeline). `bounded == false` marks an
/// attribute whose aggregated values are plain integers above `x_min()` (the
/// attack-potential parameters), so caps are not applied on aggregation.
class AttributeSchema {
public:
    AttributeSchema(std::string name, SchemaKind kind, std::vector<SchemaValue> values,
                    bool computed = false, bool bounded = true);

    const std::string& name() const noexcept { return name_; }
    SchemaKind kind() const noexcept { return kind_; }
    bool computed() const noexcept { return computed_; }
    bool rated() const noexcept { return kind_ == SchemaKind::Node && !computed_; }
    bool bounded() const noexcept { return bounded_; }
    const std::vector<SchemaValue>& values() const noexcept { return values_; }

    Rank x_min() const noexcept { return values_.front().rank; }
    Rank x_max() const noexcept { return values_.back().rank; }

    bool contains(Rank rank) const noexcept;
    std::optional<std::size_t> index_of(Rank rank) const noexcept;
    std::optional<std::string> label_of(Rank rank) const;
    std::optional<Rank> rank_of(std::string_view label) const;

    /// Clamps into [x_min, x_max]; unbounded schemas only clamp from below.
    Rank clamp(Rank value) const noexcept;

    /// Label when the rank is in the domain, otherwise the decimal rank.
    std::string display(Rank rank) const;

    bool operator==(const AttributeSchema&) const = default;

private:
    std::string name_;
    SchemaKind kind_;
    std::vector<SchemaValue> values_;
    bool computed_;
    bool bounded_;
};

}  // namespace rag
