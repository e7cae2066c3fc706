#include "rag/schema.hpp"

#include <algorithm>
#include <set>

#include "rag/error.hpp"

namespace rag {

std::string_view to_string(SchemaKind kind) {
    switch (kind) {
        case SchemaKind::Node: return "node";
        case SchemaKind::Edge: return "edge";
        case SchemaKind::Consequence: return "consequence";
    }
    return "node";
}

std::optional<SchemaKind> schema_kind_from_string(std::string_view text) {
    if (text == "node") return SchemaKind::Node;
    if (text == "edge") return SchemaKind::Edge;
    if (text == "consequence") return SchemaKind::Consequence;
    return std::nullopt;
}

AttributeSchema::AttributeSchema(std::string name, SchemaKind kind, std::vector<SchemaValue> values,
                                 bool computed, bool bounded)
    : name_(std::move(name)),
      kind_(kind),
      values_(std::move(values)),
      computed_(computed),
      bounded_(bounded) {
    if (name_.empty()) throw Error("attribute schema needs a name");
    if (values_.empty()) throw Error("schema '" + name_ + "' has an empty domain");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i > 0 && values_[i].rank <= values_[i - 1].rank)
            throw Error("schema '" + name_ + "': ranks must be strictly increasing");
        if (!labels.insert(values_[i].label).second)
            throw Error("schema '" + name_ + "': duplicate label '" + values_[i].label + "'");
    }
    if (computed_ && kind_ != SchemaKind::Node)
        throw Error("schema '" + name_ + "': only node schemas can be computed");
}

bool AttributeSchema::contains(Rank rank) const noexcept { return index_of(rank).has_value(); }

std::optional<std::size_t> AttributeSchema::index_of(Rank rank) const noexcept {
    auto it = std::lower_bound(values_.begin(), values_.end(), rank,
                               [](const SchemaValue& v, Rank r) { return v.rank < r; });
    if (it == values_.end() || it->rank != rank) return std::nullopt;
    return static_cast<std::size_t>(it - values_.begin());
}

std::optional<std::string> AttributeSchema::label_of(Rank rank) const {
    if (auto idx = index_of(rank)) return values_[*idx].label;
    return std::nullopt;
}

std::optional<Rank> AttributeSchema::rank_of(std::string_view label) const {
    for (const auto& v : values_)
        if (v.label == label) return v.rank;
    return std::nullopt;
}

Rank AttributeSchema::clamp(Rank value) const noexcept {
    if (value < x_min()) return x_min();
    if (bounded_ && value > x_max()) return x_max();
    return value;
}

std::string AttributeSchema::display(Rank rank) const {
    if (auto label = label_of(rank)) return *label;
    return std::to_string(rank);
}

}  // namespace rag
