#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rag/countermeasures.hpp"
#include "rag/evaluation.hpp"
#include "rag/graph.hpp"
#include "rag/profile.hpp"
#include "rag/validate.hpp"

namespace rag {

inline constexpr const char* kFormatVersion = "1";

enum class ParseMode { Strict, Lenient };

/// Parses a .rag document. Throws ParseError (with 1-based line/column and a
/// JSON-pointer path) or VersionError. Strict mode rejects unknown fields;
/// lenient mode keeps them in the `extra` members.
RiskGraph parse_graph(std::string_view text, ParseMode mode = ParseMode::Strict);

/// As parse_graph, from an already-parsed document (positions are reported
/// as line 0, column 0).
RiskGraph graph_from_json(const nlohmann::json& document, ParseMode mode = ParseMode::Strict);

nlohmann::json graph_to_json(const RiskGraph& graph);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string serialize_graph(const RiskGraph& graph);

/// Resolves the profile for `graph`: `override_name` if given, else the
/// inline profile document, else the graph's profile name.
Profile graph_profile(const RiskGraph& graph, const std::optional<std::string>& override_name,
                      const std::vector<std::filesystem::path>& search_dirs);

enum class ReportFormat { Text, Json, Dot };

std::optional<ReportFormat> report_format_from_string(std::string_view text);

nlohmann::json evaluation_to_json(const Evaluation& evaluation);
/// Throws ParseError on a malformed document.
Evaluation evaluation_from_json(const nlohmann::json& document);

nlohmann::json what_if_to_json(const WhatIfReport& report);

/// Deterministic report text. Json output ends with a newline.
std::string emit_report(const Evaluation& evaluation, const RiskGraph& graph, const Profile& profile,
                        ReportFormat format);

std::string format_validation(const ValidationReport& report);
nlohmann::json validation_to_json(const ValidationReport& report);

/// Parses "node.attr=rank" (the node part may itself contain dots; the last
/// dot separates the attribute). Attribute may be a rank or a schema label.
/// Throws Error.
std::pair<std::pair<Id, std::string>, Rank> parse_override(std::string_view text, const Profile& profile);

/// Reads {"disabled": [ids], "overrides": [{"target", "attribute", "value"}]}
/// where value is a rank or a schema label. Throws ParseError.
Overlay overlay_from_json(const nlohmann::json& document, const Profile& profile);
nlohmann::json overlay_to_json(const Overlay& overlay);

}  // namespace rag
