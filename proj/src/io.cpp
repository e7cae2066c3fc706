#include "rag/io.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "rag/error.hpp"

namespace rag {

using nlohmann::json;

namespace {

// Structural problem at a JSON-pointer path; turned into ParseError by the
// entry points once a position is known.
struct Problem {
    std::string path;
    std::string message;
};

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

// Offsets of every value in a syntactically valid document, by pointer.
class Locator {
public:
    explicit Locator(std::string_view text) : s_(text) {
        skip_ws();
        value("");
    }

    std::size_t offset(std::string path) const {
        for (;;) {
            if (auto it = pos_.find(path); it != pos_.end()) return it->second;
            if (path.empty()) return 0;
            path.erase(path.rfind('/'));
        }
    }

private:
    void skip_ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) ++i_;
    }

    std::string string_token() {
        std::size_t start = i_++;
        while (i_ < s_.size() && s_[i_] != '"') i_ += s_[i_] == '\\' ? 2 : 1;
        ++i_;
        return json::parse(s_.substr(start, i_ - start)).get<std::string>();
    }

    void value(const std::string& path) {
        pos_.emplace(path, i_);
        if (i_ >= s_.size()) return;
        char c = s_[i_];
        if (c == '{') {
            ++i_;
            skip_ws();
            while (i_ < s_.size() && s_[i_] != '}') {
                std::string key = string_token();
                skip_ws();
                ++i_;  // ':'
                skip_ws();
                value(path + "/" + escape_token(key));
                skip_ws();
                if (i_ < s_.size() && s_[i_] == ',') ++i_;
                skip_ws();
            }
            ++i_;
        } else if (c == '[') {
            ++i_;
            skip_ws();
            for (std::size_t n = 0; i_ < s_.size() && s_[i_] != ']'; ++n) {
                value(path + "/" + std::to_string(n));
                skip_ws();
                if (i_ < s_.size() && s_[i_] == ',') ++i_;
                skip_ws();
            }
            ++i_;
        } else if (c == '"') {
            string_token();
        } else {
            while (i_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[i_]) == std::string_view::npos) ++i_;
        }
    }

    std::string_view s_;
    std::size_t i_ = 0;
    std::map<std::string, std::size_t> pos_;
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

class Reader {
public:
    explicit Reader(ParseMode mode) : mode_(mode) {}

    [[noreturn]] static void fail(const std::string& path, const std::string& message) {
        throw Problem{path, message};
    }

    const json& require(const json& obj, const std::string& key, const std::string& path) const {
        auto it = obj.find(key);
        if (it == obj.end()) fail(path, "missing required field '" + key + "'");
        return *it;
    }

    std::string string_at(const json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    Rank rank_at(const json& v, const std::string& path) const {
        if (!v.is_number_integer()) fail(path, "expected an integer");
        if (v.is_number_unsigned() ? v.get<std::uint64_t>() > std::uint64_t(std::numeric_limits<Rank>::max())
                                   : (v.get<std::int64_t>() < std::numeric_limits<Rank>::min() ||
                                      v.get<std::int64_t>() > std::numeric_limits<Rank>::max()))
            fail(path, "integer out of range");
        return static_cast<Rank>(v.get<std::int64_t>());
    }

    AttributeMap attributes_at(const json& v, const std::string& path) const {
        if (!v.is_object()) fail(path, "expected an object of attribute ranks");
        AttributeMap out;
        for (const auto& [k, r] : v.items()) out[k] = rank_at(r, path + "/" + escape_token(k));
        return out;
    }

    // Unknown keys: rejected (strict) or returned (lenient).
    json leftovers(const json& obj, const std::set<std::string>& known, const std::string& path) const {
        json extra;
        for (const auto& [k, v] : obj.items()) {
            if (known.contains(k)) continue;
            if (mode_ == ParseMode::Strict) fail(path + "/" + escape_token(k), "unknown field '" + k + "'");
            extra[k] = v;
        }
        return extra;
    }

    Node node(const json& v, const std::string& path) const {
        if (!v.is_object()) fail(path, "expected a node object");
        Node n;
        n.id = string_at(require(v, "id", path), path + "/id");
        std::string kind = string_at(require(v, "kind", path), path + "/kind");
        auto k = node_kind_from_string(kind);
        if (!k) fail(path + "/kind", "unknown node kind '" + kind + "'");
        n.kind = *k;
        if (auto it = v.find("label"); it != v.end()) n.label = string_at(*it, path + "/label");
        if (auto it = v.find("ratings"); it != v.end()) n.ratings = attributes_at(*it, path + "/ratings");
        if (auto it = v.find("connector"); it != v.end()) n.connector = string_at(*it, path + "/connector");
        if (auto it = v.find("combine"); it != v.end()) n.combine = string_at(*it, path + "/combine");
        if (auto it = v.find("display"); it != v.end()) n.display = *it;
        n.extra = leftovers(v, {"id", "kind", "label", "ratings", "connector", "combine", "display"}, path);
        return n;
    }

    Edge edge(const json& v, const std::string& path) const {
        if (!v.is_object()) fail(path, "expected an edge object");
        Edge e;
        e.id = string_at(require(v, "id", path), path + "/id");
        std::string kind = string_at(require(v, "kind", path), path + "/kind");
        auto k = edge_kind_from_string(kind);
        if (!k) fail(path + "/kind", "unknown edge kind '" + kind + "'");
        e.kind = *k;
        e.source = string_at(require(v, "source", path), path + "/source");
        e.target = string_at(require(v, "target", path), path + "/target");
        if (auto it = v.find("attributes"); it != v.end()) e.attributes = attributes_at(*it, path + "/attributes");
        if (auto it = v.find("display"); it != v.end()) e.display = *it;
        e.extra = leftovers(v, {"id", "kind", "source", "target", "attributes", "display"}, path);
        return e;
    }

    RiskGraph graph(const json& doc) const {
        if (!doc.is_object()) fail("", "expected a graph object");
        const json& version = require(doc, "format_version", "");
        if (!version.is_string()) fail("/format_version", "expected a string");
        if (version.get<std::string>() != kFormatVersion) throw VersionError(version.get<std::string>());

        std::string profile_name;
        json inline_profile;
        if (auto it = doc.find("profile"); it != doc.end()) {
            if (it->is_string())
                profile_name = it->get<std::string>();
            else if (it->is_object())
                inline_profile = *it;
            else
                fail("/profile", "expected a profile name or an inline profile object");
        }
        json metadata = json::object();
        if (auto it = doc.find("metadata"); it != doc.end()) {
            if (!it->is_object()) fail("/metadata", "expected an object");
            metadata = *it;
        }
        const json& nodes = require(doc, "nodes", "");
        if (!nodes.is_array()) fail("/nodes", "expected an array");
        std::vector<Node> ns;
        for (std::size_t i = 0; i < nodes.size(); ++i) ns.push_back(node(nodes[i], "/nodes/" + std::to_string(i)));
        std::vector<Edge> es;
        if (auto it = doc.find("edges"); it != doc.end()) {
            if (!it->is_array()) fail("/edges", "expected an array");
            for (std::size_t i = 0; i < it->size(); ++i) es.push_back(edge((*it)[i], "/edges/" + std::to_string(i)));
        }

        RiskGraph g(std::move(ns), std::move(es), inline_profile.is_null() ? profile_name : std::string(),
                    std::move(metadata));
        if (!inline_profile.is_null()) {
            if (auto name = inline_profile.find("name"); name != inline_profile.end() && name->is_string())
                g = RiskGraph(g.nodes(), g.edges(), name->get<std::string>(), g.metadata());
            g.set_inline_profile(inline_profile);
        }
        if (auto it = doc.find("display"); it != doc.end()) g.display = *it;
        g.extra = leftovers(doc, {"format_version", "profile", "metadata", "nodes", "edges", "display"}, "");
        return g;
    }

private:
    ParseMode mode_;
};

}  // namespace

RiskGraph graph_from_json(const json& document, ParseMode mode) {
    try {
        return Reader(mode).graph(document);
    } catch (const Problem& p) {
        throw ParseError(0, 0, p.path, p.message);
    }
}

RiskGraph parse_graph(std::string_view text, ParseMode mode) {
    if (text.starts_with("\xEF\xBB\xBF")) throw ParseError(1, 1, "", "byte order mark is not allowed");
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string what = e.what();
        if (auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
        for (char& c : what)
            if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) c = '?';
        throw ParseError(line, column, "", what);
    } catch (const json::exception& e) {
        throw ParseError(1, 1, "", e.what());
    }
    try {
        return Reader(mode).graph(doc);
    } catch (const Problem& p) {
        auto [line, column] = line_column(text, Locator(text).offset(p.path));
        throw ParseError(line, column, p.path, p.message);
    } catch (const VersionError&) {
        throw;
    } catch (const json::exception& e) {
        throw ParseError(1, 1, "", e.what());
    }
}

json graph_to_json(const RiskGraph& graph) {
    json doc;
    doc["format_version"] = kFormatVersion;
    if (!graph.inline_profile().is_null())
        doc["profile"] = graph.inline_profile();
    else if (!graph.profile_name().empty())
        doc["profile"] = graph.profile_name();
    doc["metadata"] = graph.metadata();
    json nodes = json::array();
    for (const auto& n : graph.nodes()) {
        json j = n.extra.is_object() ? n.extra : json::object();
        j["id"] = n.id;
        j["kind"] = std::string(to_string(n.kind));
        j["label"] = n.label;
        if (!n.ratings.empty()) j["ratings"] = n.ratings;
        if (n.connector) j["connector"] = *n.connector;
        if (n.combine) j["combine"] = *n.combine;
        if (!n.display.is_null()) j["display"] = n.display;
        nodes.push_back(std::move(j));
    }
    doc["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const auto& e : graph.edges()) {
        json j = e.extra.is_object() ? e.extra : json::object();
        j["id"] = e.id;
        j["kind"] = std::string(to_string(e.kind));
        j["source"] = e.source;
        j["target"] = e.target;
        if (!e.attributes.empty()) j["attributes"] = e.attributes;
        if (!e.display.is_null()) j["display"] = e.display;
        edges.push_back(std::move(j));
    }
    doc["edges"] = std::move(edges);
    if (!graph.display.is_null()) doc["display"] = graph.display;
    if (graph.extra.is_object())
        for (const auto& [k, v] : graph.extra.items()) doc[k] = v;
    return doc;
}

std::string serialize_graph(const RiskGraph& graph) { return graph_to_json(graph).dump(2) + "\n"; }

Profile graph_profile(const RiskGraph& graph, const std::optional<std::string>& override_name,
                      const std::vector<std::filesystem::path>& search_dirs) {
    if (override_name) return resolve_profile(*override_name, search_dirs);
    if (!graph.inline_profile().is_null()) return load_profile(graph.inline_profile());
    if (graph.profile_name().empty()) throw Error("graph names no profile; pass one explicitly");
    return resolve_profile(graph.profile_name(), search_dirs);
}

std::pair<std::pair<Id, std::string>, Rank> parse_override(std::string_view text, const Profile& profile) {
    auto eq = text.find('=');
    if (eq == std::string_view::npos) throw Error("override '" + std::string(text) + "' lacks '='");
    std::string_view lhs = text.substr(0, eq);
    std::string value(text.substr(eq + 1));
    auto dot = lhs.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == lhs.size())
        throw Error("override '" + std::string(text) + "' must look like node.attribute=rank");
    std::string attr(lhs.substr(dot + 1));
    const AttributeSchema* schema = profile.find_schema(attr);
    if (!schema) throw Error("unknown attribute '" + attr + "'");
    Rank rank = 0;
    if (auto r = schema->rank_of(value)) {
        rank = *r;
    } else {
        try {
            std::size_t used = 0;
            rank = std::stoi(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw Error("'" + value + "' is neither a rank nor a label of " + attr);
        }
    }
    return {{Id(lhs.substr(0, dot)), attr}, rank};
}

Overlay overlay_from_json(const json& document, const Profile& profile) {
    Overlay o;
    if (document.is_null()) return o;
    if (!document.is_object()) throw ParseError(0, 0, "/overlay", "expected an object");
    for (const auto& [k, _] : document.items())
        if (k != "disabled" && k != "overrides") throw ParseError(0, 0, "/overlay/" + k, "unknown field '" + k + "'");
    if (auto it = document.find("disabled"); it != document.end()) {
        if (!it->is_array()) throw ParseError(0, 0, "/overlay/disabled", "expected an array of ids");
        for (std::size_t i = 0; i < it->size(); ++i) {
            if (!(*it)[i].is_string())
                throw ParseError(0, 0, "/overlay/disabled/" + std::to_string(i), "expected a string");
            o.disabled.insert((*it)[i].get<std::string>());
        }
    }
    if (auto it = document.find("overrides"); it != document.end()) {
        if (!it->is_array()) throw ParseError(0, 0, "/overlay/overrides", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& v = (*it)[i];
            std::string path = "/overlay/overrides/" + std::to_string(i);
            if (!v.is_object() || !v.contains("target") || !v.contains("attribute") || !v.contains("value") ||
                !v["target"].is_string() || !v["attribute"].is_string())
                throw ParseError(0, 0, path, "expected {target, attribute, value}");
            std::string attr = v["attribute"].get<std::string>();
            Rank rank = 0;
            if (v["value"].is_number_integer()) {
                rank = v["value"].get<Rank>();
            } else if (v["value"].is_string()) {
                const AttributeSchema* schema = profile.find_schema(attr);
                auto r = schema ? schema->rank_of(v["value"].get<std::string>()) : std::nullopt;
                if (!r) throw ParseError(0, 0, path + "/value", "unknown label for '" + attr + "'");
                rank = *r;
            } else {
                throw ParseError(0, 0, path + "/value", "expected a rank or label");
            }
            o.rating_overrides[{v["target"].get<std::string>(), attr}] = rank;
        }
    }
    return o;
}

json overlay_to_json(const Overlay& overlay) {
    json out;
    out["disabled"] = overlay.disabled;
    json overrides = json::array();
    for (const auto& [key, value] : overlay.rating_overrides)
        overrides.push_back({{"target", key.first}, {"attribute", key.second}, {"value", value}});
    out["overrides"] = std::move(overrides);
    return out;
}

}  // namespace rag
