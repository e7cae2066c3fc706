#include "rag/profile.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rag/error.hpp"

namespace rag {

namespace detail {
// Generated from profiles/*.ragp at build time.
const std::map<std::string, std::string_view>& embedded_profiles();
}  // namespace detail

using nlohmann::json;

const std::string& stage_output(const Stage& stage) {
    return std::visit([](const auto& s) -> const std::string& { return s.output; }, stage);
}

const AttributeSchema* Profile::find_schema(const std::string& schema_name) const {
    for (const auto& s : schemas)
        if (s.name() == schema_name) return &s;
    return nullptr;
}

const AttributeSchema& Profile::schema(const std::string& schema_name) const {
    if (const auto* s = find_schema(schema_name)) return *s;
    throw Error("profile '" + name + "' has no schema '" + schema_name + "'");
}

std::vector<const AttributeSchema*> Profile::rated_schemas() const {
    std::vector<const AttributeSchema*> out;
    for (const auto& s : schemas)
        if (s.rated()) out.push_back(&s);
    return out;
}

std::vector<const AttributeSchema*> Profile::schemas_of(SchemaKind kind) const {
    std::vector<const AttributeSchema*> out;
    for (const auto& s : schemas)
        if (s.kind() == kind) out.push_back(&s);
    return out;
}

const LookupMatrix& Profile::risk_matrix() const { return matrices.at(risk.matrix); }

const AttributeSchema& Profile::risk_schema() const { return schema(risk_matrix().output()); }

const Connector* Profile::find_connector(const std::string& connector_name) const {
    auto it = connectors.find(connector_name);
    return it == connectors.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

/// Cursor over a JSON document that remembers where it is for error messages.
class Field {
public:
    Field(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

    const json& value() const { return value_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& message) const { throw ProfileError(path_.empty() ? "/" : path_, message); }

    Field at(const std::string& key) const {
        require_object();
        auto it = value_.find(key);
        if (it == value_.end()) Field(value_, path_ + "/" + key).fail("missing required field");
        return Field(*it, path_ + "/" + key);
    }

    std::optional<Field> maybe(const std::string& key) const {
        require_object();
        auto it = value_.find(key);
        if (it == value_.end()) return std::nullopt;
        return Field(*it, path_ + "/" + key);
    }

    Field at(std::size_t index) const { return Field(value_.at(index), path_ + "/" + std::to_string(index)); }

    void require_object() const {
        if (!value_.is_object()) fail("expected an object");
    }

    void require_array() const {
        if (!value_.is_array()) fail("expected an array");
    }

    void allow_keys(std::initializer_list<std::string_view> keys) const {
        require_object();
        for (const auto& [key, _] : value_.items())
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                Field(value_, path_ + "/" + key).fail("unknown field");
    }

    std::string string() const {
        if (!value_.is_string()) fail("expected a string");
        return value_.get<std::string>();
    }

    std::string identifier() const {
        auto s = string();
        if (s.empty()) fail("must not be empty");
        return s;
    }

    Rank integer() const {
        if (!value_.is_number_integer()) fail("expected an integer");
        const auto v = value_.get<std::int64_t>();
        if (v < -1'000'000'000 || v > 1'000'000'000) fail("integer out of range");
        return static_cast<Rank>(v);
    }

    bool boolean() const {
        if (!value_.is_boolean()) fail("expected a boolean");
        return value_.get<bool>();
    }

    std::size_t size() const { return value_.size(); }

private:
    const json& value_;
    std::string path_;
};

AttributeSchema read_schema(const Field& f) {
    f.allow_keys({"name", "kind", "values", "computed", "bounded", "description"});
    const auto name = f.at("name").identifier();
    const auto kind_field = f.at("kind");
    const auto kind = schema_kind_from_string(kind_field.string());
    if (!kind) kind_field.fail("kind must be node, edge or consequence");
    const auto values_field = f.at("values");
    values_field.require_array();
    std::vector<SchemaValue> values;
    for (std::size_t i = 0; i < values_field.size(); ++i) {
        const auto v = values_field.at(i);
        v.allow_keys({"label", "rank"});
        values.push_back({v.at("label").identifier(), v.at("rank").integer()});
    }
    const bool computed = f.maybe("computed") ? f.at("computed").boolean() : false;
    const bool bounded = f.maybe("bounded") ? f.at("bounded").boolean() : true;
    try {
        return AttributeSchema(name, *kind, std::move(values), computed, bounded);
    } catch (const Error& e) {
        f.fail(e.what());
    }
}

Rank read_cell(const Field& f, const AttributeSchema& output) {
    if (f.value().is_string()) {
        auto rank = output.rank_of(f.value().get<std::string>());
        if (!rank) f.fail("'" + f.value().get<std::string>() + "' is not a label of '" + output.name() + "'");
        return *rank;
    }
    const Rank r = f.integer();
    if (!output.contains(r)) f.fail(std::to_string(r) + " is not a rank of '" + output.name() + "'");
    return r;
}

void read_cells(const Field& f, const std::vector<const AttributeSchema*>& axes, std::size_t depth,
                const AttributeSchema& output, std::vector<Rank>& out) {
    f.require_array();
    const std::size_t expected = axes[depth]->values().size();
    if (f.size() != expected)
        f.fail("expected " + std::to_string(expected) + " entries for axis '" + axes[depth]->name() +
               "', found " + std::to_string(f.size()));
    for (std::size_t i = 0; i < expected; ++i) {
        if (depth + 1 == axes.size())
            out.push_back(read_cell(f.at(i), output));
        else
            read_cells(f.at(i), axes, depth + 1, output, out);
    }
}

LookupMatrix read_matrix(const Field& f, const Profile& profile) {
    f.allow_keys({"axes", "output", "cells", "monotone", "description"});
    const auto axes_field = f.at("axes");
    axes_field.require_array();
    if (axes_field.size() == 0) axes_field.fail("a matrix needs at least one axis");
    std::vector<const AttributeSchema*> axes;
    for (std::size_t i = 0; i < axes_field.size(); ++i) {
        const auto axis = axes_field.at(i);
        const auto* schema = profile.find_schema(axis.identifier());
        if (!schema) axis.fail("unknown schema '" + axis.string() + "'");
        axes.push_back(schema);
    }
    const auto output_field = f.at("output");
    const auto* output = profile.find_schema(output_field.identifier());
    if (!output) output_field.fail("unknown schema '" + output_field.string() + "'");
    std::vector<Rank> cells;
    read_cells(f.at("cells"), axes, 0, *output, cells);
    LookupMatrix matrix(axes, *output, std::move(cells));
    if (auto mono = f.maybe("monotone")) {
        mono->require_array();
        if (mono->size() != axes.size()) mono->fail("one entry per axis required");
        std::vector<int> directions;
        for (std::size_t i = 0; i < mono->size(); ++i) {
            const auto d = mono->at(i).string();
            if (d == "nonincreasing") directions.push_back(-1);
            else if (d == "nondecreasing") directions.push_back(1);
            else if (d == "none") directions.push_back(0);
            else mono->at(i).fail("expected nonincreasing, nondecreasing or none");
        }
        try {
            matrix.declare_monotone(std::move(directions));
        } catch (const Error& e) {
            mono->fail(e.what());
        }
    }
    return matrix;
}

TieBreakPolicy read_policy(const Field& f) {
    f.allow_keys({"metric", "tiebreakers"});
    TieBreakPolicy policy;
    policy.metric = f.at("metric").identifier();
    if (auto tbs = f.maybe("tiebreakers")) {
        tbs->require_array();
        for (std::size_t i = 0; i < tbs->size(); ++i) {
            const auto tb = tbs->at(i);
            tb.allow_keys({"attribute", "direction"});
            TieBreaker breaker{tb.at("attribute").identifier(), Direction::Lowest};
            if (auto dir = tb.maybe("direction")) {
                const auto d = dir->string();
                if (d == "highest") breaker.direction = Direction::Highest;
                else if (d != "lowest") dir->fail("expected lowest or highest");
            }
            policy.tiebreakers.push_back(std::move(breaker));
        }
    }
    return policy;
}

std::map<std::string, AttributeAggregator> read_aggregators(const Field& f, const Profile& profile) {
    std::map<std::string, AttributeAggregator> out;
    if (!f.value().is_object()) f.fail("expected an object");
    for (const auto& [attr, fn] : f.value().items()) {
        const Field entry(fn, f.path() + "/" + attr);
        const auto* schema = profile.find_schema(attr);
        if (!schema || !schema->rated()) entry.fail("'" + attr + "' is not a rated node schema");
        const auto parsed = base_function_from_string(entry.string());
        if (!parsed) entry.fail("expected max, min, sum or product");
        out[attr] = AttributeAggregator{*parsed};
    }
    for (const auto* schema : profile.rated_schemas())
        out.try_emplace(schema->name(), AttributeAggregator{});
    return out;
}

Connector read_connector(const std::string& name, const Field& f, const Profile& profile) {
    f.allow_keys({"kind", "aggregators", "policy", "k", "description"});
    Connector c;
    c.name = name;
    const auto kind_field = f.at("kind");
    const auto kind = kind_field.string();
    if (kind == "combine") {
        c.kind = Connector::Kind::Combine;
        c.aggregators = f.maybe("aggregators") ? read_aggregators(f.at("aggregators"), profile)
                                               : read_aggregators(Field(json::object(), f.path() + "/aggregators"), profile);
    } else if (kind == "select") {
        c.kind = Connector::Kind::Select;
        c.policy = read_policy(f.at("policy"));
    } else if (kind == "threshold") {
        c.kind = Connector::Kind::Threshold;
        c.policy = read_policy(f.at("policy"));
        c.aggregators = f.maybe("aggregators") ? read_aggregators(f.at("aggregators"), profile)
                                               : read_aggregators(Field(json::object(), f.path() + "/aggregators"), profile);
        c.k = f.at("k").integer();
        if (c.k < 1) f.at("k").fail("k must be at least 1");
    } else {
        kind_field.fail("expected combine, select or threshold");
    }
    return c;
}

Stage read_stage(const Field& f) {
    const auto type_field = f.at("type");
    const auto type = type_field.string();
    if (type == "matrix") {
        f.allow_keys({"type", "output", "matrix"});
        return MatrixStage{f.at("output").identifier(), f.at("matrix").identifier()};
    }
    if (type == "function") {
        f.allow_keys({"type", "output", "function", "inputs", "weights", "bias"});
        FunctionStage s;
        s.output = f.at("output").identifier();
        const auto fn_field = f.at("function");
        const auto fn = fn_field.string();
        if (fn == "add") s.function = StageFunction::Add;
        else if (fn == "subtract") s.function = StageFunction::Subtract;
        else if (fn == "affine") s.function = StageFunction::Affine;
        else fn_field.fail("expected add, subtract or affine");
        const auto inputs = f.at("inputs");
        inputs.require_array();
        for (std::size_t i = 0; i < inputs.size(); ++i) s.inputs.push_back(inputs.at(i).identifier());
        if (s.inputs.empty()) inputs.fail("at least one input required");
        if (s.function == StageFunction::Subtract && s.inputs.size() < 2)
            inputs.fail("subtract needs at least two inputs");
        if (auto w = f.maybe("weights")) {
            w->require_array();
            for (std::size_t i = 0; i < w->size(); ++i) s.weights.push_back(w->at(i).integer());
        }
        if (auto b = f.maybe("bias")) s.bias = b->integer();
        if (s.function == StageFunction::Affine) {
            if (s.weights.size() != s.inputs.size()) f.at("weights").fail("affine needs one weight per input");
        } else if (!s.weights.empty() || s.bias != 0) {
            f.fail("weights and bias apply to affine stages only");
        }
        return s;
    }
    if (type == "bands") {
        f.allow_keys({"type", "output", "input", "bands"});
        BandStage s;
        s.output = f.at("output").identifier();
        s.input = f.at("input").identifier();
        const auto bands = f.at("bands");
        bands.require_array();
        if (bands.size() == 0) bands.fail("at least one band required");
        for (std::size_t i = 0; i < bands.size(); ++i) {
            const auto b = bands.at(i);
            b.allow_keys({"min", "max", "value"});
            Band band{b.at("min").integer(), std::nullopt, b.at("value").integer()};
            if (auto mx = b.maybe("max")) band.max = mx->integer();
            if (band.max && *band.max < band.min) b.fail("max below min");
            if (i > 0) {
                const Band& prev = s.bands.back();
                if (!prev.max) bands.at(i - 1).fail("only the last band may be open-ended");
                if (band.min != *prev.max + 1) b.fail("bands must be contiguous without overlap");
            }
            s.bands.push_back(band);
        }
        if (s.bands.front().min != 0) bands.at(0).fail("bands must start at 0");
        if (s.bands.back().max) bands.at(bands.size() - 1).fail("the last band must be open-ended");
        return s;
    }
    type_field.fail("expected matrix, function or bands");
}

void check_pipeline(const Field& f, const Profile& profile) {
    std::set<std::string> available;
    for (const auto* s : profile.rated_schemas()) available.insert(s->name());
    std::set<std::string> outputs;
    for (std::size_t i = 0; i < profile.feasibility.stages.size(); ++i) {
        const Field sf = f.at("stages").at(i);
        const Stage& stage = profile.feasibility.stages[i];
        const auto& out = stage_output(stage);
        if (available.count(out)) sf.at("output").fail("'" + out + "' is already defined");
        if (const auto* s = profile.find_schema(out); s && !s->computed())
            sf.at("output").fail("'" + out + "' names a non-computed schema");
        auto need = [&](const std::string& input, const Field& where) {
            if (!available.count(input)) where.fail("input '" + input + "' is neither rated nor produced earlier");
        };
        if (const auto* m = std::get_if<MatrixStage>(&stage)) {
            auto it = profile.matrices.find(m->matrix);
            if (it == profile.matrices.end()) sf.at("matrix").fail("unknown matrix '" + m->matrix + "'");
            for (const auto& axis : it->second.axes()) need(axis, sf.at("matrix"));
            if (it->second.output() != m->output)
                sf.at("output").fail("matrix '" + m->matrix + "' produces '" + it->second.output() + "'");
        } else if (const auto* fs = std::get_if<FunctionStage>(&stage)) {
            for (std::size_t k = 0; k < fs->inputs.size(); ++k) need(fs->inputs[k], sf.at("inputs").at(k));
        } else if (const auto* bs = std::get_if<BandStage>(&stage)) {
            need(bs->input, sf.at("input"));
            if (const auto* target = profile.find_schema(bs->output))
                for (std::size_t k = 0; k < bs->bands.size(); ++k)
                    if (!target->contains(bs->bands[k].value))
                        sf.at("bands").at(k).at("value").fail("value outside '" + bs->output + "'");
        }
        available.insert(out);
        outputs.insert(out);
    }
    const auto* final_schema = profile.find_schema(profile.feasibility.final_output);
    if (!outputs.count(profile.feasibility.final_output))
        f.at("output").fail("no stage produces '" + profile.feasibility.final_output + "'");
    if (!final_schema || !final_schema->computed())
        f.at("output").fail("final output must be a computed node schema");
}

}  // namespace

Profile load_profile(const json& document) {
    const Field root(document, "");
    root.allow_keys({"format_version", "name", "description", "schemas", "matrices", "connectors",
                     "default_connector", "feasibility", "risk"});
    Profile p;
    const auto version = root.at("format_version");
    if (version.string() != "1") version.fail("unsupported format_version");
    p.name = root.at("name").identifier();
    if (auto d = root.maybe("description")) p.description = d->string();

    const auto schemas = root.at("schemas");
    schemas.require_array();
    std::set<std::string> names;
    for (std::size_t i = 0; i < schemas.size(); ++i) {
        auto schema = read_schema(schemas.at(i));
        if (!names.insert(schema.name()).second)
            schemas.at(i).at("name").fail("schema '" + schema.name() + "' is declared twice");
        p.schemas.push_back(std::move(schema));
    }
    if (p.rated_schemas().empty()) schemas.fail("at least one rated node schema required");

    const auto matrices = root.at("matrices");
    matrices.require_object();
    for (const auto& [mname, _] : matrices.value().items())
        p.matrices.emplace(mname, read_matrix(matrices.at(mname), p));

    const auto connectors = root.at("connectors");
    connectors.require_object();
    for (const auto& [cname, _] : connectors.value().items()) {
        if (cname.empty()) connectors.fail("connector names must not be empty");
        p.connectors.emplace(cname, read_connector(cname, connectors.at(cname), p));
    }
    for (const char* required : {"AND", "OR"})
        if (!p.connectors.count(required)) connectors.fail(std::string("built-in connector '") + required + "' is missing");
    if (auto dc = root.maybe("default_connector")) {
        p.default_connector = dc->identifier();
        if (!p.connectors.count(p.default_connector)) dc->fail("unknown connector");
    }

    const auto feas = root.at("feasibility");
    feas.allow_keys({"output", "stages"});
    p.feasibility.final_output = feas.at("output").identifier();
    const auto stages = feas.at("stages");
    stages.require_array();
    if (stages.size() == 0) stages.fail("at least one stage required");
    for (std::size_t i = 0; i < stages.size(); ++i) p.feasibility.stages.push_back(read_stage(stages.at(i)));
    check_pipeline(feas, p);

    std::set<std::string> metrics;
    for (const auto& stage : p.feasibility.stages) metrics.insert(stage_output(stage));
    for (const auto& [cname, c] : p.connectors) {
        if (c.kind == Connector::Kind::Combine) continue;
        const auto cf = connectors.at(cname).at("policy");
        if (!metrics.count(c.policy.metric)) cf.at("metric").fail("'" + c.policy.metric + "' is not a pipeline output");
        for (std::size_t i = 0; i < c.policy.tiebreakers.size(); ++i) {
            const auto& attr = c.policy.tiebreakers[i].attribute;
            const auto* s = p.find_schema(attr);
            if (attr != kAttributeSum && !(s && s->rated()))
                cf.at("tiebreakers").at(i).at("attribute").fail("'" + attr + "' is not a rated node schema");
        }
    }

    const auto risk = root.at("risk");
    risk.allow_keys({"matrix", "impact", "feasibility"});
    p.risk.matrix = risk.at("matrix").identifier();
    p.risk.impact = risk.at("impact").identifier();
    p.risk.feasibility = risk.at("feasibility").identifier();
    auto rm = p.matrices.find(p.risk.matrix);
    if (rm == p.matrices.end()) risk.at("matrix").fail("unknown matrix");
    const auto* impact = p.find_schema(p.risk.impact);
    if (!impact || impact->kind() != SchemaKind::Edge) risk.at("impact").fail("impact must name an edge schema");
    if (p.risk.feasibility != p.feasibility.final_output)
        risk.at("feasibility").fail("must be the feasibility pipeline output");
    if (rm->second.axes() != std::vector<std::string>{p.risk.impact, p.risk.feasibility})
        risk.at("matrix").fail("risk matrix axes must be [impact, feasibility]");
    if (p.schema(rm->second.output()).kind() != SchemaKind::Consequence)
        risk.at("matrix").fail("risk matrix must produce a consequence schema");
    for (std::size_t axis = 0; axis < 2; ++axis)
        if (!rm->second.monotone_along(axis, +1))
            matrices.at(p.risk.matrix).fail("risk must not decrease along '" + rm->second.axes()[axis] + "'");
    return p;
}

Profile load_profile_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ProfileError("/", e.what());
    }
    return load_profile(doc);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json nest_cells(const LookupMatrix& m, std::size_t depth, std::size_t& offset) {
    json arr = json::array();
    for (std::size_t i = 0; i < m.axis_ranks()[depth].size(); ++i) {
        if (depth + 1 == m.axis_ranks().size())
            arr.push_back(m.cells()[offset++]);
        else
            arr.push_back(nest_cells(m, depth + 1, offset));
    }
    return arr;
}

json policy_json(const TieBreakPolicy& p) {
    json tbs = json::array();
    for (const auto& tb : p.tiebreakers)
        tbs.push_back({{"attribute", tb.attribute},
                       {"direction", tb.direction == Direction::Lowest ? "lowest" : "highest"}});
    return {{"metric", p.metric}, {"tiebreakers", tbs}};
}

json aggregators_json(const std::map<std::string, AttributeAggregator>& aggs) {
    json out = json::object();
    for (const auto& [attr, agg] : aggs) out[attr] = std::string(to_string(agg.function));
    return out;
}

}  // namespace

json serialize_profile(const Profile& p) {
    json doc;
    doc["format_version"] = "1";
    doc["name"] = p.name;
    doc["description"] = p.description;
    json schemas = json::array();
    for (const auto& s : p.schemas) {
        json values = json::array();
        for (const auto& v : s.values()) values.push_back({{"label", v.label}, {"rank", v.rank}});
        schemas.push_back({{"name", s.name()},
                           {"kind", std::string(to_string(s.kind()))},
                           {"computed", s.computed()},
                           {"bounded", s.bounded()},
                           {"values", values}});
    }
    doc["schemas"] = schemas;
    json matrices = json::object();
    for (const auto& [name, m] : p.matrices) {
        std::size_t offset = 0;
        json entry = {{"axes", m.axes()}, {"output", m.output()}, {"cells", nest_cells(m, 0, offset)}};
        if (!m.declared_monotone().empty()) {
            json mono = json::array();
            for (int d : m.declared_monotone())
                mono.push_back(d < 0 ? "nonincreasing" : d > 0 ? "nondecreasing" : "none");
            entry["monotone"] = mono;
        }
        matrices[name] = entry;
    }
    doc["matrices"] = matrices;
    json connectors = json::object();
    for (const auto& [name, c] : p.connectors) {
        json entry = {{"kind", std::string(to_string(c.kind))}};
        if (c.kind != Connector::Kind::Select) entry["aggregators"] = aggregators_json(c.aggregators);
        if (c.kind != Connector::Kind::Combine) entry["policy"] = policy_json(c.policy);
        if (c.kind == Connector::Kind::Threshold) entry["k"] = c.k;
        connectors[name] = entry;
    }
    doc["connectors"] = connectors;
    doc["default_connector"] = p.default_connector;
    json stages = json::array();
    for (const auto& stage : p.feasibility.stages) {
        if (const auto* m = std::get_if<MatrixStage>(&stage)) {
            stages.push_back({{"type", "matrix"}, {"output", m->output}, {"matrix", m->matrix}});
        } else if (const auto* f = std::get_if<FunctionStage>(&stage)) {
            json entry = {{"type", "function"}, {"output", f->output}, {"inputs", f->inputs}};
            entry["function"] = f->function == StageFunction::Add        ? "add"
                                : f->function == StageFunction::Subtract ? "subtract"
                                                                         : "affine";
            if (f->function == StageFunction::Affine) {
                entry["weights"] = f->weights;
                entry["bias"] = f->bias;
            }
            stages.push_back(entry);
        } else if (const auto* b = std::get_if<BandStage>(&stage)) {
            json bands = json::array();
            for (const auto& band : b->bands) {
                json e = {{"min", band.min}, {"value", band.value}};
                if (band.max) e["max"] = *band.max;
                bands.push_back(e);
            }
            stages.push_back({{"type", "bands"}, {"output", b->output}, {"input", b->input}, {"bands", bands}});
        }
    }
    doc["feasibility"] = {{"output", p.feasibility.final_output}, {"stages", stages}};
    doc["risk"] = {{"matrix", p.risk.matrix}, {"impact", p.risk.impact}, {"feasibility", p.risk.feasibility}};
    return doc;
}

// ---------------------------------------------------------------------------
// Built-ins and lookup

std::vector<std::string> builtin_profile_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : detail::embedded_profiles()) names.push_back(name);
    return names;
}

std::optional<std::string> builtin_profile_source(const std::string& name) {
    const auto& all = detail::embedded_profiles();
    auto it = all.find(name);
    if (it == all.end()) return std::nullopt;
    return std::string(it->second);
}

const Profile& builtin_profile(const std::string& name) {
    static const std::map<std::string, Profile> loaded = [] {
        std::map<std::string, Profile> out;
        for (const auto& [n, source] : detail::embedded_profiles()) {
            Profile p = load_profile_text(std::string(source));
            if (p.name != n) throw ProfileError("/name", "built-in '" + n + "' declares name '" + p.name + "'");
            out.emplace(n, std::move(p));
        }
        return out;
    }();
    auto it = loaded.find(name);
    if (it == loaded.end()) throw ProfileError("/", "unknown built-in profile '" + name + "'");
    return it->second;
}

std::vector<std::filesystem::path> profile_search_dirs() {
    std::vector<std::filesystem::path> dirs;
    const char* env = std::getenv("RAG_PROFILE_DIR");
    if (!env) return dirs;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ':'))
        if (!item.empty()) dirs.emplace_back(item);
    return dirs;
}

namespace {

Profile load_profile_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProfileError("/", "cannot read profile file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_profile_text(buf.str());
}

}  // namespace

Profile resolve_profile(const std::string& name_or_path, const std::vector<std::filesystem::path>& search_dirs) {
    if (builtin_profile_source(name_or_path)) return builtin_profile(name_or_path);
    for (const auto& dir : search_dirs) {
        const auto candidate = dir / (name_or_path + ".ragp");
        if (std::filesystem::is_regular_file(candidate)) return load_profile_file(candidate);
    }
    if (std::filesystem::is_regular_file(name_or_path)) return load_profile_file(name_or_path);
    throw ProfileError("/", "unknown profile '" + name_or_path + "'");
}

std::vector<std::string> available_profiles(const std::vector<std::filesystem::path>& search_dirs) {
    std::set<std::string> names;
    for (auto& n : builtin_profile_names()) names.insert(n);
    for (const auto& dir : search_dirs) {
        std::error_code ec;
        if (!std::filesystem::is_directory(dir, ec)) continue;
        for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
            if (entry.is_regular_file() && entry.path().extension() == ".ragp")
                names.insert(entry.path().stem().string());
    }
    return {names.begin(), names.end()};
}

// ---------------------------------------------------------------------------
// Standard-specific helpers

AttackPotential iso_attack_potential(const std::map<std::string, std::string>& ratings) {
    const Profile& iso = builtin_profile(kIsoProfile);
    AttackPotential result;
    for (const auto* schema : iso.rated_schemas()) {
        auto it = ratings.find(schema->name());
        if (it == ratings.end()) throw UnknownEnumerate("no rating for '" + schema->name() + "'");
        auto rank = schema->rank_of(it->second);
        if (!rank) throw UnknownEnumerate("'" + it->second + "' is not an enumerate of '" + schema->name() + "'");
        result.sum += *rank;
    }
    for (const auto& [param, _] : ratings)
        if (!iso.find_schema(param) || !iso.schema(param).rated())
            throw UnknownEnumerate("unknown attack-potential parameter '" + param + "'");
    for (const auto& stage : iso.feasibility.stages)
        if (const auto* bands = std::get_if<BandStage>(&stage))
            for (const auto& band : bands->bands)
                if (result.sum >= band.min && (!band.max || result.sum <= *band.max)) result.feasibility = band.value;
    return result;
}

Rank clc_likelihood(Rank exposure, Rank vulnerability) {
    if (exposure < 1 || exposure > 3) throw OutOfDomain("exposure must be within 1..3");
    if (vulnerability < 1 || vulnerability > 3) throw OutOfDomain("vulnerability must be within 1..3");
    return exposure + vulnerability - 1;
}

Rank risk_lookup(const Profile& profile, Rank impact, Rank feasibility) {
    const Rank coords[] = {impact, feasibility};
    return profile.risk_matrix().at(coords);
}

}  // namespace rag
