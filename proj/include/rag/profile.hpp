#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rag/aggregation.hpp"
#include "rag/schema.hpp"

namespace rag {

// ---------------------------------------------------------------------------
// Feasibility pipeline stages

/// Looks up the named matrix at the node's values for the matrix axes.
struct MatrixStage {
    std::string output;
    std::string matrix;

    bool operator==(const MatrixStage&) const = default;
};

enum class StageFunction { Add, Subtract, Affine };

/// add: sum of inputs; subtract: first input minus the rest;
/// affine: sum(weights[i] * inputs[i]) + bias.
struct FunctionStage {
    std::string output;
    StageFunction function = StageFunction::Add;
    std::vector<std::string> inputs;
    std::vector<Rank> weights;
    Rank bias = 0;

    bool operator==(const FunctionStage&) const = default;
};

/// Inclusive [min, max] ranges partitioning the integers >= 0. The last
/// band may be open-ended.
struct Band {
    Rank min = 0;
    std::optional<Rank> max;
    Rank value = 0;

    bool operator==(const Band&) const = default;
};

struct BandStage {
    std::string output;
    std::string input;
    std::vector<Band> bands;

    bool operator==(const BandStage&) const = default;
};

using Stage = std::variant<MatrixStage, FunctionStage, BandStage>;

const std::string& stage_output(const Stage& stage);

struct FeasibilityPipeline {
    std::vector<Stage> stages;
    std::string final_output;

    bool operator==(const FeasibilityPipeline&) const = default;
};

/// Impact x feasibility -> risk.
struct RiskRule {
    std::string matrix;
    std::string impact;
    std::string feasibility;

    bool operator==(const RiskRule&) const = default;
};

/// A standards profile: schemas, connectors, feasibility pipeline and risk
/// matrix. Immutable after load.
class Profile {
public:
    std::string name;
    std::string description;
    std::vector<AttributeSchema> schemas;
    std::map<std::string, Connector> connectors;
    std::map<std::string, LookupMatrix> matrices;
    FeasibilityPipeline feasibility;
    RiskRule risk;
    std::string default_connector = "OR";

    const AttributeSchema* find_schema(const std::string& schema_name) const;
    const AttributeSchema& schema(const std::string& schema_name) const;

    /// Rated node schemas, in declaration order.
    std::vector<const AttributeSchema*> rated_schemas() const;
    std::vector<const AttributeSchema*> schemas_of(SchemaKind kind) const;

    const AttributeSchema& impact_schema() const { return schema(risk.impact); }
    const AttributeSchema& feasibility_schema() const { return schema(feasibility.final_output); }
    const AttributeSchema& risk_schema() const;
    const LookupMatrix& risk_matrix() const;
    const Connector* find_connector(const std::string& connector_name) const;

    bool operator==(const Profile&) const = default;
};

/// Parses and checks a profile document. Throws ProfileError naming the
/// offending field.
Profile load_profile(const nlohmann::json& document);
Profile load_profile_text(const std::string& text);

/// Normalized document: ranks instead of labels, every optional field spelled
/// out. load_profile(serialize_profile(p)) == p.
nlohmann::json serialize_profile(const Profile& profile);

std::vector<std::string> builtin_profile_names();
/// Embedded .ragp source of a built-in profile, if `name` is one.
std::optional<std::string> builtin_profile_source(const std::string& name);
const Profile& builtin_profile(const std::string& name);

/// Search directories from RAG_PROFILE_DIR (':'-separated).
std::vector<std::filesystem::path> profile_search_dirs();

/// Resolves a profile by built-in name, by `<dir>/<name>.ragp` in
/// `search_dirs`, or as a path to a .ragp file.
Profile resolve_profile(const std::string& name_or_path,
                        const std::vector<std::filesystem::path>& search_dirs);

/// Names of all profiles reachable through built-ins and `search_dirs`.
std::vector<std::string> available_profiles(const std::vector<std::filesystem::path>& search_dirs);

// Built-in profile names.
inline constexpr const char* kDinProfile = "din-vde-0831-104";
inline constexpr const char* kIsoProfile = "iso-sae-21434";
inline constexpr const char* kClcProfile = "clc-ts-50701";

struct AttackPotential {
    int sum = 0;
    Rank feasibility = 0;

    bool operator==(const AttackPotential&) const = default;
};

/// Attack-potential rating with the built-in ISO/SAE 21434 tables. `ratings`
/// maps each of the five parameters to one of its listed enumerates. Throws
/// UnknownEnumerate.
AttackPotential iso_attack_potential(const std::map<std::string, std::string>& ratings);

/// Likelihood = exposure + vulnerability - 1, both in [1, 3]. Throws OutOfDomain.
Rank clc_likelihood(Rank exposure, Rank vulnerability);

/// Risk-matrix cell for (impact, feasibility). Throws OutOfDomain.
Rank risk_lookup(const Profile& profile, Rank impact, Rank feasibility);

}  // namespace rag
