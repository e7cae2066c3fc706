#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rag::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kParseFailure = 2;

struct CommandResult {
    int exit_code = kOk;
    std::string out;
    std::string err;
};

struct CommonOptions {
    std::filesystem::path graph;
    std::optional<std::string> profile;
    bool strict = false;
};

struct EvaluateOptions : CommonOptions {
    std::string format = "text";
    /// Countermeasure ids, or "all".
    std::vector<std::string> disable;
    /// "node.attribute=rank" overrides.
    std::vector<std::string> set;
};

struct CriticalPathOptions : CommonOptions {
    std::string consequence;
    std::string format = "text";
};

CommandResult cmd_validate(const CommonOptions& options);
CommandResult cmd_evaluate(const EvaluateOptions& options);
CommandResult cmd_critical_path(const CriticalPathOptions& options);

/// Parses argv and dispatches, writing to stdout/stderr. `serve` blocks.
int run(int argc, char** argv);

}  // namespace rag::cli
