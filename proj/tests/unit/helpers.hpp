#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "rag/feasibility.hpp"
#include "rag/io.hpp"
#include "rag/profile.hpp"

namespace fixture {

inline std::string path(const std::string& name) { return std::string(RAG_FIXTURE_DIR) + "/" + name; }

inline std::string text(const std::string& name) {
    std::ifstream in(path(name), std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline rag::RiskGraph graph(const std::string& name) { return rag::parse_graph(text(name)); }

inline const rag::Profile& din() { return rag::builtin_profile(rag::kDinProfile); }
inline const rag::Profile& iso() { return rag::builtin_profile(rag::kIsoProfile); }
inline const rag::Profile& clc() { return rag::builtin_profile(rag::kClcProfile); }

}  // namespace fixture
