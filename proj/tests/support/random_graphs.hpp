#pragma once

#include <random>

#include "rag/graph.hpp"

namespace rag::testing {

struct RandomGraphOptions {
    int max_attack_nodes = 8;
    int max_countermeasures = 2;
    double edge_probability = 0.35;
    double and_probability = 0.4;
};

/// Random DAG under the DIN profile: attack nodes n0..n7 (edges only from
/// lower to higher index), random AND/OR connectors, random ratings, one
/// consequence linked to every topmost node, optional countermeasures with
/// non-negative deltas.
RiskGraph random_din_graph(std::mt19937_64& rng, const RandomGraphOptions& options = {});

/// Layered DIN graph with exactly `attack_nodes` attack nodes.
RiskGraph layered_din_graph(int attack_nodes, std::mt19937_64& rng);

}  // namespace rag::testing
