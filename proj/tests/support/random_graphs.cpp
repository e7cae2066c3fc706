#include "random_graphs.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace rag::testing {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string attack_id(int i) { return "n" + std::to_string(i); }

AttributeMap din_rating(std::mt19937_64& rng) {
    return {{"Resources", uniform(rng, 1, 5)}, {"Knowledge", uniform(rng, 1, 5)}, {"Location", uniform(rng, 0, 1)}};
}

RiskGraph assemble(int n, const std::vector<std::pair<int, int>>& links, std::mt19937_64& rng,
                   const RandomGraphOptions& options) {
    std::map<int, std::set<int>> children;
    std::set<int> has_parent;
    for (auto [s, t] : links) {
        children[s].insert(t);
        has_parent.insert(t);
    }
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        Node node{attack_id(i), "step " + std::to_string(i), NodeKind::Attack, {}, {}, {}, {}, {}};
        if (children[i].empty()) node.ratings = din_rating(rng);
        if (children[i].size() >= 2) {
            if (chance(rng, options.and_probability))
                node.connector = "AND";
            else if (chance(rng, 0.5))
                node.connector = "OR";
        }
        nodes.push_back(std::move(node));
    }
    for (auto [s, t] : links)
        edges.push_back({attack_id(s) + "-" + attack_id(t), EdgeKind::Refinement, attack_id(s), attack_id(t), {}, {}, {}});

    nodes.push_back({"c0", "consequence", NodeKind::Consequence, {}, {}, {}, {}, {}});
    for (int i = 0; i < n; ++i) {
        if (has_parent.contains(i)) continue;
        edges.push_back({"impact-" + attack_id(i), EdgeKind::Consequence, "c0", attack_id(i),
                         {{"Impact", uniform(rng, 1, 5)}}, {}, {}});
    }

    int cms = uniform(rng, 0, options.max_countermeasures);
    for (int m = 0; m < cms; ++m) {
        std::string id = "m" + std::to_string(m);
        AttributeMap deltas{{"Resources", uniform(rng, 0, 2)}, {"Knowledge", uniform(rng, 0, 2)}};
        if (chance(rng, 0.3)) deltas["Location"] = 1;
        nodes.push_back({id, "countermeasure " + std::to_string(m), NodeKind::Countermeasure, deltas, {}, {}, {}, {}});
        std::string target = attack_id(uniform(rng, 0, n - 1));
        edges.push_back({target + "-" + id, EdgeKind::Countermeasure, target, id, {}, {}, {}});
    }
    return RiskGraph(std::move(nodes), std::move(edges), "din-vde-0831-104");
}

}  // namespace

RiskGraph random_din_graph(std::mt19937_64& rng, const RandomGraphOptions& options) {
    int n = uniform(rng, 1, options.max_attack_nodes);
    std::vector<std::pair<int, int>> links;
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t)
            if (chance(rng, options.edge_probability)) links.emplace_back(s, t);
    return assemble(n, links, rng, options);
}

RiskGraph layered_din_graph(int attack_nodes, std::mt19937_64& rng) {
    // widths 1, 3, 9, ... until the budget runs out
    std::vector<std::vector<int>> layers;
    int next = 0;
    for (int width = 1; next < attack_nodes; width = std::min(width * 3, 40)) {
        std::vector<int> layer;
        for (int k = 0; k < width && next < attack_nodes; ++k) layer.push_back(next++);
        layers.push_back(std::move(layer));
    }
    std::vector<std::pair<int, int>> links;
    for (std::size_t l = 1; l < layers.size(); ++l) {
        const auto& above = layers[l - 1];
        for (int t : layers[l]) {
            links.emplace_back(above[uniform(rng, 0, int(above.size()) - 1)], t);
            if (chance(rng, 0.3)) links.emplace_back(above[uniform(rng, 0, int(above.size()) - 1)], t);
        }
    }
    std::sort(links.begin(), links.end());
    links.erase(std::unique(links.begin(), links.end()), links.end());
    RandomGraphOptions options;
    options.max_countermeasures = 10;
    return assemble(attack_nodes, links, rng, options);
}

}  // namespace rag::testing
