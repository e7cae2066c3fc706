#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "random_graphs.hpp"
#include "rag/error.hpp"
#include "rag/validate.hpp"

using namespace rag;

namespace {

AttributeMap random_rating(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> rank(1, 5), loc(0, 1);
    return {{"Resources", rank(rng)}, {"Knowledge", rank(rng)}, {"Location", loc(rng)}};
}

}  // namespace

TEST_CASE("AND aggregation does not depend on child order") {
    std::mt19937_64 rng(11);
    auto schemas = fixture::din().rated_schemas();
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<AttributeMap> children(2 + trial % 4);
        for (auto& c : children) c = random_rating(rng);
        auto expected = aggregate_and(children, schemas);
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            std::shuffle(children.begin(), children.end(), rng);
            CHECK(aggregate_and(children, schemas) == expected);
        }
        for (const auto* s : schemas) CHECK(s->contains(expected.at(s->name())));
    }
}

TEST_CASE("OR selection picks a child with the highest feasibility") {
    std::mt19937_64 rng(12);
    const auto& din = fixture::din();
    const auto& policy = din.connectors.at("OR").policy;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<AttributeMap> ratings(2 + trial % 4);
        for (auto& r : ratings) r = random_rating(rng);
        std::vector<Candidate> candidates;
        int best = 0;
        for (std::size_t i = 0; i < ratings.size(); ++i) {
            Rank af = compute_feasibility(ratings[i], din).value;
            best = std::max(best, af);
            candidates.push_back({"c" + std::to_string(i), &ratings[i], af});
        }
        auto chosen = aggregate_or(candidates, policy);
        CHECK(candidates[chosen].metric == best);
        std::reverse(candidates.begin(), candidates.end());
        CHECK(candidates[aggregate_or(candidates, policy)].id ==
              "c" + std::to_string(chosen));
    }
}

TEST_CASE("built-in profiles round-trip through their serialized form") {
    for (const auto& name : builtin_profile_names()) {
        CAPTURE(name);
        const auto& p = builtin_profile(name);
        CHECK(load_profile(serialize_profile(p)) == p);
    }
}

TEST_CASE("risk matrices are total over impact x feasibility") {
    for (const auto& name : builtin_profile_names()) {
        const auto& p = builtin_profile(name);
        for (const auto& i : p.impact_schema().values())
            for (const auto& f : p.feasibility_schema().values()) {
                Rank r = risk_lookup(p, i.rank, f.rank);
                CHECK(p.risk_schema().contains(r));
            }
    }
}

TEST_CASE("random graphs: valid, deterministic, countermeasure removal stays valid") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        auto g = testing::random_din_graph(rng);
        auto report = validate(g, fixture::din());
        CHECK(report.ok());
        CHECK(validate(g, fixture::din()) == report);
        auto ev = evaluate_graph(g, fixture::din());
        CHECK(evaluate_graph(g, fixture::din()) == ev);
        for (const auto& [id, node] : ev.nodes) CHECK(fixture::din().feasibility_schema().contains(node.feasibility));
        for (const auto& [cm, _] : ev.countermeasures)
            CHECK(validate(g.without_countermeasure(cm), fixture::din()).ok());
        CHECK(parse_graph(serialize_graph(g)) == g);
    }
}

TEST_CASE("evaluation JSON survives a round trip on random graphs") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 50; ++i) {
        auto g = testing::random_din_graph(rng);
        auto ev = evaluate_graph(g, fixture::din(), disable_all(g));
        CHECK(evaluation_from_json(evaluation_to_json(ev)) == ev);
    }
}

TEST_CASE("mutated documents never crash the parser") {
    std::mt19937_64 rng(15);
    const auto base = fixture::text("weiss-din.rag");
    std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 500; ++i) {
        auto text = base;
        for (int k = 0; k < 1 + i % 5; ++k) text[pos(rng)] = static_cast<char>(byte(rng));
        try {
            auto g = parse_graph(text, i % 2 ? ParseMode::Lenient : ParseMode::Strict);
            (void)validate(g, fixture::din());
        } catch (const ParseError&) {
        }
    }
}
