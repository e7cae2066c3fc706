#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "rag/error.hpp"
#include "rag/validate.hpp"

using namespace rag;

namespace {

Node attack(const Id& id, AttributeMap ratings = {}) {
    return {id, id, NodeKind::Attack, std::move(ratings), {}, {}, {}, {}};
}

Node consequence(const Id& id) { return {id, id, NodeKind::Consequence, {}, {}, {}, {}, {}}; }

Edge refine(const Id& s, const Id& t) { return {s + "-" + t, EdgeKind::Refinement, s, t, {}, {}, {}}; }

Edge impact(const Id& c, const Id& t, Rank v) { return {"impact-" + t, EdgeKind::Consequence, c, t, {{"Impact", v}}, {}, {}}; }

AttributeMap rkl(int r, int k, int l) { return {{"Resources", r}, {"Knowledge", k}, {"Location", l}}; }

std::vector<std::string> rules(const ValidationReport& r) {
    std::vector<std::string> out;
    for (const auto& v : r.violations) out.push_back(v.rule);
    return out;
}

}  // namespace

TEST_CASE("a refinement cycle is a CYCLE violation naming its nodes") {
    RiskGraph g({consequence("c"), attack("A"), attack("B")}, {refine("A", "B"), refine("B", "A")});
    auto report = validate(g, fixture::din());
    REQUIRE(report.has("CYCLE"));
    auto it = std::find_if(report.violations.begin(), report.violations.end(),
                           [](const Violation& v) { return v.rule == "CYCLE"; });
    CHECK(it->involved == std::vector<Id>{"A", "B"});
    CHECK_THROWS_AS(topological_order(g), CycleError);
    CHECK(refinement_cycles(g) == std::vector<std::vector<Id>>{{"A", "B"}});
}

TEST_CASE("the admin-privileges example graphs validate") {
    CHECK(validate(fixture::graph("weiss-din.rag"), fixture::din()).ok());
    CHECK(validate(fixture::graph("weiss-iso.rag"), fixture::iso()).ok());
    CHECK(validate(fixture::graph("weiss-clc.rag"), fixture::clc()).ok());
    CHECK(validate(fixture::graph("weiss-din.rag"), fixture::din()).notes.empty());
}

TEST_CASE("basic attack nodes need a complete rating") {
    RiskGraph g({consequence("c"), attack("a", {{"Resources", 2}, {"Knowledge", 2}})}, {impact("c", "a", 3)});
    auto report = validate(g, fixture::din());
    CHECK(rules(report) == std::vector<std::string>{"MISSING_RATING"});
    CHECK(report.violations.front().subject == "a");
    CHECK(report.violations.front().message.find("Location") != std::string::npos);
}

TEST_CASE("topological_order is children first with id ties") {
    RiskGraph chain({consequence("c"), attack("root"), attack("a"), attack("b", rkl(1, 1, 0))},
                    {impact("c", "root", 1), refine("root", "a"), refine("a", "b")});
    CHECK(topological_order(chain) == std::vector<Id>{"b", "a", "root"});

    RiskGraph diamond({consequence("c"), attack("root"), attack("b"), attack("a"), attack("x", rkl(1, 1, 0))},
                      {impact("c", "root", 1), refine("root", "a"), refine("root", "b"), refine("a", "x"),
                       refine("b", "x")});
    CHECK(topological_order(diamond) == std::vector<Id>{"x", "a", "b", "root"});

    auto weiss = topological_order(fixture::graph("weiss-din.rag"));
    CHECK(weiss.size() == 14);
    CHECK(weiss.back() == "obtain-admin-privileges");
}

TEST_CASE("structural rules") {
    const Profile& din = fixture::din();
    SUBCASE("no consequence node") {
        RiskGraph g({attack("a", rkl(1, 1, 0))}, {});
        CHECK(validate(g, din).has("NO_CONSEQUENCE"));
    }
    SUBCASE("duplicate ids") {
        RiskGraph g({consequence("c"), attack("a", rkl(1, 1, 0)), attack("a", rkl(1, 1, 0))},
                    {impact("c", "a", 2), impact("c", "a", 2)});
        auto r = validate(g, din);
        CHECK(r.has("DUPLICATE_NODE_ID"));
        CHECK(r.has("DUPLICATE_EDGE_ID"));
    }
    SUBCASE("unknown endpoints and wrong kinds") {
        RiskGraph g({consequence("c"), attack("a", rkl(1, 1, 0))},
                    {impact("c", "ghost", 2), refine("c", "a"), impact("c", "a", 2)});
        auto r = validate(g, din);
        CHECK(r.has("UNKNOWN_NODE"));
        CHECK(r.has("REFINEMENT_KIND"));
        CHECK(r.has("CONSEQUENCE_INCOMING") == false);
    }
    SUBCASE("consequence edges must end at topmost nodes and carry an in-domain impact") {
        RiskGraph g({consequence("c"), attack("a"), attack("b", rkl(1, 1, 0))},
                    {impact("c", "a", 2), impact("c", "b", 9), refine("a", "b")});
        auto r = validate(g, din);
        CHECK(r.has("CONSEQUENCE_NOT_TOPMOST"));
        CHECK(r.has("IMPACT_OUT_OF_DOMAIN"));
        RiskGraph missing({consequence("c"), attack("a", rkl(1, 1, 0))},
                          {{"e", EdgeKind::Consequence, "c", "a", {}, {}, {}}});
        CHECK(validate(missing, din).has("MISSING_IMPACT"));
    }
    SUBCASE("ratings live on basic nodes only and stay in domain") {
        RiskGraph g({consequence("c"), attack("a", rkl(1, 1, 0)), attack("b", rkl(6, 1, 0))},
                    {impact("c", "a", 2), refine("a", "b")});
        auto r = validate(g, din);
        CHECK(r.has("RATING_ON_INNER_NODE"));
        CHECK(r.has("RATING_OUT_OF_DOMAIN"));
    }
    SUBCASE("connectors") {
        Node a = attack("a");
        a.connector = "XOR";
        Node b = attack("b", rkl(1, 1, 0));
        b.connector = "AND";
        RiskGraph g({consequence("c"), a, b, attack("d", rkl(1, 1, 0))},
                    {impact("c", "a", 2), refine("a", "b"), refine("a", "d")});
        auto r = validate(g, din);
        CHECK(r.has("UNKNOWN_CONNECTOR"));
        CHECK(r.has("CONNECTOR_MISPLACED"));

        Node t = attack("t");
        t.connector = "2-OF-N";
        RiskGraph few({consequence("c"), t, attack("x", rkl(1, 1, 0)), attack("y", rkl(1, 1, 0))},
                      {impact("c", "t", 2), refine("t", "x"), refine("t", "y")});
        CHECK(validate(few, din).ok());
    }
    SUBCASE("countermeasures are leaves with non-negative node deltas") {
        Node cm{"m", "m", NodeKind::Countermeasure, {{"Knowledge", -1}}, {}, {}, {}, {}};
        Node bad_combine{"n", "n", NodeKind::Countermeasure, {{"Knowledge", 1}}, {}, std::string("median"), {}, {}};
        RiskGraph g({consequence("c"), attack("a", rkl(1, 1, 0)), cm, bad_combine},
                    {impact("c", "a", 2),
                     {"a-m", EdgeKind::Countermeasure, "a", "m", {}, {}, {}},
                     {"a-n", EdgeKind::Countermeasure, "a", "n", {}, {}, {}},
                     {"m-a", EdgeKind::Refinement, "m", "a", {}, {}, {}}});
        auto r = validate(g, din);
        CHECK(r.has("NEGATIVE_DELTA"));
        CHECK(r.has("UNKNOWN_COMBINE"));
        CHECK(r.has("COUNTERMEASURE_NOT_LEAF"));
    }
    SUBCASE("edge-targeted countermeasures may lower the impact only") {
        Node cm{"m", "m", NodeKind::Countermeasure, {{"Knowledge", 1}}, {}, {}, {}, {}};
        RiskGraph g({consequence("c"), attack("a", rkl(1, 1, 0)), cm},
                    {impact("c", "a", 2), {"x", EdgeKind::Countermeasure, "impact-a", "m", {}, {}, {}}});
        CHECK(validate(g, din).has("DELTA_ATTRIBUTE"));
        RiskGraph ok({consequence("c"), attack("a", rkl(1, 1, 0)), cm},
                     {impact("c", "a", 2), {"x", EdgeKind::Countermeasure, "impact-a", "m", {{"Impact", -2}}, {}, {}}});
        CHECK(validate(ok, din).ok());
    }
    SUBCASE("notes do not invalidate") {
        RiskGraph g({consequence("c"), consequence("lonely"), attack("a", rkl(1, 1, 0)), attack("b", rkl(2, 2, 0)),
                     {"m", "m", NodeKind::Countermeasure, {{"Knowledge", 1}}, {}, {}, {}, {}}},
                    {impact("c", "a", 2), impact("c", "b", 3)});
        auto r = validate(g, din);
        CHECK(r.ok());
        std::vector<std::string> notes;
        for (const auto& n : r.notes) notes.push_back(n.rule);
        CHECK(notes == std::vector<std::string>{"MULTI_TOPMOST", "UNLINKED_CONSEQUENCE", "UNATTACHED_COUNTERMEASURE"});
    }
}

TEST_CASE("validation is pure and deterministic") {
    auto g = fixture::graph("cyclic.rag");
    auto first = validate(g, fixture::din());
    CHECK(first == validate(g, fixture::din()));
    CHECK(format_validation(first) == format_validation(validate(g, fixture::din())));
}

TEST_CASE("removing a countermeasure keeps the graph valid") {
    auto g = fixture::graph("weiss-din.rag");
    for (const auto& n : g.nodes()) {
        if (n.kind != NodeKind::Countermeasure) continue;
        CAPTURE(n.id);
        auto smaller = g.without_countermeasure(n.id);
        CHECK(smaller.nodes().size() == g.nodes().size() - 1);
        CHECK(validate(smaller, fixture::din()).ok());
    }
}
