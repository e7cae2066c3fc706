#include <doctest.h>

#include "helpers.hpp"
#include "rag/error.hpp"
#include "rag/validate.hpp"

using namespace rag;

TEST_CASE("DIN feasibility is PAF minus Location") {
    auto r = compute_feasibility({{"Resources", 2}, {"Knowledge", 2}, {"Location", 1}}, fixture::din());
    CHECK(r.stages.at("PAF") == 4);
    CHECK(r.value == 3);
    CHECK_FALSE(r.clamped());

    auto hardest = compute_feasibility({{"Resources", 5}, {"Knowledge", 5}, {"Location", 1}}, fixture::din());
    CHECK(hardest.stages.at("PAF") == 1);
    CHECK(hardest.raw == 0);
    CHECK(hardest.value == 1);
    CHECK(hardest.clamped());
}

TEST_CASE("a missing pipeline input names the stage") {
    try {
        compute_feasibility({{"Resources", 2}, {"Location", 1}}, fixture::din());
        FAIL("expected MissingAttribute");
    } catch (const MissingAttribute& e) {
        CHECK(e.stage() == "PAF");
        CHECK(e.attribute() == "Knowledge");
    }
}

TEST_CASE("ISO feasibility goes through the attack potential") {
    AttributeMap attrs{{"ElapsedTime", 1}, {"SpecialistExpertise", 3}, {"KnowledgeOfItem", 7},
                       {"WindowOfOpportunity", 1}, {"Equipment", 4}};
    auto r = compute_feasibility(attrs, fixture::iso());
    CHECK(r.stages.at("AttackPotential") == 16);
    CHECK(r.value == 3);
}

TEST_CASE("CLC feasibility is the likelihood") {
    auto r = compute_feasibility({{"Exposure", 3}, {"Vulnerability", 3}}, fixture::clc());
    CHECK(r.stages.at("Likelihood") == 5);
    CHECK(r.value == 5);
}

TEST_CASE("DIN admin-privileges example propagates as worked by hand") {
    auto ev = evaluate_graph(fixture::graph("weiss-din.rag"), fixture::din());
    const auto& break_in = ev.nodes.at("break-in");
    CHECK(break_in.attributes == AttributeMap{{"Resources", 2}, {"Knowledge", 2}, {"Location", 1}});
    CHECK(break_in.original == AttributeMap{{"Resources", 1}, {"Knowledge", 1}, {"Location", 1}});
    CHECK(break_in.feasibility == 3);

    const auto& guess = ev.nodes.at("guess-password");
    CHECK(guess.connector == "AND");
    CHECK(guess.attributes == AttributeMap{{"Resources", 2}, {"Knowledge", 5}, {"Location", 0}});
    CHECK(guess.feasibility == 2);

    const auto& admin_password = ev.nodes.at("obtain-admin-password");
    CHECK(admin_password.connector == "OR");
    CHECK(admin_password.selected == std::vector<Id>{"look-over-shoulder"});
    CHECK(admin_password.feasibility == 4);

    CHECK(ev.nodes.at("obtain-admin-privileges").feasibility == 4);
    CHECK(ev.diagnostics.empty());
    CHECK(ev.countermeasures.size() == 3);
}

TEST_CASE("gates: AND capped sum, threshold over the best two, countermeasures on leaves") {
    auto ev = evaluate_graph(fixture::graph("gates.rag"), fixture::din());
    CHECK(ev.nodes.at("fence").attributes.at("Resources") == 2);
    CHECK(ev.nodes.at("both").attributes == AttributeMap{{"Resources", 4}, {"Knowledge", 4}, {"Location", 1}});
    CHECK(ev.nodes.at("both").feasibility == 1);
    CHECK(ev.nodes.at("two").connector == "2-OF-N");
    CHECK(ev.nodes.at("two").selected == std::vector<Id>{"s1", "s2"});
    CHECK(ev.nodes.at("two").feasibility == 3);
    CHECK(ev.nodes.at("root").selected == std::vector<Id>{"two"});
}

TEST_CASE("a single child passes its values through") {
    auto ev = evaluate_graph(fixture::graph("chain.rag"), fixture::din());
    CHECK(ev.nodes.at("root").connector == "PASS");
    CHECK(ev.nodes.at("root").attributes == ev.nodes.at("b").attributes);
    CHECK(ev.nodes.at("b").connector.empty());
}

TEST_CASE("evaluation refuses invalid graphs") {
    CHECK_THROWS_AS(evaluate_graph(fixture::graph("cyclic.rag"), fixture::din()), ValidationError);
    try {
        evaluate_graph(fixture::graph("cyclic.rag"), fixture::din());
    } catch (const ValidationError& e) {
        CHECK(e.report().has("CYCLE"));
    }
}

TEST_CASE("evaluation is deterministic and leaves the graph untouched") {
    auto g = fixture::graph("weiss-iso.rag");
    auto copy = g;
    auto a = evaluate_graph(g, fixture::iso());
    auto b = evaluate_graph(g, fixture::iso());
    CHECK(a == b);
    CHECK(g == copy);
}

TEST_CASE("the ISO admin-privileges example") {
    auto ev = evaluate_graph(fixture::graph("weiss-iso.rag"), fixture::iso());
    CHECK(ev.nodes.at("guess-password").stages.at("AttackPotential") == 22);
    CHECK(ev.nodes.at("guess-password").feasibility == 2);
    CHECK(ev.consequences.at("data-leakage").risk == 4);
    CHECK(ev.consequences.at("denial-of-access").risk == 3);
}

TEST_CASE("the CLC admin-privileges example") {
    auto ev = evaluate_graph(fixture::graph("weiss-clc.rag"), fixture::clc());
    CHECK(ev.nodes.at("obtain-admin-privileges").feasibility == 4);
    CHECK(ev.nodes.at("guess-password").attributes == AttributeMap{{"Exposure", 2}, {"Vulnerability", 2}});
    CHECK(ev.edges.at("impact-data-leakage").impact == 4);
    CHECK(ev.consequences.at("data-leakage").risk == 4);
    CHECK(ev.consequences.at("denial-of-access").risk == 3);
}
