#include <doctest.h>

#include <algorithm>

#include "denat/dataflow.hpp"
#include "denat/transforms.hpp"
#include "support/fixtures.hpp"
#include "support/progen.hpp"

using namespace denat;
using namespace denat::dataflow;

namespace {

// (source occurrence index, target occurrence index) with occurrence indices
// valid by construction: occurrences are in source order.
std::vector<std::pair<uint32_t, uint32_t>> edgePairs(const DefUseGraph& g) {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (const Edge& e : g.edges) out.emplace_back(e.from, e.to);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("straight line: one def-use edge") {
    auto u = SourceUnit::fromText("void f(int y){ int x = 1; y = x; }");
    auto g = buildDefUse(u.ast);
    // occurrences in source order: y(param def), x(def), y(update), x(use)
    REQUIRE(g.occurrences.size() == 4);
    CHECK(g.occurrences[1].name == "x");
    CHECK(g.occurrences[1].role == OccRole::Def);
    CHECK(g.occurrences[3].role == OccRole::Use);
    CHECK(edgePairs(g) == std::vector<std::pair<uint32_t, uint32_t>>{{1, 3}});
}

TEST_CASE("loop reaching definitions: hand-enumerated worklist edge set") {
    auto u = SourceUnit::fromText("void f(){ int i = 0; while(i<3){ i = i + 1; } }");
    auto g = buildDefUse(u.ast);
    // source order: i(def), i(cond use), i(update lhs), i(rhs use)
    REQUIRE(g.occurrences.size() == 4);
    CHECK(g.occurrences[0].role == OccRole::Def);
    CHECK(g.occurrences[1].role == OccRole::Use);
    CHECK(g.occurrences[2].role == OccRole::Update);
    CHECK(g.occurrences[3].role == OccRole::Use);
    // def reaches both uses on the first pass; the update reaches both on
    // every later pass
    auto expected = std::vector<std::pair<uint32_t, uint32_t>>{{0, 1}, {0, 3}, {2, 1}, {2, 3}};
    CHECK(edgePairs(g) == expected);
}

TEST_CASE("statement order kills: later use links to the update only") {
    auto u = SourceUnit::fromText("void f(int y,int z){ int x = 1; y = x; x = 2; z = x; }");
    auto g = buildDefUse(u.ast);
    // x occurrences: def(=1) at idx2, use at idx4, update(=2) at idx5, use at idx7
    std::vector<std::pair<uint32_t, uint32_t>> xEdges;
    for (auto [f2, t] : edgePairs(g))
        if (g.occurrences[f2].name == "x") xEdges.emplace_back(f2, t);
    REQUIRE(xEdges.size() == 2);
    CHECK(g.occurrences[xEdges[0].first].role == OccRole::Def);
    CHECK(g.occurrences[xEdges[1].first].role == OccRole::Update);
}

TEST_CASE("branch merge: both sides may reach") {
    auto u = SourceUnit::fromText(
        "void f(bool c,int y){ int x = 1; if (c) { x = 2; } y = x; }");
    auto g = buildDefUse(u.ast);
    int intoLastUse = 0;
    uint32_t lastUse = static_cast<uint32_t>(g.occurrences.size()) - 1;
    for (auto [f2, t] : edgePairs(g))
        if (t == lastUse) ++intoLastUse;
    CHECK(intoLastUse == 2);  // the def and the branch update
}

TEST_CASE("scope exit: use after block-local decl is unresolved") {
    try {
        auto u = SourceUnit::fromText("void f(int b){ { int a = 1; } b = a; }");
        buildDefUse(u.ast);
        FAIL("expected UnresolvedVariable");
    } catch (const UnresolvedVariable& e) {
        CHECK(e.name == "a");
    }
}

TEST_CASE("duplicate declaration in one scope is rejected") {
    auto u = SourceUnit::fromText("void f(){ int a = 1; int a = 2; }");
    CHECK_THROWS_AS(buildDefUse(u.ast), DuplicateDeclaration);
}

TEST_CASE("occurrencesOf: bsearch arr has one def and four uses") {
    auto u = SourceUnit::fromText(fixtures::kBsearch);
    auto g = buildDefUse(u.ast);
    auto occ = occurrencesOf(g, "arr");
    REQUIRE(occ.size() == 5);
    CHECK(occ[0].role == OccRole::Def);
    for (size_t i = 1; i < occ.size(); ++i) CHECK(occ[i].role == OccRole::Use);
    CHECK(chainsOf(g, "arr").size() == 1);
}

TEST_CASE("occurrencesOf: shadowed variable forms two disjoint chains") {
    auto u = SourceUnit::fromText(
        "void f(){ int x = 1; { int x = 2; x = x + 1; } x = 5; }");
    auto g = buildDefUse(u.ast);
    auto chains = chainsOf(g, "x");
    REQUIRE(chains.size() == 2);
    auto occ = occurrencesOf(g, "x");
    int inner = 0, outer = 0;
    for (const auto& o : occ) (o.chain == chains[0] ? outer : inner)++;
    CHECK(outer == 2);  // def + trailing update
    CHECK(inner == 3);  // def + update + rhs use
}

TEST_CASE("occurrencesOf: unknown name") {
    auto u = SourceUnit::fromText("void f(){ int a = 1; }");
    auto g = buildDefUse(u.ast);
    CHECK_THROWS_AS(occurrencesOf(g, "nope"), UnknownName);
}

TEST_CASE("freeVars: statement and loop examples") {
    auto u = SourceUnit::fromText(
        "void f(int high,int mid,int n,int s){ high = mid + 1; int t = 0; "
        "for(int i=0;i<n;i++) s = s + i; }");
    const Ast& ast = u.ast;
    const AstNode& body = ast.at(ast.at(ast.functions()[0]).children[1]);
    NodeId assignStmt = body.children[0];
    NodeId declStmt = body.children[1];
    NodeId forStmt = body.children[2];
    CHECK(freeVars(ast, assignStmt) == std::set<std::string>{"high", "mid"});
    CHECK(freeVars(ast, declStmt) == std::set<std::string>{});
    CHECK(freeVars(ast, forStmt) == std::set<std::string>{"n", "s"});
}

TEST_CASE("isPure: assignment, update, and call poison a subtree") {
    auto u = SourceUnit::fromText(
        "bool f(int low,int high,int x,int i,int n){ bool a = low <= high; "
        "bool b = f2(x) > 0; bool c = i++ < n; return a && b == c; }");
    const Ast& ast = u.ast;
    const AstNode& body = ast.at(ast.at(ast.functions()[0]).children[1]);
    auto initOf = [&](size_t i) { return ast.at(body.children[i]).children[1]; };
    CHECK(isPure(ast, initOf(0)));
    CHECK(!isPure(ast, initOf(1)));
    CHECK(!isPure(ast, initOf(2)));
}

TEST_CASE("renaming consistency: a renamed unit has an isomorphic graph") {
    for (int s = 0; s < 30; ++s) {
        auto u = SourceUnit::fromText(progen::generateProgram(3000 + s));
        auto before = buildDefUse(u.ast);
        transform::RuleConfig cfg;
        cfg.renameFraction = 1.0;
        auto sites = transform::findSites(u, transform::RuleId::VarRename);
        REQUIRE(!sites.empty());
        auto out = transform::varRename(u, sites[0], cfg, 99 + s);
        auto after = buildDefUse(out.transformed.ast);
        REQUIRE(before.occurrences.size() == after.occurrences.size());
        REQUIRE(before.edges.size() == after.edges.size());
        for (size_t i = 0; i < before.edges.size(); ++i) {
            CHECK(before.edges[i].from == after.edges[i].from);
            CHECK(before.edges[i].to == after.edges[i].to);
        }
        for (size_t i = 0; i < before.occurrences.size(); ++i) {
            CHECK(before.occurrences[i].role == after.occurrences[i].role);
            CHECK(before.occurrences[i].chain == after.occurrences[i].chain);
        }
    }
}

TEST_CASE("anonymized edges are invariant under consistent renaming") {
    for (int s = 0; s < 30; ++s) {
        auto u = SourceUnit::fromText(progen::generateProgram(4000 + s));
        transform::RuleConfig cfg;
        cfg.renameFraction = 1.0;
        auto sites = transform::findSites(u, transform::RuleId::VarRename);
        auto out = transform::varRename(u, sites[0], cfg, 5 + s);
        auto a = anonymizedEdges(buildDefUse(u.ast));
        auto b = anonymizedEdges(buildDefUse(out.transformed.ast));
        CHECK(a == b);
    }
}

TEST_CASE("array element writes count as updates of the array") {
    auto u = SourceUnit::fromText("void f(int[] a, int i){ a[i] = 3; }");
    auto g = buildDefUse(u.ast);
    auto occ = occurrencesOf(g, "a");
    REQUIRE(occ.size() == 2);
    CHECK(occ[0].role == OccRole::Def);
    CHECK(occ[1].role == OccRole::Update);
}
