#include <doctest.h>

#include "denat/interp.hpp"
#include "denat/transforms.hpp"
#include "support/fixtures.hpp"
#include "support/progen.hpp"

using namespace denat;
using namespace denat::interp;

TEST_CASE("binary search finds the key") {
    auto u = SourceUnit::fromText(fixtures::kBsearch);
    auto res = run(u, "bsearch", {Value::ofArray({1, 3, 5, 7}), Value::ofInt(5)}, 1, kDefaultFuel);
    CHECK(res.status == RunStatus::Ok);
    REQUIRE(res.result.has_value());
    CHECK(*res.result == Value::ofInt(2));

    res = run(u, "bsearch", {Value::ofArray({1, 3, 5, 7}), Value::ofInt(4)}, 1, kDefaultFuel);
    CHECK(*res.result == Value::ofInt(-1));
    res = run(u, "bsearch", {Value::ofArray({}), Value::ofInt(4)}, 1, kDefaultFuel);
    CHECK(*res.result == Value::ofInt(-1));
}

TEST_CASE("status Ok ends the trace with a Return event") {
    auto u = SourceUnit::fromText("int f(int a){ ping(a); return a + 1; }");
    auto res = run(u, "f", {Value::ofInt(4)}, 7, kDefaultFuel);
    REQUIRE(res.status == RunStatus::Ok);
    REQUIRE(res.trace.size() == 2);
    CHECK(res.trace[0].kind == TraceEvent::Kind::ExternCall);
    CHECK(res.trace[0].callee == "ping");
    CHECK(res.trace[1].kind == TraceEvent::Kind::Return);
    CHECK(*res.trace[1].result == Value::ofInt(5));
}

TEST_CASE("extern calls are deterministic in the oracle seed and call index") {
    auto u = SourceUnit::fromText("int f(){ int a = probe(); int b = probe(); return a - b; }");
    auto r1 = run(u, "f", {}, 42, kDefaultFuel);
    auto r2 = run(u, "f", {}, 42, kDefaultFuel);
    CHECK(r1.identicalTo(r2));
    auto r3 = run(u, "f", {}, 43, kDefaultFuel);
    // different seed, different stub stream (almost surely)
    CHECK(r1.trace[0].result != r3.trace[0].result);
}

TEST_CASE("runtime errors land in the status, never abort") {
    auto u = SourceUnit::fromText("int f(int a){ return 10 / a; }");
    auto res = run(u, "f", {Value::ofInt(0)}, 1, kDefaultFuel);
    CHECK(res.status == RunStatus::RuntimeError);
    CHECK(res.error == ErrorKind::DivisionByZero);

    auto v = SourceUnit::fromText("int g(int[] a){ return a[3]; }");
    res = run(v, "g", {Value::ofArray({1})}, 1, kDefaultFuel);
    CHECK(res.error == ErrorKind::IndexOutOfBounds);

    auto w = SourceUnit::fromText("int h(bool b){ return b + 1; }");
    res = run(w, "h", {Value::ofBool(true)}, 1, kDefaultFuel);
    CHECK(res.error == ErrorKind::TypeMismatch);
}

TEST_CASE("int arithmetic wraps") {
    auto u = SourceUnit::fromText("int f(int a){ return a * a * a * a * a * a * a * a * a; }");
    auto res = run(u, "f", {Value::ofInt(999999)}, 1, kDefaultFuel);
    CHECK(res.status == RunStatus::Ok);  // wraps instead of UB
}

TEST_CASE("while(true) exhausts fuel") {
    auto u = SourceUnit::fromText("void f(){ while(true){} }");
    auto res = run(u, "f", {}, 1, 1000);
    CHECK(res.status == RunStatus::FuelExhausted);
    CHECK(res.trace.empty());
}

TEST_CASE("postfix increment yields the old value") {
    auto u = SourceUnit::fromText("int f(){ int j = 5; int i = j++; return i * 100 + j; }");
    auto res = run(u, "f", {}, 1, kDefaultFuel);
    CHECK(*res.result == Value::ofInt(506));
}

TEST_CASE("short circuit skips the right operand") {
    auto u = SourceUnit::fromText(
        "int f(int a){ if (a == 0 || 10 / a > 1) { return 1; } return 0; }");
    auto res = run(u, "f", {Value::ofInt(0)}, 1, kDefaultFuel);
    CHECK(res.status == RunStatus::Ok);  // no division by zero
    CHECK(*res.result == Value::ofInt(1));
}

TEST_CASE("intra-unit calls execute without trace events") {
    auto u = SourceUnit::fromText(
        "int helper(int x){ return x * 2; } int f(int a){ return helper(a) + 1; }");
    auto res = run(u, "f", {Value::ofInt(10)}, 1, kDefaultFuel);
    CHECK(*res.result == Value::ofInt(21));
    REQUIRE(res.trace.size() == 1);  // only the entry Return
}

TEST_CASE("arrays have value semantics across calls") {
    auto u = SourceUnit::fromText(
        "void bump(int[] a){ a[0] = 99; } int f(int[] a){ bump(a); return a[0]; }");
    auto res = run(u, "f", {Value::ofArray({1, 2})}, 1, kDefaultFuel);
    CHECK(*res.result == Value::ofInt(1));
}

TEST_CASE("equivalent: reflexivity") {
    auto u = SourceUnit::fromText(fixtures::kBsearch);
    auto rep = equivalent(u, u, "bsearch", 16, 7);
    CHECK(rep.verdict == Verdict::Equivalent);
    CHECK(rep.trialsRun == 16);
}

TEST_CASE("equivalent: a transformed unit matches its original") {
    auto u = SourceUnit::fromText(fixtures::kBsearch);
    auto sites = transform::findSites(u, transform::RuleId::BlockSwap);
    REQUIRE(!sites.empty());
    auto out = transform::blockSwap(u, sites[0]);
    auto rep = equivalent(out.original, out.transformed, "bsearch", 16, 11);
    CHECK(rep.verdict == Verdict::Equivalent);
}

TEST_CASE("equivalent: dropped negation is caught with a witness") {
    auto u = SourceUnit::fromText(fixtures::kBsearch);
    auto sites = transform::findSites(u, transform::RuleId::BlockSwap);
    transform::RuleConfig cfg;
    auto bad = transform::applyRuleAt(u, transform::RuleId::BlockSwap, sites[0], cfg, 3,
                                      transform::InjectedFault::DropNegation);
    auto rep = equivalent(bad.original, bad.transformed, "bsearch", 16, 13);
    REQUIRE(rep.verdict == Verdict::Divergent);
    CHECK(!rep.witnessArgs.empty());
    CHECK(!rep.detail.empty());
}

TEST_CASE("equivalent: signature mismatch is refused") {
    auto a = SourceUnit::fromText("int f(int x){ return x; }");
    auto b = SourceUnit::fromText("int f(bool x){ return 1; }");
    CHECK_THROWS_AS((void)equivalent(a, b, "f", 4, 1), SignatureMismatch);
    CHECK_THROWS_AS((void)equivalent(a, b, "g", 4, 1), SignatureMismatch);
}

TEST_CASE("equivalent: shared infinite loops are inconclusive, not divergent") {
    auto a = SourceUnit::fromText("void f(){ while(true){} }");
    auto b = SourceUnit::fromText("void f(){ while(true){} }");
    auto rep = equivalent(a, b, "f", 2, 1, 2000);
    CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("run is deterministic over generated programs") {
    for (int s = 0; s < 25; ++s) {
        auto u = SourceUnit::fromText(progen::generateProgram(6000 + s));
        auto args = trialArguments(u.ast, u.ast.functions()[0], 5, 0);
        auto r1 = run(u, "calc", args, 9, kDefaultFuel);
        auto r2 = run(u, "calc", args, 9, kDefaultFuel);
        CHECK(r1.identicalTo(r2));
        CHECK(r1.status == RunStatus::Ok);
    }
}
