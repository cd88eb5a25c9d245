#include <doctest.h>

#include "denat/syntax.hpp"
#include "support/progen.hpp"

using namespace denat;

namespace {

const AstNode& soleFunction(const Ast& ast) { return ast.at(ast.functions().at(0)); }

std::string joined(const std::vector<Token>& toks) {
    std::string out;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) out += ' ';
        out += toks[i].lexeme;
    }
    return out;
}

}  // namespace

TEST_CASE("lexer: maximal munch groups ++") {
    auto toks = lex("i++");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0].kind == TokenKind::Identifier);
    CHECK(toks[0].lexeme == "i");
    CHECK(toks[1].kind == TokenKind::Operator);
    CHECK(toks[1].lexeme == "++");
}

TEST_CASE("lexer: punctuation splits") {
    auto toks = lex("for(;;)");
    REQUIRE(toks.size() == 5);
    CHECK(toks[0].lexeme == "for");
    CHECK(toks[0].kind == TokenKind::Keyword);
    CHECK(toks[1].lexeme == "(");
    CHECK(toks[2].lexeme == ";");
    CHECK(toks[3].lexeme == ";");
    CHECK(toks[4].lexeme == ")");
}

TEST_CASE("lexer: 0x is not a literal") {
    try {
        lex("int x = 0x;");
        FAIL("expected LexError");
    } catch (const LexError& e) {
        CHECK(e.offset == 8);  // offset of "0x"
    }
}

TEST_CASE("lexer: spans slice back to lexemes, comments dropped") {
    std::string text = "int f ( ) { // line\n return 1 ; /* block */ }";
    auto toks = lex(text);
    for (const Token& t : toks) {
        CHECK(t.span.begin < t.span.end);
        CHECK(text.substr(t.span.begin, t.span.end - t.span.begin) == t.lexeme);
    }
    for (const Token& t : toks) CHECK(t.lexeme.find("line") == std::string::npos);
}

TEST_CASE("lexer: single-space rejoin relexes identically") {
    auto check = [](const std::string& text) {
        auto toks = lex(text);
        auto again = lex(joined(toks));
        REQUIRE(again.size() == toks.size());
        for (size_t i = 0; i < toks.size(); ++i) CHECK(sameToken(toks[i], again[i]));
    };
    check("int f(int a){ a += 1; return a>=2 ? a : -a; }");
    check("void g(){ s = \"hi\"; while(!done) { x[i]--; } }");
    for (int s = 0; s < 50; ++s) check(progen::generateProgram(100 + s));
}

TEST_CASE("parser: minimal function shape") {
    auto u = SourceUnit::fromText("int f(){ return 1; }");
    const AstNode& fn = soleFunction(u.ast);
    CHECK(fn.kind == NodeKind::Function);
    CHECK(fn.token->lexeme == "f");
    CHECK(fn.type == TypeKind::Int);
    const AstNode& body = u.ast.at(fn.children[1]);
    CHECK(body.kind == NodeKind::Block);
    REQUIRE(body.children.size() == 1);
    const AstNode& ret = u.ast.at(body.children[0]);
    CHECK(ret.kind == NodeKind::Return);
    CHECK(u.ast.at(ret.children[0]).kind == NodeKind::IntLit);
}

TEST_CASE("parser: precedence puts ternary under assign, comparison under ternary") {
    auto u = SourceUnit::fromText("int f(int a,int b,int c,int p,int q){ a = b < c ? p : q; return a; }");
    const AstNode& body = u.ast.at(soleFunction(u.ast).children[1]);
    const AstNode& stmt = u.ast.at(body.children[0]);
    REQUIRE(stmt.kind == NodeKind::ExprStmt);
    const AstNode& assign = u.ast.at(stmt.children[0]);
    REQUIRE(assign.kind == NodeKind::Assign);
    const AstNode& tern = u.ast.at(assign.children[1]);
    REQUIRE(tern.kind == NodeKind::Ternary);
    const AstNode& cmp = u.ast.at(tern.children[0]);
    CHECK(cmp.kind == NodeKind::Binary);
    CHECK(cmp.op == "<");
}

TEST_CASE("parser: braceless if has a statement child and no else") {
    auto u = SourceUnit::fromText("void f(int x,int y){ if (x) y = 1; }");
    const AstNode& body = u.ast.at(soleFunction(u.ast).children[1]);
    const AstNode& ifNode = u.ast.at(body.children[0]);
    REQUIRE(ifNode.kind == NodeKind::If);
    CHECK(ifNode.children.size() == 2);
    CHECK(u.ast.at(ifNode.children[1]).kind == NodeKind::ExprStmt);
}

TEST_CASE("parser: dangling else binds to the nearest if") {
    auto u = SourceUnit::fromText("void f(bool a,bool b,int s,int t){ if (a) if (b) s = 1; else t = 2; }");
    const AstNode& body = u.ast.at(soleFunction(u.ast).children[1]);
    const AstNode& outer = u.ast.at(body.children[0]);
    CHECK(outer.children.size() == 2);  // no else on the outer if
    const AstNode& inner = u.ast.at(outer.children[1]);
    REQUIRE(inner.kind == NodeKind::If);
    CHECK(inner.children.size() == 3);
}

TEST_CASE("parser: error carries the offending span") {
    auto toks = lex("int f( { }");
    try {
        parse(toks);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.span.begin == 7);
    }
}

TEST_CASE("parser: rejects calls on non-identifiers and bad assign targets") {
    CHECK_THROWS_AS(SourceUnit::fromText("void f(){ (a+b)(); }"), ParseError);
    CHECK_THROWS_AS(SourceUnit::fromText("void f(int a,int b){ a + b = 1; }"), ParseError);
    CHECK_THROWS_AS(SourceUnit::fromText("void f(){ 3++; }"), ParseError);
    CHECK_THROWS_AS(SourceUnit::fromText("bool[] f(){ }"), ParseError);
}

TEST_CASE("printer: canonical single-space form") {
    auto u = SourceUnit::fromText("void w() { while(i<10){i++;} }");
    CHECK(printAst(u.ast) == "void w ( ) { while ( i < 10 ) { i ++ ; } }");
}

TEST_CASE("printer: empty block prints as { }") {
    auto u = SourceUnit::fromText("void f(){}");
    CHECK(printAst(u.ast) == "void f ( ) { }");
}

TEST_CASE("printer: grouping parens regenerate by precedence") {
    auto u = SourceUnit::fromText("int f(int a,int b,int c){ return (a + b) * c - a * (b - c); }");
    CHECK(printAst(u.ast) ==
          "int f ( int a , int b , int c ) { return ( a + b ) * c - a * ( b - c ) ; }");
}

TEST_CASE("printer: array types and indexing") {
    auto u = SourceUnit::fromText("int g(int[] a, int i){ a[i+1] = a[i]; return a[0]; }");
    CHECK(printAst(u.ast) ==
          "int g ( int [ ] a , int i ) { a [ i + 1 ] = a [ i ] ; return a [ 0 ] ; }");
}

TEST_CASE("round trip: print then reparse is structurally identical") {
    auto roundTrip = [](const std::string& text) {
        auto u = SourceUnit::fromText(text);
        auto printed = printAst(u.ast);
        auto again = SourceUnit::fromText(printed);
        CHECK(structurallyEqual(u.ast, again.ast));
        CHECK(printAst(again.ast) == printed);  // canonical form is a fixpoint
    };
    roundTrip("int f(){ return 1; }");
    roundTrip("void f(bool p){ if (p) if (!p) f(); else f(); }");
    roundTrip("int h(int n){ int s = 0; for(int i=0;i<n;i++) s = s + i; return s; }");
    roundTrip("int t(int a){ return a > 0 ? a : 0 - a; }");
    roundTrip("void s(str m){ str x = \"a\\\"b\"; if (x == m) { return; } }");
    for (int s = 0; s < 200; ++s) roundTrip(progen::generateProgram(7000 + s));
}

TEST_CASE("span soundness: node spans relex to the node's token yield") {
    auto u = SourceUnit::fromText(
        "int f(int a, int b){ while (a < b) { a = (a + 1) * 2; } return a; }");
    for (const AstNode& n : u.ast.nodes) {
        std::string slice = u.text.substr(n.span.begin, n.span.end - n.span.begin);
        auto sliceToks = lex(slice);
        // count the unit tokens lying inside the span
        std::vector<Token> covered;
        for (const Token& t : u.tokens)
            if (t.span.begin >= n.span.begin && t.span.end <= n.span.end) covered.push_back(t);
        REQUIRE(sliceToks.size() == covered.size());
        for (size_t i = 0; i < covered.size(); ++i) CHECK(sameToken(sliceToks[i], covered[i]));
    }
}

TEST_CASE("determinism: lex and parse are pure functions of the text") {
    std::string text = progen::generateProgram(42);
    auto a = SourceUnit::fromText(text);
    auto b = SourceUnit::fromText(text);
    CHECK(a.tokens.size() == b.tokens.size());
    CHECK(structurallyEqual(a.ast, b.ast));
    CHECK(printAst(a.ast) == printAst(b.ast));
}

TEST_CASE("ast invariants: single parent, ordered non-overlapping children") {
    auto u = SourceUnit::fromText(progen::generateProgram(11));
    std::vector<int> parents(u.ast.nodes.size(), 0);
    for (const AstNode& n : u.ast.nodes) {
        uint32_t prevEnd = 0;
        for (NodeId c : n.children) {
            parents[c]++;
            const AstNode& child = u.ast.at(c);
            CHECK(child.span.begin >= prevEnd);
            prevEnd = child.span.end;
            CHECK(child.span.begin >= n.span.begin);
            CHECK(child.span.end <= n.span.end);
        }
    }
    int roots = 0;
    for (size_t i = 0; i < parents.size(); ++i) {
        if (parents[i] == 0) ++roots;
        CHECK(parents[i] <= 1);
    }
    CHECK(roots == 1);
}
