#include "denat/syntax.hpp"

#include <set>

namespace denat {

namespace {

class Parser {
public:
    Parser(const std::vector<Token>& tokens, std::string unitName)
        : toks_(tokens) {
        ast_.unitName = std::move(unitName);
    }

    Ast run() {
        AstNode rootNode;
        rootNode.kind = NodeKind::Block;  // unit root: list of functions
        NodeId root = ast_.add(rootNode);
        std::set<std::string> names;
        while (!atEnd()) {
            NodeId f = parseFunction();
            if (!names.insert(ast_.at(f).token->lexeme).second)
                throw ParseError("duplicate function name '" + ast_.at(f).token->lexeme + "'",
                                 ast_.at(f).token->span);
            ast_.at(root).children.push_back(f);
        }
        if (ast_.at(root).children.empty())
            throw ParseError("empty unit: expected at least one function", Span{0, 0});
        Span s{ast_.at(ast_.at(root).children.front()).span.begin,
               ast_.at(ast_.at(root).children.back()).span.end};
        ast_.at(root).span = s;
        ast_.root = root;
        return std::move(ast_);
    }

private:
    const std::vector<Token>& toks_;
    size_t pos_ = 0;
    Ast ast_;

    bool atEnd() const { return pos_ >= toks_.size(); }

    const Token& peek() const {
        if (atEnd()) throw ParseError("unexpected end of input", endSpan());
        return toks_[pos_];
    }

    Span endSpan() const {
        if (toks_.empty()) return Span{0, 0};
        return Span{toks_.back().span.end, toks_.back().span.end};
    }

    Span hereSpan() const { return atEnd() ? endSpan() : toks_[pos_].span; }

    bool check(std::string_view lexeme) const { return !atEnd() && toks_[pos_].lexeme == lexeme; }

    bool checkKind(TokenKind k) const { return !atEnd() && toks_[pos_].kind == k; }

    const Token& advance() {
        const Token& t = peek();
        ++pos_;
        return t;
    }

    bool match(std::string_view lexeme) {
        if (check(lexeme)) {
            ++pos_;
            return true;
        }
        return false;
    }

    const Token& expect(std::string_view lexeme, std::string_view what) {
        if (!check(lexeme))
            throw ParseError("expected " + std::string(what) + " '" + std::string(lexeme) + "'",
                             hereSpan());
        return advance();
    }

    bool atType() const {
        return check("int") || check("bool") || check("str") || check("void");
    }

    TypeKind parseType(bool allowVoid) {
        const Token& t = peek();
        TypeKind base;
        if (t.lexeme == "int") base = TypeKind::Int;
        else if (t.lexeme == "bool") base = TypeKind::Bool;
        else if (t.lexeme == "str") base = TypeKind::Str;
        else if (t.lexeme == "void") base = TypeKind::Void;
        else throw ParseError("expected a type", t.span);
        advance();
        if (check("[")) {
            advance();
            expect("]", "closing");
            if (base != TypeKind::Int)
                throw ParseError("only int arrays are supported", t.span);
            if (check("["))
                throw ParseError("nested array types are not supported", hereSpan());
            return TypeKind::IntArray;
        }
        if (base == TypeKind::Void && !allowVoid)
            throw ParseError("'void' is only valid as a return type", t.span);
        return base;
    }

    NodeId leaf(NodeKind kind, const Token& t) {
        AstNode n;
        n.kind = kind;
        n.token = t;
        n.span = t.span;
        return ast_.add(n);
    }

    NodeId parseFunction() {
        Span start = hereSpan();
        TypeKind ret = parseType(/*allowVoid=*/true);
        if (!checkKind(TokenKind::Identifier))
            throw ParseError("expected function name", hereSpan());
        Token name = advance();
        expect("(", "punctuation");

        AstNode params;
        params.kind = NodeKind::ParamList;
        Span paramsStart = toks_[pos_ - 1].span;
        NodeId paramList = ast_.add(params);
        if (!check(")")) {
            for (;;) {
                TypeKind pt = parseType(/*allowVoid=*/false);
                if (!checkKind(TokenKind::Identifier))
                    throw ParseError("expected parameter name", hereSpan());
                Token pn = advance();
                NodeId p = leaf(NodeKind::Identifier, pn);
                ast_.at(p).type = pt;
                ast_.at(paramList).children.push_back(p);
                if (!match(",")) break;
            }
        }
        const Token& close = expect(")", "punctuation");
        ast_.at(paramList).span = Span{paramsStart.begin, close.span.end};

        NodeId body = parseBlock();

        AstNode fn;
        fn.kind = NodeKind::Function;
        fn.token = name;
        fn.type = ret;
        fn.children = {paramList, body};
        fn.span = Span{start.begin, ast_.at(body).span.end};
        return ast_.add(fn);
    }

    NodeId parseBlock() {
        const Token& open = expect("{", "punctuation");
        AstNode blk;
        blk.kind = NodeKind::Block;
        NodeId b = ast_.add(blk);
        while (!check("}")) {
            NodeId s = parseStmt();  // may grow the arena; take the ref after
            ast_.at(b).children.push_back(s);
        }
        const Token& close = expect("}", "punctuation");
        ast_.at(b).span = Span{open.span.begin, close.span.end};
        return b;
    }

    NodeId parseStmt() {
        if (check("{")) return parseBlock();
        if (atType()) return parseDeclStmt();
        if (check("if")) return parseIf();
        if (check("for")) return parseFor();
        if (check("while")) return parseWhile();
        if (check("return")) return parseReturn();
        if (check("break") || check("continue")) {
            Token kw = advance();
            const Token& semi = expect(";", "punctuation");
            AstNode n;
            n.kind = kw.lexeme == "break" ? NodeKind::Break : NodeKind::Continue;
            n.span = Span{kw.span.begin, semi.span.end};
            return ast_.add(n);
        }
        return parseExprStmt();
    }

    NodeId parseDeclStmt() {
        Span start = hereSpan();
        TypeKind t = parseType(/*allowVoid=*/false);
        if (!checkKind(TokenKind::Identifier))
            throw ParseError("expected variable name", hereSpan());
        Token name = advance();
        NodeId ident = leaf(NodeKind::Identifier, name);
        AstNode decl;
        decl.kind = NodeKind::DeclStmt;
        decl.type = t;
        decl.children = {ident};
        if (match("=")) decl.children.push_back(parseExpr());
        const Token& semi = expect(";", "punctuation");
        decl.span = Span{start.begin, semi.span.end};
        return ast_.add(decl);
    }

    NodeId parseExprStmt() {
        NodeId e = parseExpr();
        const Token& semi = expect(";", "punctuation");
        AstNode n;
        n.kind = NodeKind::ExprStmt;
        n.children = {e};
        n.span = Span{ast_.at(e).span.begin, semi.span.end};
        return ast_.add(n);
    }

    NodeId parseIf() {
        Token kw = advance();
        expect("(", "punctuation");
        NodeId cond = parseExpr();
        expect(")", "punctuation");
        NodeId then = parseStmt();
        AstNode n;
        n.kind = NodeKind::If;
        n.children = {cond, then};
        uint32_t end = ast_.at(then).span.end;
        if (match("else")) {  // binds to the nearest if
            NodeId els = parseStmt();
            n.children.push_back(els);
            end = ast_.at(els).span.end;
        }
        n.span = Span{kw.span.begin, end};
        return ast_.add(n);
    }

    NodeId parseWhile() {
        Token kw = advance();
        expect("(", "punctuation");
        NodeId cond = parseExpr();
        expect(")", "punctuation");
        NodeId body = parseStmt();
        AstNode n;
        n.kind = NodeKind::While;
        n.children = {cond, body};
        n.span = Span{kw.span.begin, ast_.at(body).span.end};
        return ast_.add(n);
    }

    NodeId parseFor() {
        Token kw = advance();
        expect("(", "punctuation");
        AstNode n;
        n.kind = NodeKind::For;
        if (match(";")) {
            // empty initializer
        } else if (atType()) {
            n.children.push_back(parseDeclStmt());
            n.hasInit = true;
        } else {
            n.children.push_back(parseExprStmt());
            n.hasInit = true;
        }
        if (!check(";")) {
            n.children.push_back(parseExpr());
            n.hasCond = true;
        }
        expect(";", "punctuation");
        if (!check(")")) {
            n.children.push_back(parseExpr());
            n.hasUpdate = true;
        }
        expect(")", "punctuation");
        NodeId body = parseStmt();
        n.children.push_back(body);
        n.span = Span{kw.span.begin, ast_.at(body).span.end};
        return ast_.add(n);
    }

    NodeId parseReturn() {
        Token kw = advance();
        AstNode n;
        n.kind = NodeKind::Return;
        if (!check(";")) n.children.push_back(parseExpr());
        const Token& semi = expect(";", "punctuation");
        n.span = Span{kw.span.begin, semi.span.end};
        return ast_.add(n);
    }

    // expression ladder

    NodeId parseExpr() { return parseAssign(); }

    bool isLvalue(NodeId e) const {
        NodeKind k = ast_.at(e).kind;
        return k == NodeKind::Identifier || k == NodeKind::Index;
    }

    NodeId parseAssign() {
        NodeId lhs = parseTernary();
        if (!atEnd() && checkKind(TokenKind::Operator)) {
            std::string_view op = peek().lexeme;
            if (op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=") {
                Token opTok = advance();
                if (!isLvalue(lhs))
                    throw ParseError("assignment target must be a variable or index", opTok.span);
                NodeId rhs = parseAssign();  // right-associative
                AstNode n;
                n.kind = NodeKind::Assign;
                n.op = opTok.lexeme;
                n.children = {lhs, rhs};
                n.span = Span{ast_.at(lhs).span.begin, ast_.at(rhs).span.end};
                return ast_.add(n);
            }
        }
        return lhs;
    }

    NodeId parseTernary() {
        NodeId cond = parseBinary(0);
        if (match("?")) {
            NodeId a = parseExpr();
            expect(":", "operator");
            NodeId b = parseTernary();
            AstNode n;
            n.kind = NodeKind::Ternary;
            n.children = {cond, a, b};
            n.span = Span{ast_.at(cond).span.begin, ast_.at(b).span.end};
            return ast_.add(n);
        }
        return cond;
    }

    // binary precedence tiers, loosest first
    static int binaryTier(std::string_view op) {
        if (op == "||") return 0;
        if (op == "&&") return 1;
        if (op == "==" || op == "!=") return 2;
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return 3;
        if (op == "+" || op == "-") return 4;
        if (op == "*" || op == "/" || op == "%") return 5;
        return -1;
    }

    NodeId parseBinary(int tier) {
        if (tier > 5) return parseUnary();
        NodeId lhs = parseBinary(tier + 1);
        while (!atEnd() && checkKind(TokenKind::Operator) && binaryTier(peek().lexeme) == tier) {
            Token opTok = advance();
            NodeId rhs = parseBinary(tier + 1);
            AstNode n;
            n.kind = NodeKind::Binary;
            n.op = opTok.lexeme;
            n.children = {lhs, rhs};
            n.span = Span{ast_.at(lhs).span.begin, ast_.at(rhs).span.end};
            lhs = ast_.add(n);
        }
        return lhs;
    }

    NodeId parseUnary() {
        if (check("!") || check("-")) {
            Token opTok = advance();
            NodeId operand = parseUnary();
            AstNode n;
            n.kind = NodeKind::Unary;
            n.op = opTok.lexeme;
            n.children = {operand};
            n.span = Span{opTok.span.begin, ast_.at(operand).span.end};
            return ast_.add(n);
        }
        return parsePostfix();
    }

    NodeId parsePostfix() {
        NodeId e = parsePrimary();
        for (;;) {
            if (check("(")) {
                if (ast_.at(e).kind != NodeKind::Identifier)
                    throw ParseError("only plain identifiers can be called", hereSpan());
                advance();
                AstNode n;
                n.kind = NodeKind::Call;
                n.children = {e};
                if (!check(")")) {
                    for (;;) {
                        n.children.push_back(parseExpr());
                        if (!match(",")) break;
                    }
                }
                const Token& close = expect(")", "punctuation");
                n.span = Span{ast_.at(e).span.begin, close.span.end};
                e = ast_.add(n);
            } else if (check("[")) {
                advance();
                NodeId idx = parseExpr();
                const Token& close = expect("]", "punctuation");
                AstNode n;
                n.kind = NodeKind::Index;
                n.children = {e, idx};
                n.span = Span{ast_.at(e).span.begin, close.span.end};
                e = ast_.add(n);
            } else if (check("++") || check("--")) {
                Token opTok = advance();
                if (!isLvalue(e))
                    throw ParseError("'" + opTok.lexeme + "' needs a variable or index", opTok.span);
                AstNode n;
                n.kind = NodeKind::Unary;
                n.op = opTok.lexeme;
                n.postfix = true;
                n.children = {e};
                n.span = Span{ast_.at(e).span.begin, opTok.span.end};
                e = ast_.add(n);
            } else {
                break;
            }
        }
        return e;
    }

    NodeId parsePrimary() {
        const Token& t = peek();
        if (t.kind == TokenKind::Identifier) {
            advance();
            return leaf(NodeKind::Identifier, t);
        }
        if (t.kind == TokenKind::IntLiteral) {
            advance();
            return leaf(NodeKind::IntLit, t);
        }
        if (t.kind == TokenKind::StringLiteral) {
            advance();
            return leaf(NodeKind::StrLit, t);
        }
        if (t.lexeme == "true" || t.lexeme == "false") {
            advance();
            return leaf(NodeKind::BoolLit, t);
        }
        if (t.lexeme == "(") {
            Token open = advance();
            NodeId e = parseExpr();
            const Token& close = expect(")", "punctuation");
            // widen the span over the grouping parens so slices re-lex cleanly
            ast_.at(e).span = Span{open.span.begin, close.span.end};
            return e;
        }
        throw ParseError("expected an expression", t.span);
    }
};

}  // namespace

Ast parse(const std::vector<Token>& tokens, std::string unitName) {
    Parser p(tokens, std::move(unitName));
    return p.run();
}

SourceUnit SourceUnit::fromText(std::string text, std::string unitName) {
    SourceUnit u;
    u.text = std::move(text);
    u.tokens = lex(u.text);
    u.ast = parse(u.tokens, std::move(unitName));
    return u;
}

}  // namespace denat
