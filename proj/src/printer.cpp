#include "denat/syntax.hpp"

namespace denat {

namespace {

// Expression precedence for paren insertion, loosest to tightest.
int precOf(const Ast& ast, NodeId id) {
    const AstNode& n = ast.at(id);
    switch (n.kind) {
        case NodeKind::Assign: return 1;
        case NodeKind::Ternary: return 2;
        case NodeKind::Binary: {
            if (n.op == "||") return 3;
            if (n.op == "&&") return 4;
            if (n.op == "==" || n.op == "!=") return 5;
            if (n.op == "<" || n.op == "<=" || n.op == ">" || n.op == ">=") return 6;
            if (n.op == "+" || n.op == "-") return 7;
            return 8;  // * / %
        }
        case NodeKind::Unary: return n.postfix ? 10 : 9;
        case NodeKind::Call:
        case NodeKind::Index: return 10;
        default: return 11;  // leaves
    }
}

class Emitter {
public:
    explicit Emitter(const Ast& ast) : ast_(ast) {}

    std::vector<Token> takeTokens() && { return std::move(out_); }

    void unit(NodeId root) {
        for (NodeId f : ast_.at(root).children) function(f);
    }

    void function(NodeId id) {
        const AstNode& fn = ast_.at(id);
        type(fn.type);
        ident(fn.token->lexeme);
        punct("(");
        const AstNode& params = ast_.at(fn.children[0]);
        for (size_t i = 0; i < params.children.size(); ++i) {
            if (i) punct(",");
            const AstNode& p = ast_.at(params.children[i]);
            type(p.type);
            ident(p.token->lexeme);
        }
        punct(")");
        stmt(fn.children[1]);
    }

    void stmt(NodeId id) {
        const AstNode& n = ast_.at(id);
        switch (n.kind) {
            case NodeKind::Block:
                punct("{");
                for (NodeId s : n.children) stmt(s);
                punct("}");
                break;
            case NodeKind::DeclStmt:
                type(n.type);
                ident(ast_.at(n.children[0]).token->lexeme);
                if (n.children.size() > 1) {
                    op("=");
                    expr(n.children[1], 1);
                }
                punct(";");
                break;
            case NodeKind::ExprStmt:
                expr(n.children[0], 0);
                punct(";");
                break;
            case NodeKind::If:
                kw("if");
                punct("(");
                expr(n.children[0], 0);
                punct(")");
                stmt(n.children[1]);
                if (n.children.size() > 2) {
                    kw("else");
                    stmt(n.children[2]);
                }
                break;
            case NodeKind::While:
                kw("while");
                punct("(");
                expr(n.children[0], 0);
                punct(")");
                stmt(n.children[1]);
                break;
            case NodeKind::For: {
                kw("for");
                punct("(");
                size_t c = 0;
                if (n.hasInit) {
                    stmt(n.children[c++]);  // decl/expr statement carries its own ';'
                } else {
                    punct(";");
                }
                if (n.hasCond) expr(n.children[c++], 0);
                punct(";");
                if (n.hasUpdate) expr(n.children[c++], 0);
                punct(")");
                stmt(n.children[c]);
                break;
            }
            case NodeKind::Return:
                kw("return");
                if (!n.children.empty()) expr(n.children[0], 0);
                punct(";");
                break;
            case NodeKind::Break:
                kw("break");
                punct(";");
                break;
            case NodeKind::Continue:
                kw("continue");
                punct(";");
                break;
            default:
                expr(id, 0);
                punct(";");
                break;
        }
    }

    // minPrec: loosest precedence printable here without grouping parens
    void expr(NodeId id, int minPrec) {
        const AstNode& n = ast_.at(id);
        int p = precOf(ast_, id);
        bool parens = p < minPrec;
        if (parens) punct("(");
        switch (n.kind) {
            case NodeKind::Assign:
                expr(n.children[0], 10);
                op(n.op);
                expr(n.children[1], 1);
                break;
            case NodeKind::Ternary:
                // condition always grouped; matches the frozen canonical form
                punct("(");
                expr(n.children[0], 0);
                punct(")");
                op("?");
                expr(n.children[1], 1);
                op(":");
                expr(n.children[2], 2);
                break;
            case NodeKind::Binary:
                expr(n.children[0], p);
                op(n.op);
                expr(n.children[1], p + 1);  // left-associative
                break;
            case NodeKind::Unary:
                if (n.postfix) {
                    expr(n.children[0], 10);
                    op(n.op);
                } else {
                    op(n.op);
                    if (precOf(ast_, n.children[0]) >= 10) {
                        expr(n.children[0], 10);
                    } else {
                        punct("(");
                        expr(n.children[0], 0);
                        punct(")");
                    }
                }
                break;
            case NodeKind::Call:
                expr(n.children[0], 10);
                punct("(");
                for (size_t i = 1; i < n.children.size(); ++i) {
                    if (i > 1) punct(",");
                    expr(n.children[i], 1);
                }
                punct(")");
                break;
            case NodeKind::Index:
                expr(n.children[0], 10);
                punct("[");
                expr(n.children[1], 0);
                punct("]");
                break;
            case NodeKind::Identifier:
                ident(n.token->lexeme);
                break;
            case NodeKind::IntLit:
                out_.push_back(Token{TokenKind::IntLiteral, n.token->lexeme, {}});
                break;
            case NodeKind::BoolLit:
                kw(n.token->lexeme);
                break;
            case NodeKind::StrLit:
                out_.push_back(Token{TokenKind::StringLiteral, n.token->lexeme, {}});
                break;
            default:
                break;
        }
        if (parens) punct(")");
    }

private:
    const Ast& ast_;
    std::vector<Token> out_;

    void type(TypeKind t) {
        switch (t) {
            case TypeKind::Int: kw("int"); break;
            case TypeKind::Bool: kw("bool"); break;
            case TypeKind::Str: kw("str"); break;
            case TypeKind::Void: kw("void"); break;
            case TypeKind::IntArray:
                kw("int");
                punct("[");
                punct("]");
                break;
            case TypeKind::None: break;
        }
    }

    void kw(std::string_view s) { out_.push_back(Token{TokenKind::Keyword, std::string(s), {}}); }
    void ident(std::string_view s) {
        out_.push_back(Token{TokenKind::Identifier, std::string(s), {}});
    }
    void op(std::string_view s) { out_.push_back(Token{TokenKind::Operator, std::string(s), {}}); }
    void punct(std::string_view s) {
        out_.push_back(Token{TokenKind::Punctuation, std::string(s), {}});
    }
};

std::string joinTokens(const std::vector<Token>& toks) {
    std::string out;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) out += ' ';
        out += toks[i].lexeme;
    }
    return out;
}

}  // namespace

std::vector<Token> printTokens(const Ast& ast) {
    Emitter e(ast);
    e.unit(ast.root);
    return std::move(e).takeTokens();
}

std::string printAst(const Ast& ast) { return joinTokens(printTokens(ast)); }

std::string printNode(const Ast& ast, NodeId node) {
    Emitter e(ast);
    const AstNode& n = ast.at(node);
    switch (n.kind) {
        case NodeKind::Function:
            e.function(node);
            break;
        case NodeKind::Assign:
        case NodeKind::Ternary:
        case NodeKind::Binary:
        case NodeKind::Unary:
        case NodeKind::Call:
        case NodeKind::Index:
        case NodeKind::Identifier:
        case NodeKind::IntLit:
        case NodeKind::BoolLit:
        case NodeKind::StrLit:
            e.expr(node, 0);
            break;
        default:
            if (node == ast.root) {
                e.unit(node);
            } else {
                e.stmt(node);
            }
            break;
    }
    return joinTokens(std::move(e).takeTokens());
}

}  // namespace denat
