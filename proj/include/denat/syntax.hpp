#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace denat {

/// Byte range into the source text, 0-based half-open.
struct Span {
    uint32_t begin = 0;
    uint32_t end = 0;
    bool operator==(const Span&) const = default;
};

enum class TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    StringLiteral,
    Operator,
    Punctuation,
};

struct Token {
    TokenKind kind;
    std::string lexeme;
    Span span;
};

inline bool sameToken(const Token& a, const Token& b) {
    return a.kind == b.kind && a.lexeme == b.lexeme;
}

struct LexError : std::runtime_error {
    LexError(std::string msg, uint32_t offset)
        : std::runtime_error(std::move(msg)), offset(offset) {}
    uint32_t offset;
};

struct ParseError : std::runtime_error {
    ParseError(std::string msg, Span span)
        : std::runtime_error(std::move(msg)), span(span) {}
    Span span;
};

bool isKeyword(std::string_view s);

/// Tokenize MiniLang source. Maximal munch; comments and whitespace dropped.
std::vector<Token> lex(std::string_view text);

enum class NodeKind {
    Function,
    ParamList,
    Block,
    If,
    For,
    While,
    Return,
    Break,
    Continue,
    DeclStmt,
    ExprStmt,
    Assign,
    Binary,
    Unary,
    Ternary,
    Call,
    Index,
    Identifier,
    IntLit,
    BoolLit,
    StrLit,
};

std::string_view nodeKindName(NodeKind k);

enum class TypeKind { None, Int, Bool, Str, Void, IntArray };

std::string_view typeName(TypeKind t);  // canonical token-joined text, e.g. "int [ ]"

using NodeId = uint32_t;
constexpr NodeId kNoNode = 0xffffffffu;

struct AstNode {
    NodeId id = kNoNode;
    NodeKind kind = NodeKind::Block;
    Span span;
    std::vector<NodeId> children;
    // Leaf token (Identifier/IntLit/BoolLit/StrLit); Function carries its name token.
    std::optional<Token> token;
    std::string op;               // Binary / Unary / Assign operator lexeme
    TypeKind type = TypeKind::None;  // Function return type, DeclStmt type, param type
    bool postfix = false;         // Unary: "i ++" vs "! x"
    // For statements: which header slots exist among children [init? cond? update? body]
    bool hasInit = false;
    bool hasCond = false;
    bool hasUpdate = false;
};

struct Ast {
    NodeId root = kNoNode;
    std::vector<AstNode> nodes;
    std::string unitName;

    const AstNode& at(NodeId id) const { return nodes[id]; }
    AstNode& at(NodeId id) { return nodes[id]; }

    NodeId add(AstNode n) {
        n.id = static_cast<NodeId>(nodes.size());
        nodes.push_back(std::move(n));
        return nodes.back().id;
    }

    /// Deep-copies the subtree at `src` (which may live in another arena) into
    /// this arena and returns the new root id.
    NodeId cloneSubtree(const Ast& from, NodeId src);

    std::vector<NodeId> functions() const;  // children of root, source order
    NodeId parentOf(NodeId id) const;       // linear scan; kNoNode for root
    NodeId functionContaining(NodeId id) const;
};

/// Parse a lexed token stream per the MiniLang grammar.
Ast parse(const std::vector<Token>& tokens, std::string unitName = "");

/// Canonical printing: the node's token yield joined with single spaces.
std::string printAst(const Ast& ast);
std::string printNode(const Ast& ast, NodeId node);
std::vector<Token> printTokens(const Ast& ast);  // kinds + lexemes only, spans unset

/// Kind/operator/type/leaf-lexeme equality, recursively; spans ignored.
bool structurallyEqual(const Ast& a, const Ast& b);
bool structurallyEqual(const Ast& a, NodeId na, const Ast& b, NodeId nb);

struct SourceUnit {
    std::string text;
    std::vector<Token> tokens;
    Ast ast;
    std::string language = "minilang";

    static SourceUnit fromText(std::string text, std::string unitName = "");
};

/// Helpers shared by transforms and tests.
bool isComparisonOp(std::string_view op);
std::string_view flipComparison(std::string_view op);   // < -> >, <= -> >=, symmetric ops unchanged
std::string_view negateComparison(std::string_view op); // == -> !=, < -> >=, ...

}  // namespace denat
