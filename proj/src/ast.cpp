#include "denat/syntax.hpp"

namespace denat {

std::string_view nodeKindName(NodeKind k) {
    switch (k) {
        case NodeKind::Function: return "Function";
        case NodeKind::ParamList: return "ParamList";
        case NodeKind::Block: return "Block";
        case NodeKind::If: return "If";
        case NodeKind::For: return "For";
        case NodeKind::While: return "While";
        case NodeKind::Return: return "Return";
        case NodeKind::Break: return "Break";
        case NodeKind::Continue: return "Continue";
        case NodeKind::DeclStmt: return "DeclStmt";
        case NodeKind::ExprStmt: return "ExprStmt";
        case NodeKind::Assign: return "Assign";
        case NodeKind::Binary: return "Binary";
        case NodeKind::Unary: return "Unary";
        case NodeKind::Ternary: return "Ternary";
        case NodeKind::Call: return "Call";
        case NodeKind::Index: return "Index";
        case NodeKind::Identifier: return "Identifier";
        case NodeKind::IntLit: return "IntLit";
        case NodeKind::BoolLit: return "BoolLit";
        case NodeKind::StrLit: return "StrLit";
    }
    return "?";
}

std::string_view typeName(TypeKind t) {
    switch (t) {
        case TypeKind::Int: return "int";
        case TypeKind::Bool: return "bool";
        case TypeKind::Str: return "str";
        case TypeKind::Void: return "void";
        case TypeKind::IntArray: return "int [ ]";
        case TypeKind::None: return "";
    }
    return "";
}

NodeId Ast::cloneSubtree(const Ast& from, NodeId src) {
    // `from` may be this arena; copy out before add() can reallocate it
    AstNode copy = from.at(src);
    std::vector<NodeId> srcKids = std::move(copy.children);
    copy.children.clear();
    for (NodeId c : srcKids) copy.children.push_back(cloneSubtree(from, c));
    return add(std::move(copy));
}

std::vector<NodeId> Ast::functions() const { return at(root).children; }

NodeId Ast::parentOf(NodeId id) const {
    for (const AstNode& n : nodes)
        for (NodeId c : n.children)
            if (c == id) return n.id;
    return kNoNode;
}

NodeId Ast::functionContaining(NodeId id) const {
    NodeId cur = id;
    while (cur != kNoNode && at(cur).kind != NodeKind::Function) cur = parentOf(cur);
    return cur;
}

bool structurallyEqual(const Ast& a, NodeId na, const Ast& b, NodeId nb) {
    const AstNode& x = a.at(na);
    const AstNode& y = b.at(nb);
    if (x.kind != y.kind || x.op != y.op || x.type != y.type || x.postfix != y.postfix)
        return false;
    if (x.hasInit != y.hasInit || x.hasCond != y.hasCond || x.hasUpdate != y.hasUpdate)
        return false;
    if (x.token.has_value() != y.token.has_value()) return false;
    if (x.token && !sameToken(*x.token, *y.token)) return false;
    if (x.children.size() != y.children.size()) return false;
    for (size_t i = 0; i < x.children.size(); ++i)
        if (!structurallyEqual(a, x.children[i], b, y.children[i])) return false;
    return true;
}

bool structurallyEqual(const Ast& a, const Ast& b) {
    return structurallyEqual(a, a.root, b, b.root);
}

bool isComparisonOp(std::string_view op) {
    return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

std::string_view flipComparison(std::string_view op) {
    if (op == "<") return ">";
    if (op == ">") return "<";
    if (op == "<=") return ">=";
    if (op == ">=") return "<=";
    return op;  // == and != are symmetric
}

std::string_view negateComparison(std::string_view op) {
    if (op == "==") return "!=";
    if (op == "!=") return "==";
    if (op == "<") return ">=";
    if (op == ">=") return "<";
    if (op == ">") return "<=";
    return ">";  // op == "<="
}

}  // namespace denat
