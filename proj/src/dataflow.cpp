#include "denat/dataflow.hpp"

#include <algorithm>

namespace denat::dataflow {

namespace {

// Reaching set per chain: which def/update occurrences may flow into the next use.
using State = std::map<uint32_t, std::set<uint32_t>>;

void mergeInto(State& into, const State& from) {
    for (const auto& [chain, occs] : from) into[chain].insert(occs.begin(), occs.end());
}

class Builder {
public:
    explicit Builder(const Ast& ast) : ast_(ast) {}

    DefUseGraph run() {
        graph_.scopes.push_back(Scope{0, 0});
        for (NodeId f : ast_.functions()) function(f);
        finalize();
        return std::move(graph_);
    }

private:
    const Ast& ast_;
    DefUseGraph graph_;
    std::set<Edge> edgeSet_;
    std::map<NodeId, uint32_t> occOfNode_;  // Identifier node -> occurrence index

    // lexical environment: per live scope, name -> chain
    struct Frame {
        uint32_t scope;
        std::map<std::string, uint32_t> names;
    };
    std::vector<Frame> env_;

    // Scope ids are memoized per syntactic anchor so loop-body re-traversal
    // during the fixpoint does not mint duplicates.
    std::map<uint64_t, uint32_t> scopeMemo_;

    void pushScope(NodeId anchor, int slot) {
        uint64_t key = (static_cast<uint64_t>(anchor) << 2) | static_cast<uint64_t>(slot);
        auto it = scopeMemo_.find(key);
        uint32_t id;
        if (it != scopeMemo_.end()) {
            id = it->second;
        } else {
            uint32_t parent = env_.empty() ? 0 : env_.back().scope;
            id = static_cast<uint32_t>(graph_.scopes.size());
            graph_.scopes.push_back(Scope{id, parent});
            scopeMemo_.emplace(key, id);
        }
        env_.push_back(Frame{id, {}});
    }
    void popScope() { env_.pop_back(); }

    uint32_t resolve(const AstNode& ident) {
        for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
            auto hit = it->names.find(ident.token->lexeme);
            if (hit != it->names.end()) return hit->second;
        }
        throw UnresolvedVariable(ident.token->lexeme, ident.span);
    }

    // Occurrences are memoized per node so loop-body re-traversal during the
    // fixpoint does not duplicate them.
    uint32_t occurrence(NodeId node, OccRole role, uint32_t chain) {
        auto it = occOfNode_.find(node);
        if (it != occOfNode_.end()) return it->second;
        uint32_t idx = static_cast<uint32_t>(graph_.occurrences.size());
        graph_.occurrences.push_back(VarOccurrence{
            ast_.at(node).token->lexeme, node, role, env_.back().scope, chain});
        occOfNode_.emplace(node, idx);
        return idx;
    }

    uint32_t declare(NodeId identNode, TypeKind type, bool isParam, NodeId function) {
        const AstNode& ident = ast_.at(identNode);
        const std::string& name = ident.token->lexeme;
        auto memo = occOfNode_.find(identNode);
        if (memo != occOfNode_.end()) {
            // fixpoint re-visit: rebind the existing chain
            uint32_t chain = graph_.occurrences[memo->second].chain;
            env_.back().names[name] = chain;
            return memo->second;
        }
        if (env_.back().names.count(name))
            throw DuplicateDeclaration(name, ident.span);
        uint32_t chain = static_cast<uint32_t>(graph_.chains.size());
        graph_.chains.push_back(DefUseGraph::Chain{name, type, 0, isParam, function});
        uint32_t occ = occurrence(identNode, OccRole::Def, chain);
        graph_.chains[chain].defOcc = occ;
        env_.back().names[name] = chain;
        return occ;
    }

    void use(NodeId identNode, State& state) {
        uint32_t chain = resolve(ast_.at(identNode));
        uint32_t occ = occurrence(identNode, OccRole::Use, chain);
        for (uint32_t from : state[chain]) edgeSet_.insert(Edge{from, occ});
    }

    void update(NodeId identNode, State& state) {
        uint32_t chain = resolve(ast_.at(identNode));
        uint32_t occ = occurrence(identNode, OccRole::Update, chain);
        state[chain] = {occ};  // statement order kills prior reaching defs
    }

    // Evaluates an expression for its uses/updates, threading the state.
    void expr(NodeId id, State& state) {
        const AstNode& n = ast_.at(id);
        switch (n.kind) {
            case NodeKind::Identifier:
                use(id, state);
                break;
            case NodeKind::Assign: {
                const AstNode& lhs = ast_.at(n.children[0]);
                if (lhs.kind == NodeKind::Index) {
                    expr(lhs.children[1], state);  // index expression reads
                    expr(n.children[1], state);
                    update(lhs.children[0], state);  // element write updates the array
                } else {
                    expr(n.children[1], state);
                    update(n.children[0], state);
                }
                break;
            }
            case NodeKind::Unary:
                if (n.op == "++" || n.op == "--") {
                    const AstNode& operand = ast_.at(n.children[0]);
                    if (operand.kind == NodeKind::Index) {
                        expr(operand.children[1], state);
                        update(operand.children[0], state);
                    } else {
                        update(n.children[0], state);
                    }
                } else {
                    expr(n.children[0], state);
                }
                break;
            case NodeKind::Binary:
                if (n.op == "&&" || n.op == "||") {
                    expr(n.children[0], state);
                    State rhs = state;  // may or may not evaluate
                    expr(n.children[1], rhs);
                    mergeInto(state, rhs);
                } else {
                    expr(n.children[0], state);
                    expr(n.children[1], state);
                }
                break;
            case NodeKind::Ternary: {
                expr(n.children[0], state);
                State a = state;
                State b = state;
                expr(n.children[1], a);
                expr(n.children[2], b);
                state = a;
                mergeInto(state, b);
                break;
            }
            case NodeKind::Call:
                // children[0] is the callee name, not a variable occurrence
                for (size_t i = 1; i < n.children.size(); ++i) expr(n.children[i], state);
                break;
            case NodeKind::Index:
                expr(n.children[0], state);
                expr(n.children[1], state);
                break;
            default:
                break;  // literals
        }
    }

    struct LoopCtx {
        std::vector<State> breaks;
        std::vector<State> continues;
    };
    std::vector<LoopCtx*> loops_;

    void stmt(NodeId id, State& state, NodeId function) {
        const AstNode& n = ast_.at(id);
        switch (n.kind) {
            case NodeKind::Block:
                pushScope(id, 0);
                for (NodeId s : n.children) stmt(s, state, function);
                popScope();
                break;
            case NodeKind::DeclStmt: {
                if (n.children.size() > 1) expr(n.children[1], state);  // init reads outer scope
                uint32_t occ = declare(n.children[0], n.type, false, function);
                uint32_t chain = graph_.occurrences[occ].chain;
                state[chain] = {occ};
                break;
            }
            case NodeKind::ExprStmt:
                expr(n.children[0], state);
                break;
            case NodeKind::If: {
                expr(n.children[0], state);
                State thenState = state;
                pushScope(id, 1);
                stmt(n.children[1], thenState, function);
                popScope();
                if (n.children.size() > 2) {
                    State elseState = state;
                    pushScope(id, 2);
                    stmt(n.children[2], elseState, function);
                    popScope();
                    state = thenState;
                    mergeInto(state, elseState);
                } else {
                    mergeInto(state, thenState);
                }
                break;
            }
            case NodeKind::While: {
                LoopCtx ctx;
                loops_.push_back(&ctx);
                State in = state;
                for (;;) {
                    State probe = in;
                    expr(n.children[0], probe);
                    ctx.continues.clear();
                    ctx.breaks.clear();
                    State body = probe;
                    pushScope(id, 1);
                    stmt(n.children[1], body, function);
                    popScope();
                    for (const State& c : ctx.continues) mergeInto(body, c);
                    State next = state;
                    mergeInto(next, body);
                    if (next == in) {
                        state = probe;  // condition observed false
                        for (const State& b : ctx.breaks) mergeInto(state, b);
                        break;
                    }
                    in = next;
                }
                loops_.pop_back();
                break;
            }
            case NodeKind::For: {
                pushScope(id, 0);  // header scope holds the induction variable
                size_t c = 0;
                if (n.hasInit) stmt(n.children[c++], state, function);
                NodeId cond = n.hasCond ? n.children[c++] : kNoNode;
                NodeId upd = n.hasUpdate ? n.children[c++] : kNoNode;
                NodeId body = n.children[c];
                LoopCtx ctx;
                loops_.push_back(&ctx);
                State in = state;
                for (;;) {
                    State probe = in;
                    if (cond != kNoNode) expr(cond, probe);
                    ctx.continues.clear();
                    ctx.breaks.clear();
                    State bodyState = probe;
                    pushScope(id, 1);
                    stmt(body, bodyState, function);
                    popScope();
                    for (const State& k : ctx.continues) mergeInto(bodyState, k);
                    if (upd != kNoNode) expr(upd, bodyState);
                    State next = state;
                    mergeInto(next, bodyState);
                    if (next == in) {
                        state = probe;
                        for (const State& b : ctx.breaks) mergeInto(state, b);
                        break;
                    }
                    in = next;
                }
                loops_.pop_back();
                popScope();
                break;
            }
            case NodeKind::Return:
                if (!n.children.empty()) expr(n.children[0], state);
                break;
            case NodeKind::Break:
                if (!loops_.empty()) loops_.back()->breaks.push_back(state);
                break;
            case NodeKind::Continue:
                if (!loops_.empty()) loops_.back()->continues.push_back(state);
                break;
            default:
                break;
        }
    }

    void function(NodeId id) {
        const AstNode& fn = ast_.at(id);
        pushScope(id, 0);
        State state;
        for (NodeId p : ast_.at(fn.children[0]).children) {
            uint32_t occ = declare(p, ast_.at(p).type, true, id);
            state[graph_.occurrences[occ].chain] = {occ};
        }
        stmt(fn.children[1], state, id);
        popScope();
    }

    void finalize() {
        // canonical source order for occurrences; chains renumbered to match
        std::vector<uint32_t> order(graph_.occurrences.size());
        for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            return ast_.at(graph_.occurrences[a].node).span.begin <
                   ast_.at(graph_.occurrences[b].node).span.begin;
        });
        std::vector<uint32_t> newIndex(order.size());
        for (uint32_t i = 0; i < order.size(); ++i) newIndex[order[i]] = i;

        std::vector<VarOccurrence> occs;
        occs.reserve(order.size());
        for (uint32_t old : order) occs.push_back(graph_.occurrences[old]);

        // chains by first-occurrence order
        std::vector<uint32_t> chainOrder;
        std::vector<uint32_t> chainNew(graph_.chains.size(), 0);
        {
            std::vector<bool> seen(graph_.chains.size(), false);
            for (const VarOccurrence& o : occs) {
                if (!seen[o.chain]) {
                    seen[o.chain] = true;
                    chainOrder.push_back(o.chain);
                }
            }
            for (uint32_t i = 0; i < chainOrder.size(); ++i) chainNew[chainOrder[i]] = i;
        }
        std::vector<DefUseGraph::Chain> chains;
        chains.reserve(chainOrder.size());
        for (uint32_t old : chainOrder) {
            DefUseGraph::Chain c = graph_.chains[old];
            c.defOcc = newIndex[c.defOcc];
            chains.push_back(std::move(c));
        }
        for (VarOccurrence& o : occs) o.chain = chainNew[o.chain];

        graph_.occurrences = std::move(occs);
        graph_.chains = std::move(chains);
        graph_.edges.clear();
        for (const Edge& e : edgeSet_)
            graph_.edges.push_back(Edge{newIndex[e.from], newIndex[e.to]});
        std::sort(graph_.edges.begin(), graph_.edges.end());
    }
};

}  // namespace

DefUseGraph buildDefUse(const Ast& ast) {
    Builder b(ast);
    return b.run();
}

std::vector<VarOccurrence> occurrencesOf(const DefUseGraph& graph, std::string_view name) {
    std::vector<VarOccurrence> out;
    for (const VarOccurrence& o : graph.occurrences)
        if (o.name == name) out.push_back(o);
    if (out.empty()) throw UnknownName(std::string(name));
    return out;
}

std::vector<uint32_t> chainsOf(const DefUseGraph& graph, std::string_view name) {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < graph.chains.size(); ++i)
        if (graph.chains[i].name == name) out.push_back(i);
    if (out.empty()) throw UnknownName(std::string(name));
    return out;
}

namespace {

void collectNames(const Ast& ast, NodeId id, std::set<std::string>& referenced,
                  std::set<std::string>& declared) {
    const AstNode& n = ast.at(id);
    switch (n.kind) {
        case NodeKind::Identifier:
            referenced.insert(n.token->lexeme);
            return;
        case NodeKind::DeclStmt:
            declared.insert(ast.at(n.children[0]).token->lexeme);
            if (n.children.size() > 1) collectNames(ast, n.children[1], referenced, declared);
            return;
        case NodeKind::ParamList:
            for (NodeId p : n.children) declared.insert(ast.at(p).token->lexeme);
            return;
        case NodeKind::Call:
            for (size_t i = 1; i < n.children.size(); ++i)
                collectNames(ast, n.children[i], referenced, declared);
            return;
        default:
            for (NodeId c : n.children) collectNames(ast, c, referenced, declared);
            return;
    }
}

}  // namespace

std::set<std::string> freeVars(const Ast& ast, NodeId node) {
    std::set<std::string> referenced;
    std::set<std::string> declared;
    collectNames(ast, node, referenced, declared);
    std::set<std::string> out;
    for (const std::string& n : referenced)
        if (!declared.count(n)) out.insert(n);
    return out;
}

bool isPure(const Ast& ast, NodeId node) {
    const AstNode& n = ast.at(node);
    if (n.kind == NodeKind::Assign || n.kind == NodeKind::Call) return false;
    if (n.kind == NodeKind::Unary && (n.op == "++" || n.op == "--")) return false;
    for (NodeId c : n.children)
        if (!isPure(ast, c)) return false;
    return true;
}

std::vector<std::pair<uint32_t, int>> anonymizedEdges(const DefUseGraph& graph) {
    std::vector<std::pair<uint32_t, int>> out;
    out.reserve(graph.edges.size());
    for (const Edge& e : graph.edges) {
        const VarOccurrence& src = graph.occurrences[e.from];
        out.emplace_back(src.chain, src.role == OccRole::Def ? 0 : 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace denat::dataflow
