#include "denat/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "denat/dataflow.hpp"
#include "denat/rng.hpp"

namespace denat::transform {

std::string_view ruleName(RuleId id) {
    switch (id) {
        case RuleId::LoopExchange: return "loop-exchange";
        case RuleId::DeadCode: return "dead-code";
        case RuleId::BlockSwap: return "block-swap";
        case RuleId::OperandSwap: return "operand-swap";
        case RuleId::ConfusionInsert: return "confusion-insert";
        case RuleId::VarRename: return "var-rename";
    }
    return "?";
}

std::optional<RuleId> ruleFromName(std::string_view name) {
    for (RuleId r : kAllRules)
        if (ruleName(r) == name) return r;
    return std::nullopt;
}

namespace {

using dataflow::buildDefUse;
using dataflow::DefUseGraph;

using TK = TransformError::Kind;

[[noreturn]] void bail(TK kind, std::string msg) { throw TransformError(kind, std::move(msg)); }

std::vector<NodeId> preorder(const Ast& ast) {
    std::vector<NodeId> out;
    std::vector<NodeId> stack{ast.root};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        out.push_back(id);
        const auto& kids = ast.at(id).children;
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

std::vector<NodeId> parentMap(const Ast& ast) {
    std::vector<NodeId> parents(ast.nodes.size(), kNoNode);
    for (const AstNode& n : ast.nodes)
        for (NodeId c : n.children) parents[c] = n.id;
    return parents;
}

// Declarations visible just before `stmt`, innermost shadowing first.
std::vector<std::pair<std::string, TypeKind>> visibleBefore(const Ast& ast, NodeId stmt,
                                                            const std::vector<NodeId>& parents) {
    std::vector<std::pair<std::string, TypeKind>> out;
    std::set<std::string> seen;
    auto add = [&](const std::string& name, TypeKind t) {
        if (seen.insert(name).second) out.emplace_back(name, t);
    };
    NodeId cur = stmt;
    NodeId p = parents[cur];
    while (p != kNoNode) {
        const AstNode& pn = ast.at(p);
        if (pn.kind == NodeKind::Block) {
            for (NodeId child : pn.children) {
                if (child == cur) break;
                const AstNode& cn = ast.at(child);
                if (cn.kind == NodeKind::DeclStmt)
                    add(ast.at(cn.children[0]).token->lexeme, cn.type);
            }
        } else if (pn.kind == NodeKind::For && pn.hasInit && pn.children[0] != cur) {
            const AstNode& init = ast.at(pn.children[0]);
            if (init.kind == NodeKind::DeclStmt)
                add(ast.at(init.children[0]).token->lexeme, init.type);
        } else if (pn.kind == NodeKind::Function) {
            for (NodeId param : ast.at(pn.children[0]).children)
                add(ast.at(param).token->lexeme, ast.at(param).type);
        }
        cur = p;
        p = parents[cur];
    }
    return out;
}

NodeId makeIdent(Ast& a, const std::string& name) {
    AstNode n;
    n.kind = NodeKind::Identifier;
    n.token = Token{TokenKind::Identifier, name, {}};
    return a.add(std::move(n));
}

NodeId makeIntLit(Ast& a, const std::string& text) {
    AstNode n;
    n.kind = NodeKind::IntLit;
    n.token = Token{TokenKind::IntLiteral, text, {}};
    return a.add(std::move(n));
}

NodeId makeBoolLit(Ast& a, bool v) {
    AstNode n;
    n.kind = NodeKind::BoolLit;
    n.token = Token{TokenKind::Keyword, v ? "true" : "false", {}};
    return a.add(std::move(n));
}

NodeId makeBinary(Ast& a, std::string op, NodeId lhs, NodeId rhs) {
    AstNode n;
    n.kind = NodeKind::Binary;
    n.op = std::move(op);
    n.children = {lhs, rhs};
    return a.add(std::move(n));
}

NodeId makeBlockOf(Ast& a, std::vector<NodeId> stmts) {
    AstNode n;
    n.kind = NodeKind::Block;
    n.children = std::move(stmts);
    return a.add(std::move(n));
}

NodeId makeExprStmt(Ast& a, NodeId e) {
    AstNode n;
    n.kind = NodeKind::ExprStmt;
    n.children = {e};
    return a.add(std::move(n));
}

void replaceChild(Ast& a, NodeId parent, NodeId oldChild, NodeId newChild) {
    for (NodeId& c : a.at(parent).children) {
        if (c == oldChild) {
            c = newChild;
            return;
        }
    }
}

size_t indexInParent(const Ast& a, NodeId parent, NodeId child) {
    const auto& kids = a.at(parent).children;
    for (size_t i = 0; i < kids.size(); ++i)
        if (kids[i] == child) return i;
    return kids.size();
}

bool isStatementKind(NodeKind k) {
    switch (k) {
        case NodeKind::Block:
        case NodeKind::If:
        case NodeKind::For:
        case NodeKind::While:
        case NodeKind::Return:
        case NodeKind::Break:
        case NodeKind::Continue:
        case NodeKind::DeclStmt:
        case NodeKind::ExprStmt:
            return true;
        default:
            return false;
    }
}

// Donor statements for dead-code injection: simple expression statements,
// no control flow and no declarations by construction.
std::vector<NodeId> donorCandidates(const Ast& ast) {
    std::vector<NodeId> out;
    for (NodeId id : preorder(ast))
        if (ast.at(id).kind == NodeKind::ExprStmt) out.push_back(id);
    return out;
}

bool donorFitsSite(const Ast& ast, NodeId donor, const std::set<std::string>& inScope) {
    for (const std::string& name : dataflow::freeVars(ast, donor))
        if (!inScope.count(name)) return false;
    return true;
}

bool isVarRenameTarget(const std::string& name) {
    static const std::regex pat("^(VAR|var)_[0-9]+$");
    return std::regex_match(name, pat);
}

struct PatternA {
    NodeId first;    // "i = j ;"
    NodeId second;   // "j += 1 ;" or "j = j + 1 ;"
    std::string i, j;
};

std::optional<PatternA> matchPatternA(const Ast& ast, NodeId stmt,
                                      const std::vector<NodeId>& parents) {
    const AstNode& s1 = ast.at(stmt);
    if (s1.kind != NodeKind::ExprStmt) return std::nullopt;
    NodeId parent = parents[stmt];
    if (parent == kNoNode || ast.at(parent).kind != NodeKind::Block) return std::nullopt;
    size_t idx = indexInParent(ast, parent, stmt);
    const auto& kids = ast.at(parent).children;
    if (idx + 1 >= kids.size()) return std::nullopt;

    const AstNode& a1 = ast.at(s1.children[0]);
    if (a1.kind != NodeKind::Assign || a1.op != "=") return std::nullopt;
    const AstNode& lhs1 = ast.at(a1.children[0]);
    const AstNode& rhs1 = ast.at(a1.children[1]);
    if (lhs1.kind != NodeKind::Identifier || rhs1.kind != NodeKind::Identifier)
        return std::nullopt;
    std::string i = lhs1.token->lexeme;
    std::string j = rhs1.token->lexeme;
    if (i == j) return std::nullopt;

    const AstNode& s2 = ast.at(kids[idx + 1]);
    if (s2.kind != NodeKind::ExprStmt) return std::nullopt;
    const AstNode& a2 = ast.at(s2.children[0]);
    if (a2.kind != NodeKind::Assign) return std::nullopt;
    const AstNode& lhs2 = ast.at(a2.children[0]);
    if (lhs2.kind != NodeKind::Identifier || lhs2.token->lexeme != j) return std::nullopt;
    const AstNode& rhs2 = ast.at(a2.children[1]);
    bool incr = false;
    if (a2.op == "+=" && rhs2.kind == NodeKind::IntLit && rhs2.token->lexeme == "1") {
        incr = true;
    } else if (a2.op == "=" && rhs2.kind == NodeKind::Binary && rhs2.op == "+") {
        const AstNode& l = ast.at(rhs2.children[0]);
        const AstNode& r = ast.at(rhs2.children[1]);
        incr = l.kind == NodeKind::Identifier && l.token->lexeme == j &&
               r.kind == NodeKind::IntLit && r.token->lexeme == "1";
    }
    if (!incr) return std::nullopt;

    // j must be an int
    for (const auto& [name, type] : visibleBefore(ast, stmt, parents))
        if (name == j) return type == TypeKind::Int
                                  ? std::optional<PatternA>(PatternA{stmt, kids[idx + 1], i, j})
                                  : std::nullopt;
    return std::nullopt;
}

// Single assignment "y = e ;", possibly braced, with an identifier target.
std::optional<NodeId> branchAssign(const Ast& ast, NodeId stmt) {
    NodeId inner = stmt;
    if (ast.at(stmt).kind == NodeKind::Block) {
        if (ast.at(stmt).children.size() != 1) return std::nullopt;
        inner = ast.at(stmt).children[0];
    }
    if (ast.at(inner).kind != NodeKind::ExprStmt) return std::nullopt;
    NodeId e = ast.at(inner).children[0];
    const AstNode& a = ast.at(e);
    if (a.kind != NodeKind::Assign || a.op != "=") return std::nullopt;
    if (ast.at(a.children[0]).kind != NodeKind::Identifier) return std::nullopt;
    return e;
}

bool matchPatternB(const Ast& ast, NodeId ifNode) {
    const AstNode& n = ast.at(ifNode);
    if (n.kind != NodeKind::If || n.children.size() != 3) return false;
    auto thenAssign = branchAssign(ast, n.children[1]);
    auto elseAssign = branchAssign(ast, n.children[2]);
    if (!thenAssign || !elseAssign) return false;
    return ast.at(ast.at(*thenAssign).children[0]).token->lexeme ==
           ast.at(ast.at(*elseAssign).children[0]).token->lexeme;
}

bool functionHasVariables(const Ast& ast, NodeId fn) {
    if (!ast.at(ast.at(fn).children[0]).children.empty()) return true;
    std::vector<NodeId> stack{ast.at(fn).children[1]};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (ast.at(id).kind == NodeKind::DeclStmt) return true;
        for (NodeId c : ast.at(id).children) stack.push_back(c);
    }
    return false;
}

TransformOutcome finish(const SourceUnit& unit, RuleId rule, NodeId site, uint64_t seed,
                        Ast mutated, std::map<std::string, std::string> aux) {
    std::string text = printAst(mutated);
    if (text == printAst(unit.ast))
        bail(TK::VacuousTransform, "transform produced the original code");
    TransformOutcome out;
    out.rule = rule;
    out.site = site;
    out.original = unit;
    out.transformed = SourceUnit::fromText(text, unit.ast.unitName);
    out.seed = seed;
    out.auxiliary = std::move(aux);
    return out;
}

// ---- loop exchange ----

void insertUpdateInStmt(Ast& a, NodeId stmt, NodeId updTemplate, int& inserted);

void insertUpdateInBlock(Ast& a, NodeId blockId, NodeId updTemplate, int& inserted) {
    for (size_t i = 0; i < a.at(blockId).children.size(); ++i) {
        NodeId s = a.at(blockId).children[i];
        NodeKind k = a.at(s).kind;
        if (k == NodeKind::Break || k == NodeKind::Continue) {
            NodeId upd = a.cloneSubtree(a, updTemplate);
            auto& kids = a.at(blockId).children;
            kids.insert(kids.begin() + static_cast<long>(i), upd);
            ++i;
            ++inserted;
        } else {
            insertUpdateInStmt(a, s, updTemplate, inserted);
        }
    }
}

void insertUpdateInStmt(Ast& a, NodeId stmt, NodeId updTemplate, int& inserted) {
    switch (a.at(stmt).kind) {
        case NodeKind::Block:
            insertUpdateInBlock(a, stmt, updTemplate, inserted);
            break;
        case NodeKind::If: {
            size_t branchCount = a.at(stmt).children.size();
            for (size_t idx = 1; idx < branchCount; ++idx) {
                NodeId branch = a.at(stmt).children[idx];
                NodeKind bk = a.at(branch).kind;
                if (bk == NodeKind::Break || bk == NodeKind::Continue) {
                    NodeId upd = a.cloneSubtree(a, updTemplate);
                    NodeId blk = makeBlockOf(a, {upd, branch});
                    a.at(stmt).children[idx] = blk;
                    ++inserted;
                } else {
                    insertUpdateInStmt(a, branch, updTemplate, inserted);
                }
            }
            break;
        }
        case NodeKind::For:
        case NodeKind::While:
            break;  // inner loops own their break/continue
        default:
            break;
    }
}

TransformOutcome doLoopExchange(const SourceUnit& unit, NodeId site, InjectedFault fault) {
    const AstNode& orig = unit.ast.at(site);
    if (orig.kind != NodeKind::For && orig.kind != NodeKind::While)
        bail(TK::NotALoopSite, "site is not a for/while loop");

    Ast w = unit.ast;
    std::map<std::string, std::string> aux;

    if (orig.kind == NodeKind::While) {
        AstNode& n = w.at(site);
        n.kind = NodeKind::For;
        n.hasInit = false;
        n.hasCond = true;
        n.hasUpdate = false;
        aux["direction"] = "while-to-for";
        return finish(unit, RuleId::LoopExchange, site, 0, std::move(w), std::move(aux));
    }

    aux["direction"] = "for-to-while";
    auto parents = parentMap(w);
    const AstNode& f = w.at(site);
    size_t c = 0;
    NodeId init = f.hasInit ? f.children[c++] : kNoNode;
    NodeId cond = f.hasCond ? f.children[c++] : kNoNode;
    NodeId upd = f.hasUpdate ? f.children[c++] : kNoNode;
    NodeId body = f.children[c];

    if (cond == kNoNode) cond = makeBoolLit(w, true);

    if (upd != kNoNode) {
        if (w.at(body).kind != NodeKind::Block) body = makeBlockOf(w, {body});
        NodeId updStmt = makeExprStmt(w, upd);
        int inserted = 0;
        if (fault != InjectedFault::SkipContinueUpdate)
            insertUpdateInBlock(w, body, updStmt, inserted);
        w.at(body).children.push_back(updStmt);
        aux["update_insertions"] = std::to_string(inserted + 1);
    }

    AstNode wl;
    wl.kind = NodeKind::While;
    wl.children = {cond, body};
    NodeId whileId = w.add(std::move(wl));

    NodeId parent = parents[site];
    if (init == kNoNode) {
        replaceChild(w, parent, site, whileId);
        aux["hoisted"] = "none";
    } else {
        bool flat = false;
        if (parent != kNoNode && w.at(parent).kind == NodeKind::Block) {
            if (w.at(init).kind == NodeKind::ExprStmt) {
                flat = true;
            } else {
                const std::string& name = w.at(w.at(init).children[0]).token->lexeme;
                bool collision = false;
                for (const auto& [n, t] : visibleBefore(w, site, parents)) {
                    (void)t;
                    if (n == name) collision = true;
                }
                for (NodeId sib : w.at(parent).children) {
                    const AstNode& sn = w.at(sib);
                    if (sib != site && sn.kind == NodeKind::DeclStmt &&
                        w.at(sn.children[0]).token->lexeme == name)
                        collision = true;
                }
                flat = !collision;
            }
        }
        if (flat) {
            auto& kids = w.at(parent).children;
            size_t idx = indexInParent(w, parent, site);
            kids[idx] = whileId;
            kids.insert(kids.begin() + static_cast<long>(idx), init);
            aux["hoisted"] = "flat";
        } else {
            NodeId wrapper = makeBlockOf(w, {init, whileId});
            replaceChild(w, parent, site, wrapper);
            aux["hoisted"] = "block";
        }
    }
    return finish(unit, RuleId::LoopExchange, site, 0, std::move(w), std::move(aux));
}

// ---- dead code ----

TransformOutcome doInjectDeadCode(const SourceUnit& unit, NodeId site, Rng& rng,
                                  const RuleConfig& config, InjectedFault fault) {
    Ast w = unit.ast;
    auto parents = parentMap(w);
    if (!isStatementKind(w.at(site).kind) || parents[site] == kNoNode ||
        w.at(parents[site]).kind != NodeKind::Block)
        bail(TK::BadSite, "dead-code site must be a statement inside a block");

    auto visible = visibleBefore(w, site, parents);
    std::set<std::string> inScope;
    for (const auto& [name, type] : visible) {
        (void)type;
        inScope.insert(name);
    }

    std::vector<NodeId> donors;
    for (NodeId d : donorCandidates(w))
        if (donorFitsSite(w, d, inScope)) donors.push_back(d);
    if (donors.empty()) bail(TK::NoDonorStatement, "no transplantable statement is in scope");

    NodeId donor = donors[rng.bounded(donors.size())];

    // guard operand: an in-scope int variable or the literal 0
    std::vector<std::string> guards;
    for (const auto& [name, type] : visible)
        if (type == TypeKind::Int) guards.push_back(name);
    guards.push_back("0");
    const std::string& x = guards[rng.bounded(guards.size())];

    const auto& forms = config.deadGuardForms;
    const std::string& form = forms[rng.bounded(forms.size())];

    auto operand = [&]() {
        return x == "0" ? makeIntLit(w, "0") : makeIdent(w, x);
    };
    bool satisfiable = fault == InjectedFault::SatisfiableGuard;
    std::string op = form == "while" ? (satisfiable ? "==" : "!=") : (satisfiable ? "<=" : "<");
    NodeId guard = makeBinary(w, op, operand(), operand());
    NodeId donorClone = w.cloneSubtree(w, donor);
    NodeId wrapped = makeBlockOf(w, {donorClone});

    AstNode g;
    g.kind = form == "while" ? NodeKind::While : NodeKind::If;
    g.children = {guard, wrapped};
    NodeId guardStmt = w.add(std::move(g));

    NodeId parent = parents[site];
    auto& kids = w.at(parent).children;
    kids.insert(kids.begin() + static_cast<long>(indexInParent(w, parent, site)), guardStmt);

    std::map<std::string, std::string> aux;
    aux["donor"] = printNode(unit.ast, donor);
    aux["guard"] = printNode(w, guard);
    aux["guard_form"] = form;
    return finish(unit, RuleId::DeadCode, site, 0, std::move(w), std::move(aux));
}

// ---- block swap ----

TransformOutcome doBlockSwap(const SourceUnit& unit, NodeId site, InjectedFault fault) {
    const AstNode& orig = unit.ast.at(site);
    if (orig.kind != NodeKind::If) bail(TK::BadSite, "block-swap site must be an if");
    if (orig.children.size() != 3) bail(TK::NoElseBranch, "if has no else branch");

    Ast w = unit.ast;
    std::map<std::string, std::string> aux;
    aux["original_condition"] = printNode(unit.ast, orig.children[0]);

    // an else-if chain gets its trailing if braced before the swap
    NodeId elseChild = w.at(site).children[2];
    if (w.at(elseChild).kind == NodeKind::If)
        w.at(site).children[2] = makeBlockOf(w, {elseChild});

    std::swap(w.at(site).children[1], w.at(site).children[2]);

    if (fault != InjectedFault::DropNegation) {
        NodeId cond = w.at(site).children[0];
        AstNode& cn = w.at(cond);
        if (cn.kind == NodeKind::Binary && isComparisonOp(cn.op)) {
            cn.op = std::string(negateComparison(cn.op));
        } else if (cn.kind == NodeKind::Unary && cn.op == "!" && !cn.postfix) {
            w.at(site).children[0] = cn.children[0];
        } else {
            AstNode neg;
            neg.kind = NodeKind::Unary;
            neg.op = "!";
            neg.children = {cond};
            w.at(site).children[0] = w.add(std::move(neg));
        }
    }
    aux["new_condition"] = printNode(w, w.at(site).children[0]);
    return finish(unit, RuleId::BlockSwap, site, 0, std::move(w), std::move(aux));
}

// ---- operand swap ----

bool operandSwapEligible(const Ast& ast, NodeId site) {
    const AstNode& n = ast.at(site);
    if (n.kind != NodeKind::Binary) return false;
    if (isComparisonOp(n.op)) return true;
    if (n.op == "&&" || n.op == "||")
        return dataflow::isPure(ast, n.children[0]) && dataflow::isPure(ast, n.children[1]);
    return false;
}

TransformOutcome doOperandSwap(const SourceUnit& unit, NodeId site, InjectedFault fault) {
    if (!operandSwapEligible(unit.ast, site))
        bail(TK::IneligibleOperator, "operand swap needs a comparison or pure &&/||");

    Ast w = unit.ast;
    AstNode& n = w.at(site);
    std::map<std::string, std::string> aux;
    aux["operator_before"] = n.op;
    std::swap(n.children[0], n.children[1]);
    if (fault != InjectedFault::NoOperatorFlip) n.op = std::string(flipComparison(n.op));
    aux["operator_after"] = n.op;
    return finish(unit, RuleId::OperandSwap, site, 0, std::move(w), std::move(aux));
}

// ---- confusing code ----

TransformOutcome doConfusionInsert(const SourceUnit& unit, NodeId site, InjectedFault fault) {
    Ast w = unit.ast;
    auto parents = parentMap(w);
    std::map<std::string, std::string> aux;

    if (w.at(site).kind == NodeKind::If) {
        if (!matchPatternB(w, site))
            bail(TK::PatternMismatch, "if/else branches are not twin assignments");
        const AstNode& n = w.at(site);
        NodeId thenAssign = *branchAssign(w, n.children[1]);
        NodeId elseAssign = *branchAssign(w, n.children[2]);
        NodeId cond = n.children[0];
        NodeId lhs = w.cloneSubtree(w, w.at(thenAssign).children[0]);
        NodeId p = w.cloneSubtree(w, w.at(thenAssign).children[1]);
        NodeId q = w.cloneSubtree(w, w.at(elseAssign).children[1]);
        if (fault == InjectedFault::SwapTernaryArms) std::swap(p, q);

        AstNode tern;
        tern.kind = NodeKind::Ternary;
        tern.children = {cond, p, q};
        NodeId ternId = w.add(std::move(tern));

        AstNode assign;
        assign.kind = NodeKind::Assign;
        assign.op = "=";
        assign.children = {lhs, ternId};
        NodeId assignId = w.add(std::move(assign));
        NodeId stmt = makeExprStmt(w, assignId);
        replaceChild(w, parents[site], site, stmt);
        aux["pattern"] = "ternary-intro";
        return finish(unit, RuleId::ConfusionInsert, site, 0, std::move(w), std::move(aux));
    }

    auto m = matchPatternA(w, site, parents);
    if (!m) bail(TK::PatternMismatch, "statements do not match 'i = j ; j += 1 ;'");

    NodeId lhs = makeIdent(w, m->i);
    NodeId jIdent = makeIdent(w, m->j);
    AstNode incr;
    incr.kind = NodeKind::Unary;
    incr.op = "++";
    incr.postfix = true;
    incr.children = {jIdent};
    NodeId incrId = w.add(std::move(incr));

    AstNode assign;
    assign.kind = NodeKind::Assign;
    assign.op = "=";
    assign.children = {lhs, incrId};
    NodeId stmt = makeExprStmt(w, w.add(std::move(assign)));

    NodeId parent = parents[site];
    auto& kids = w.at(parent).children;
    size_t idx = indexInParent(w, parent, site);
    kids[idx] = stmt;
    kids.erase(kids.begin() + static_cast<long>(idx) + 1);
    aux["pattern"] = "incr-fold";
    return finish(unit, RuleId::ConfusionInsert, site, 0, std::move(w), std::move(aux));
}

// ---- variable renaming ----

TransformOutcome doVarRename(const SourceUnit& unit, NodeId site, const RuleConfig& config,
                             Rng& rng, InjectedFault fault) {
    if (unit.ast.at(site).kind != NodeKind::Function)
        bail(TK::BadSite, "rename site must be a function");
    DefUseGraph graph = buildDefUse(unit.ast);

    std::vector<uint32_t> candidates;
    for (uint32_t i = 0; i < graph.chains.size(); ++i) {
        const auto& chain = graph.chains[i];
        if (chain.function == site && !isVarRenameTarget(chain.name)) candidates.push_back(i);
    }
    if (candidates.empty()) bail(TK::NothingToRename, "function declares no renameable variable");

    size_t k = static_cast<size_t>(
        std::ceil(config.renameFraction * static_cast<double>(candidates.size())));
    k = std::min(std::max<size_t>(k, 1), candidates.size());

    // seeded partial Fisher-Yates, then first-occurrence order for numbering
    std::vector<uint32_t> pool = candidates;
    for (size_t i = 0; i + 1 < pool.size(); ++i) {
        size_t j = i + static_cast<size_t>(rng.bounded(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<uint32_t> chosen(pool.begin(), pool.begin() + static_cast<long>(k));
    std::sort(chosen.begin(), chosen.end());  // chain ids follow first occurrence

    std::set<std::string> taken;
    for (const auto& occ : graph.occurrences) taken.insert(occ.name);
    for (NodeId f : unit.ast.functions()) taken.insert(unit.ast.at(f).token->lexeme);

    Ast w = unit.ast;
    std::string prefix = config.lowercaseRenames ? "var_" : "VAR_";
    std::map<std::string, std::string> renameMap;
    uint32_t counter = 1;
    uint32_t faultBudget = fault == InjectedFault::MissRenameOccurrence ? 1 : 0;
    for (uint32_t chain : chosen) {
        std::string fresh;
        for (;;) {
            fresh = prefix + std::to_string(counter++);
            if (!taken.count(fresh)) break;
        }
        taken.insert(fresh);
        renameMap[graph.chains[chain].name] = fresh;

        std::vector<NodeId> nodes;
        for (const auto& occ : graph.occurrences)
            if (occ.chain == chain) nodes.push_back(occ.node);
        if (faultBudget > 0 && nodes.size() >= 2) {
            nodes.pop_back();  // one occurrence keeps the old name
            --faultBudget;
        }
        for (NodeId nd : nodes) w.at(nd).token->lexeme = fresh;
    }

    std::map<std::string, std::string> aux;
    std::string mapText;
    for (const auto& [from, to] : renameMap) {
        if (!mapText.empty()) mapText += ";";
        mapText += from + "->" + to;
    }
    aux["rename_map"] = mapText;
    return finish(unit, RuleId::VarRename, site, 0, std::move(w), std::move(aux));
}

TransformOutcome dispatch(const SourceUnit& unit, RuleId rule, NodeId site,
                          const RuleConfig& config, Rng& rng, InjectedFault fault) {
    switch (rule) {
        case RuleId::LoopExchange: return doLoopExchange(unit, site, fault);
        case RuleId::DeadCode: return doInjectDeadCode(unit, site, rng, config, fault);
        case RuleId::BlockSwap: return doBlockSwap(unit, site, fault);
        case RuleId::OperandSwap: return doOperandSwap(unit, site, fault);
        case RuleId::ConfusionInsert: return doConfusionInsert(unit, site, fault);
        case RuleId::VarRename: return doVarRename(unit, site, config, rng, fault);
    }
    bail(TK::NoApplicableRule, "unknown rule");
}

}  // namespace

std::vector<NodeId> findSites(const SourceUnit& unit, RuleId rule) {
    const Ast& ast = unit.ast;
    auto parents = parentMap(ast);
    std::vector<NodeId> sites;

    std::vector<NodeId> donors;
    if (rule == RuleId::DeadCode) donors = donorCandidates(ast);

    for (NodeId id : preorder(ast)) {
        const AstNode& n = ast.at(id);
        switch (rule) {
            case RuleId::LoopExchange:
                if (n.kind == NodeKind::For || n.kind == NodeKind::While) sites.push_back(id);
                break;
            case RuleId::DeadCode: {
                if (!isStatementKind(n.kind)) break;
                NodeId p = parents[id];
                if (p == kNoNode || ast.at(p).kind != NodeKind::Block) break;
                if (p == ast.root) break;  // unit level holds functions, not statements
                std::set<std::string> inScope;
                for (const auto& [name, type] : visibleBefore(ast, id, parents)) {
                    (void)type;
                    inScope.insert(name);
                }
                for (NodeId d : donors) {
                    if (donorFitsSite(ast, d, inScope)) {
                        sites.push_back(id);
                        break;
                    }
                }
                break;
            }
            case RuleId::BlockSwap:
                if (n.kind == NodeKind::If && n.children.size() == 3) sites.push_back(id);
                break;
            case RuleId::OperandSwap:
                if (operandSwapEligible(ast, id)) sites.push_back(id);
                break;
            case RuleId::ConfusionInsert:
                if (matchPatternB(ast, id) || matchPatternA(ast, id, parents))
                    sites.push_back(id);
                break;
            case RuleId::VarRename:
                if (n.kind == NodeKind::Function && functionHasVariables(ast, id))
                    sites.push_back(id);
                break;
        }
    }
    return sites;
}

std::pair<RuleId, NodeId> selectRule(const SourceUnit& unit, const RuleConfig& config,
                                     uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<RuleId, std::vector<NodeId>>> applicable;
    for (RuleId r : kAllRules) {
        if (!config.rulesEnabled.count(r)) continue;
        auto sites = findSites(unit, r);
        if (!sites.empty()) applicable.emplace_back(r, std::move(sites));
    }
    if (applicable.empty()) bail(TK::NoApplicableRule, "no enabled rule has a site");
    const auto& [rule, sites] = applicable[rng.bounded(applicable.size())];
    return {rule, sites[rng.bounded(sites.size())]};
}

TransformOutcome loopExchange(const SourceUnit& unit, NodeId site) {
    return doLoopExchange(unit, site, InjectedFault::None);
}

TransformOutcome injectDeadCode(const SourceUnit& unit, NodeId site, uint64_t seed) {
    Rng rng(seed);
    RuleConfig config;
    TransformOutcome out = doInjectDeadCode(unit, site, rng, config, InjectedFault::None);
    out.seed = seed;
    return out;
}

TransformOutcome blockSwap(const SourceUnit& unit, NodeId site) {
    return doBlockSwap(unit, site, InjectedFault::None);
}

TransformOutcome operandSwap(const SourceUnit& unit, NodeId site) {
    return doOperandSwap(unit, site, InjectedFault::None);
}

TransformOutcome confusionInsert(const SourceUnit& unit, NodeId site) {
    return doConfusionInsert(unit, site, InjectedFault::None);
}

TransformOutcome varRename(const SourceUnit& unit, NodeId site, const RuleConfig& config,
                           uint64_t seed) {
    Rng rng(seed);
    TransformOutcome out = doVarRename(unit, site, config, rng, InjectedFault::None);
    out.seed = seed;
    return out;
}

TransformOutcome apply(const SourceUnit& unit, const RuleConfig& config, uint64_t seed) {
    Rng rng(seed);
    std::vector<RuleId> pool;
    for (RuleId r : kAllRules)
        if (config.rulesEnabled.count(r) && !findSites(unit, r).empty()) pool.push_back(r);

    std::string fallbackLog;
    while (!pool.empty()) {
        size_t idx = static_cast<size_t>(rng.bounded(pool.size()));
        RuleId rule = pool[idx];
        auto sites = findSites(unit, rule);
        NodeId site = sites[rng.bounded(sites.size())];
        try {
            TransformOutcome out = dispatch(unit, rule, site, config, rng, InjectedFault::None);
            out.seed = seed;
            if (!fallbackLog.empty()) out.auxiliary["fallback_from"] = fallbackLog;
            return out;
        } catch (const TransformError&) {
            if (!fallbackLog.empty()) fallbackLog += ";";
            fallbackLog += ruleName(rule);
            pool.erase(pool.begin() + static_cast<long>(idx));
        }
    }
    bail(TK::NoApplicableRule, "no rule could be applied to this unit");
}

TransformOutcome applyRule(const SourceUnit& unit, RuleId rule, const RuleConfig& config,
                           uint64_t seed, InjectedFault fault) {
    auto sites = findSites(unit, rule);
    if (sites.empty())
        bail(TK::NoApplicableRule, std::string(ruleName(rule)) + " has no applicable site");
    Rng rng(seed);
    NodeId site = sites[rng.bounded(sites.size())];
    TransformOutcome out = dispatch(unit, rule, site, config, rng, fault);
    out.seed = seed;
    return out;
}

TransformOutcome applyRuleAt(const SourceUnit& unit, RuleId rule, NodeId site,
                             const RuleConfig& config, uint64_t seed, InjectedFault fault) {
    Rng rng(seed);
    TransformOutcome out = dispatch(unit, rule, site, config, rng, fault);
    out.seed = seed;
    return out;
}

}  // namespace denat::transform
