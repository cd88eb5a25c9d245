#include "denat/interp.hpp"

#include <map>

#include "denat/rng.hpp"

namespace denat::interp {

std::string Value::show() const {
    if (isInt()) return std::to_string(asInt());
    if (isBool()) return asBool() ? "true" : "false";
    if (isStr()) return asStr();
    std::string out = "[";
    const auto& a = asArray();
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(a[i]);
    }
    return out + "]";
}

namespace {

int64_t wrapAdd(int64_t a, int64_t b) {
    return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}
int64_t wrapSub(int64_t a, int64_t b) {
    return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b));
}
int64_t wrapMul(int64_t a, int64_t b) {
    return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b));
}

struct Abort {
    RunStatus status;
    ErrorKind error;
    Span span;
};

class Machine {
public:
    Machine(const SourceUnit& unit, uint64_t oracleSeed, uint64_t fuel)
        : unit_(unit), ast_(unit.ast), oracleSeed_(oracleSeed), fuel_(fuel) {
        for (NodeId f : ast_.functions()) functions_[ast_.at(f).token->lexeme] = f;
    }

    ExecResult callEntry(std::string_view entry, const std::vector<Value>& args) {
        ExecResult res;
        auto it = functions_.find(std::string(entry));
        if (it == functions_.end()) {
            res.status = RunStatus::RuntimeError;
            res.error = ErrorKind::MissingEntry;
            return res;
        }
        try {
            std::optional<Value> v = callFunction(it->second, args, ast_.at(it->second).span);
            trace_.push_back(TraceEvent{TraceEvent::Kind::Return, "", {}, v});
            res.result = v;
            res.status = RunStatus::Ok;
        } catch (const Abort& a) {
            res.status = a.status;
            res.error = a.error;
            res.errorSpan = a.span;
        }
        res.trace = std::move(trace_);
        return res;
    }

private:
    const SourceUnit& unit_;
    const Ast& ast_;
    uint64_t oracleSeed_;
    uint64_t fuel_;
    std::vector<TraceEvent> trace_;
    std::map<std::string, NodeId> functions_;
    std::map<std::string, uint32_t> externCalls_;  // per-callee call index

    using Env = std::vector<std::map<std::string, Value>>;

    enum class FlowKind { Normal, Break, Continue, Return };
    struct Flow {
        FlowKind kind = FlowKind::Normal;
        std::optional<Value> value;
    };

    [[noreturn]] void fail(ErrorKind e, Span span) {
        throw Abort{RunStatus::RuntimeError, e, span};
    }

    void burn(Span span) {
        if (fuel_ == 0) throw Abort{RunStatus::FuelExhausted, ErrorKind::None, span};
        --fuel_;
    }

    Value* lookup(Env& env, const std::string& name) {
        for (auto it = env.rbegin(); it != env.rend(); ++it) {
            auto hit = it->find(name);
            if (hit != it->end()) return &hit->second;
        }
        return nullptr;
    }

    bool truthy(const Value& v, Span span) {
        if (v.isBool()) return v.asBool();
        if (v.isInt()) return v.asInt() != 0;  // C-style conditions
        fail(ErrorKind::TypeMismatch, span);
    }

    Value defaultValue(TypeKind t) {
        switch (t) {
            case TypeKind::Bool: return Value::ofBool(false);
            case TypeKind::Str: return Value::ofStr("");
            case TypeKind::IntArray: return Value::ofArray({});
            default: return Value::ofInt(0);
        }
    }

    std::optional<Value> callFunction(NodeId fn, const std::vector<Value>& args, Span callSite) {
        const AstNode& f = ast_.at(fn);
        const AstNode& params = ast_.at(f.children[0]);
        if (params.children.size() != args.size()) fail(ErrorKind::ArityMismatch, callSite);
        Env env;
        env.emplace_back();
        for (size_t i = 0; i < args.size(); ++i)
            env.back()[ast_.at(params.children[i]).token->lexeme] = args[i];
        Flow flow = execStmt(f.children[1], env);
        if (flow.kind == FlowKind::Return) return flow.value;
        return std::nullopt;  // fell off the end
    }

    Flow execBlock(const AstNode& blk, Env& env) {
        env.emplace_back();
        Flow flow;
        for (NodeId s : blk.children) {
            flow = execStmt(s, env);
            if (flow.kind != FlowKind::Normal) break;
        }
        env.pop_back();
        return flow;
    }

    Flow execStmt(NodeId id, Env& env) {
        const AstNode& n = ast_.at(id);
        burn(n.span);
        switch (n.kind) {
            case NodeKind::Block:
                return execBlock(n, env);
            case NodeKind::DeclStmt: {
                Value v = n.children.size() > 1 ? evalExpr(n.children[1], env)
                                                : defaultValue(n.type);
                env.back()[ast_.at(n.children[0]).token->lexeme] = std::move(v);
                return {};
            }
            case NodeKind::ExprStmt:
                evalExpr(n.children[0], env);
                return {};
            case NodeKind::If: {
                bool c = truthy(evalExpr(n.children[0], env), ast_.at(n.children[0]).span);
                env.emplace_back();
                Flow flow;
                if (c) {
                    flow = execStmt(n.children[1], env);
                } else if (n.children.size() > 2) {
                    flow = execStmt(n.children[2], env);
                }
                env.pop_back();
                return flow;
            }
            case NodeKind::While: {
                for (;;) {
                    burn(n.span);
                    bool c = truthy(evalExpr(n.children[0], env), ast_.at(n.children[0]).span);
                    if (!c) break;
                    env.emplace_back();
                    Flow flow = execStmt(n.children[1], env);
                    env.pop_back();
                    if (flow.kind == FlowKind::Break) break;
                    if (flow.kind == FlowKind::Return) return flow;
                }
                return {};
            }
            case NodeKind::For: {
                env.emplace_back();  // induction variable scope
                size_t c = 0;
                if (n.hasInit) {
                    Flow f = execStmt(n.children[c++], env);
                    if (f.kind != FlowKind::Normal) {
                        env.pop_back();
                        return f;
                    }
                }
                NodeId cond = n.hasCond ? n.children[c++] : kNoNode;
                NodeId upd = n.hasUpdate ? n.children[c++] : kNoNode;
                NodeId body = n.children[c];
                Flow out;
                for (;;) {
                    burn(n.span);
                    if (cond != kNoNode &&
                        !truthy(evalExpr(cond, env), ast_.at(cond).span))
                        break;
                    env.emplace_back();
                    Flow flow = execStmt(body, env);
                    env.pop_back();
                    if (flow.kind == FlowKind::Break) break;
                    if (flow.kind == FlowKind::Return) {
                        out = flow;
                        break;
                    }
                    if (upd != kNoNode) evalExpr(upd, env);
                }
                env.pop_back();
                return out;
            }
            case NodeKind::Return: {
                Flow f;
                f.kind = FlowKind::Return;
                if (!n.children.empty()) f.value = evalExpr(n.children[0], env);
                return f;
            }
            case NodeKind::Break:
                return Flow{FlowKind::Break, std::nullopt};
            case NodeKind::Continue:
                return Flow{FlowKind::Continue, std::nullopt};
            default:
                return {};
        }
    }

    Value readLvalue(NodeId id, Env& env) {
        const AstNode& n = ast_.at(id);
        if (n.kind == NodeKind::Identifier) {
            Value* v = lookup(env, n.token->lexeme);
            if (!v) fail(ErrorKind::UnknownVariable, n.span);
            return *v;
        }
        // Index
        return evalExpr(id, env);
    }

    void writeLvalue(NodeId id, Value v, Env& env) {
        const AstNode& n = ast_.at(id);
        if (n.kind == NodeKind::Identifier) {
            Value* slot = lookup(env, n.token->lexeme);
            if (!slot) fail(ErrorKind::UnknownVariable, n.span);
            *slot = std::move(v);
            return;
        }
        if (n.kind == NodeKind::Index) {
            const AstNode& base = ast_.at(n.children[0]);
            if (base.kind != NodeKind::Identifier) fail(ErrorKind::TypeMismatch, n.span);
            Value idx = evalExpr(n.children[1], env);
            if (!idx.isInt()) fail(ErrorKind::TypeMismatch, n.span);
            if (!v.isInt()) fail(ErrorKind::TypeMismatch, n.span);
            Value* slot = lookup(env, base.token->lexeme);
            if (!slot) fail(ErrorKind::UnknownVariable, base.span);
            if (!slot->isArray()) fail(ErrorKind::TypeMismatch, n.span);
            auto& arr = std::get<std::vector<int64_t>>(slot->v);
            int64_t i = idx.asInt();
            if (i < 0 || static_cast<size_t>(i) >= arr.size())
                fail(ErrorKind::IndexOutOfBounds, n.span);
            arr[static_cast<size_t>(i)] = v.asInt();
            return;
        }
        fail(ErrorKind::TypeMismatch, n.span);
    }

    Value arith(const std::string& op, const Value& a, const Value& b, Span span) {
        if (op == "==" || op == "!=") {
            if (a.v.index() != b.v.index()) fail(ErrorKind::TypeMismatch, span);
            return Value::ofBool(op == "==" ? a == b : !(a == b));
        }
        if (op == "<" || op == "<=" || op == ">" || op == ">=") {
            if (!a.isInt() || !b.isInt()) fail(ErrorKind::TypeMismatch, span);
            int64_t x = a.asInt(), y = b.asInt();
            bool r = op == "<" ? x < y : op == "<=" ? x <= y : op == ">" ? x > y : x >= y;
            return Value::ofBool(r);
        }
        if (!a.isInt() || !b.isInt()) fail(ErrorKind::TypeMismatch, span);
        int64_t x = a.asInt(), y = b.asInt();
        if (op == "+") return Value::ofInt(wrapAdd(x, y));
        if (op == "-") return Value::ofInt(wrapSub(x, y));
        if (op == "*") return Value::ofInt(wrapMul(x, y));
        if (y == 0) fail(ErrorKind::DivisionByZero, span);
        if (x == INT64_MIN && y == -1) return Value::ofInt(op == "/" ? x : 0);
        return Value::ofInt(op == "/" ? x / y : x % y);
    }

    Value evalExpr(NodeId id, Env& env) {
        const AstNode& n = ast_.at(id);
        burn(n.span);
        switch (n.kind) {
            case NodeKind::IntLit:
                return Value::ofInt(std::stoll(n.token->lexeme));
            case NodeKind::BoolLit:
                return Value::ofBool(n.token->lexeme == "true");
            case NodeKind::StrLit: {
                const std::string& raw = n.token->lexeme;  // includes the quotes
                std::string s;
                for (size_t i = 1; i + 1 < raw.size(); ++i) {
                    if (raw[i] == '\\' && i + 2 < raw.size()) {
                        char e = raw[++i];
                        s += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    } else {
                        s += raw[i];
                    }
                }
                return Value::ofStr(std::move(s));
            }
            case NodeKind::Identifier: {
                Value* v = lookup(env, n.token->lexeme);
                if (!v) fail(ErrorKind::UnknownVariable, n.span);
                return *v;
            }
            case NodeKind::Assign: {
                Value rhs = evalExpr(n.children[1], env);
                if (n.op == "=") {
                    writeLvalue(n.children[0], rhs, env);
                    return rhs;
                }
                Value cur = readLvalue(n.children[0], env);
                Value next = arith(n.op.substr(0, 1), cur, rhs, n.span);
                writeLvalue(n.children[0], next, env);
                return next;
            }
            case NodeKind::Unary: {
                if (n.op == "++" || n.op == "--") {
                    Value cur = readLvalue(n.children[0], env);
                    if (!cur.isInt()) fail(ErrorKind::TypeMismatch, n.span);
                    Value next = Value::ofInt(n.op == "++" ? wrapAdd(cur.asInt(), 1)
                                                           : wrapSub(cur.asInt(), 1));
                    writeLvalue(n.children[0], next, env);
                    return n.postfix ? cur : next;
                }
                Value v = evalExpr(n.children[0], env);
                if (n.op == "!") return Value::ofBool(!truthy(v, n.span));
                if (!v.isInt()) fail(ErrorKind::TypeMismatch, n.span);
                return Value::ofInt(wrapSub(0, v.asInt()));
            }
            case NodeKind::Binary: {
                if (n.op == "&&" || n.op == "||") {
                    bool lhs = truthy(evalExpr(n.children[0], env), n.span);
                    if (n.op == "&&" && !lhs) return Value::ofBool(false);
                    if (n.op == "||" && lhs) return Value::ofBool(true);
                    return Value::ofBool(truthy(evalExpr(n.children[1], env), n.span));
                }
                Value a = evalExpr(n.children[0], env);
                Value b = evalExpr(n.children[1], env);
                return arith(n.op, a, b, n.span);
            }
            case NodeKind::Ternary: {
                bool c = truthy(evalExpr(n.children[0], env), ast_.at(n.children[0]).span);
                return evalExpr(n.children[c ? 1 : 2], env);
            }
            case NodeKind::Index: {
                Value base = evalExpr(n.children[0], env);
                Value idx = evalExpr(n.children[1], env);
                if (!base.isArray() || !idx.isInt()) fail(ErrorKind::TypeMismatch, n.span);
                const auto& arr = base.asArray();
                int64_t i = idx.asInt();
                if (i < 0 || static_cast<size_t>(i) >= arr.size())
                    fail(ErrorKind::IndexOutOfBounds, n.span);
                return Value::ofInt(arr[static_cast<size_t>(i)]);
            }
            case NodeKind::Call: {
                const std::string& callee = ast_.at(n.children[0]).token->lexeme;
                std::vector<Value> args;
                for (size_t i = 1; i < n.children.size(); ++i)
                    args.push_back(evalExpr(n.children[i], env));
                auto fn = functions_.find(callee);
                if (fn != functions_.end()) {
                    std::optional<Value> r = callFunction(fn->second, args, n.span);
                    return r ? *r : Value::ofInt(0);
                }
                if (callee == "len") {
                    if (args.size() != 1 || !args[0].isArray())
                        fail(ErrorKind::TypeMismatch, n.span);
                    return Value::ofInt(static_cast<int64_t>(args[0].asArray().size()));
                }
                // unknown callee: deterministic extern stub keyed by (name, call index)
                uint32_t ordinal = externCalls_[callee]++;
                Rng r(mixSeed(oracleSeed_, fnv1a64(callee, 0xcbf29ce484222325ull ^ ordinal)));
                Value result = Value::ofInt(r.intIn(-8, 8));
                trace_.push_back(TraceEvent{TraceEvent::Kind::ExternCall, callee, args, result});
                return result;
            }
            default:
                fail(ErrorKind::TypeMismatch, n.span);
        }
    }
};

}  // namespace

ExecResult run(const SourceUnit& unit, std::string_view entry, const std::vector<Value>& args,
               uint64_t oracleSeed, uint64_t fuel) {
    Machine m(unit, oracleSeed, fuel);
    return m.callEntry(entry, args);
}

namespace {

NodeId findFunction(const Ast& ast, std::string_view name) {
    for (NodeId f : ast.functions())
        if (ast.at(f).token->lexeme == name) return f;
    return kNoNode;
}

}  // namespace

std::vector<Value> trialArguments(const Ast& ast, NodeId function, uint64_t seed, uint32_t trial) {
    Rng r(mixSeed(seed, 0x7261647360ull + trial));
    std::vector<Value> args;
    for (NodeId p : ast.at(ast.at(function).children[0]).children) {
        switch (ast.at(p).type) {
            case TypeKind::Int:
                args.push_back(Value::ofInt(r.intIn(-64, 64)));
                break;
            case TypeKind::Bool:
                args.push_back(Value::ofBool(r.bounded(2) == 1));
                break;
            case TypeKind::Str: {
                static constexpr char kAlpha[] = "abcxyz";
                std::string s;
                uint64_t len = r.bounded(5);
                for (uint64_t i = 0; i < len; ++i) s += kAlpha[r.bounded(6)];
                args.push_back(Value::ofStr(std::move(s)));
                break;
            }
            case TypeKind::IntArray: {
                std::vector<int64_t> a(r.bounded(9));
                for (auto& x : a) x = r.intIn(-64, 64);
                args.push_back(Value::ofArray(std::move(a)));
                break;
            }
            default:
                args.push_back(Value::ofInt(0));
                break;
        }
    }
    return args;
}

EquivalenceReport equivalent(const SourceUnit& a, const SourceUnit& b, std::string_view entry,
                             uint32_t trials, uint64_t seed, uint64_t fuel) {
    NodeId fa = findFunction(a.ast, entry);
    NodeId fb = findFunction(b.ast, entry);
    if (fa == kNoNode || fb == kNoNode)
        throw SignatureMismatch("entry '" + std::string(entry) + "' missing from a unit");
    const AstNode& pa = a.ast.at(a.ast.at(fa).children[0]);
    const AstNode& pb = b.ast.at(b.ast.at(fb).children[0]);
    if (pa.children.size() != pb.children.size())
        throw SignatureMismatch("entry arity differs");
    for (size_t i = 0; i < pa.children.size(); ++i)
        if (a.ast.at(pa.children[i]).type != b.ast.at(pb.children[i]).type)
            throw SignatureMismatch("entry parameter types differ");

    EquivalenceReport rep;
    bool sawInconclusive = false;
    for (uint32_t t = 0; t < trials; ++t) {
        std::vector<Value> args = trialArguments(a.ast, fa, seed, t);
        uint64_t oracleSeed = mixSeed(seed, 0x6f7261636cull + t);
        ExecResult ra = run(a, entry, args, oracleSeed, fuel);
        ExecResult rb = run(b, entry, args, oracleSeed, fuel);
        rep.trialsRun = t + 1;
        if (!ra.identicalTo(rb)) {
            rep.verdict = Verdict::Divergent;
            rep.witnessTrial = t;
            rep.witnessArgs = args;
            std::string d = "trial " + std::to_string(t) + ": args (";
            for (size_t i = 0; i < args.size(); ++i)
                d += (i ? ", " : "") + args[i].show();
            d += ")";
            rep.detail = std::move(d);
            return rep;
        }
        if (ra.status == RunStatus::FuelExhausted && rb.status == RunStatus::FuelExhausted)
            sawInconclusive = true;  // equal traces up to exhaustion
    }
    rep.verdict = sawInconclusive ? Verdict::Inconclusive : Verdict::Equivalent;
    return rep;
}

}  // namespace denat::interp
