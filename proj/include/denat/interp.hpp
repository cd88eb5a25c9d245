#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "denat/syntax.hpp"

namespace denat::interp {

/// Runtime value. Int arithmetic wraps; arrays have value semantics.
struct Value {
    std::variant<int64_t, bool, std::string, std::vector<int64_t>> v;

    static Value ofInt(int64_t i) { return Value{i}; }
    static Value ofBool(bool b) { return Value{b}; }
    static Value ofStr(std::string s) { return Value{std::move(s)}; }
    static Value ofArray(std::vector<int64_t> a) { return Value{std::move(a)}; }

    bool isInt() const { return std::holds_alternative<int64_t>(v); }
    bool isBool() const { return std::holds_alternative<bool>(v); }
    bool isStr() const { return std::holds_alternative<std::string>(v); }
    bool isArray() const { return std::holds_alternative<std::vector<int64_t>>(v); }

    int64_t asInt() const { return std::get<int64_t>(v); }
    bool asBool() const { return std::get<bool>(v); }
    const std::string& asStr() const { return std::get<std::string>(v); }
    const std::vector<int64_t>& asArray() const { return std::get<std::vector<int64_t>>(v); }

    bool operator==(const Value&) const = default;

    std::string show() const;
};

struct TraceEvent {
    enum class Kind { ExternCall, Return };
    Kind kind;
    std::string callee;               // ExternCall only
    std::vector<Value> args;          // ExternCall only
    std::optional<Value> result;      // oracle-supplied / returned value

    bool operator==(const TraceEvent&) const = default;
};

enum class RunStatus { Ok, FuelExhausted, RuntimeError };

enum class ErrorKind {
    None,
    DivisionByZero,
    IndexOutOfBounds,
    TypeMismatch,
    UnknownVariable,
    ArityMismatch,
    MissingEntry,
};

struct ExecResult {
    std::vector<TraceEvent> trace;
    std::optional<Value> result;
    RunStatus status = RunStatus::Ok;
    ErrorKind error = ErrorKind::None;
    Span errorSpan;  // informational; excluded from identity comparisons

    /// Trace + result + status + error kind; error spans differ between a
    /// program and its rewrites, so they do not participate.
    bool identicalTo(const ExecResult& o) const {
        return status == o.status && error == o.error && result == o.result && trace == o.trace;
    }
};

/// Big-step evaluation of `entry(args)`. Unknown callees become ExternCall
/// trace events whose results come deterministically from the oracle seed.
/// Never throws for program-level failures; they land in the status.
ExecResult run(const SourceUnit& unit, std::string_view entry, const std::vector<Value>& args,
               uint64_t oracleSeed, uint64_t fuel);

enum class Verdict { Equivalent, Divergent, Inconclusive };

struct EquivalenceReport {
    Verdict verdict = Verdict::Equivalent;
    uint32_t trialsRun = 0;
    // populated on divergence
    uint32_t witnessTrial = 0;
    std::vector<Value> witnessArgs;
    std::string detail;
};

struct SignatureMismatch : std::runtime_error {
    explicit SignatureMismatch(std::string msg) : std::runtime_error(std::move(msg)) {}
};

constexpr uint64_t kDefaultFuel = 1ull << 17;

/// Differential execution over seeded random argument vectors sized to the
/// entry signature (ints in [-64,64], array lengths 0..8, bools, short
/// strings); both sides share the extern oracle.
EquivalenceReport equivalent(const SourceUnit& a, const SourceUnit& b, std::string_view entry,
                             uint32_t trials, uint64_t seed, uint64_t fuel = kDefaultFuel);

/// The argument vector the equivalence harness would use for one trial.
std::vector<Value> trialArguments(const Ast& ast, NodeId function, uint64_t seed, uint32_t trial);

}  // namespace denat::interp
