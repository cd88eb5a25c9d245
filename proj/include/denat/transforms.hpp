#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "denat/syntax.hpp"

namespace denat::transform {

enum class RuleId {
    LoopExchange,
    DeadCode,
    BlockSwap,
    OperandSwap,
    ConfusionInsert,
    VarRename,
};

constexpr std::array<RuleId, 6> kAllRules = {
    RuleId::LoopExchange, RuleId::DeadCode,        RuleId::BlockSwap,
    RuleId::OperandSwap,  RuleId::ConfusionInsert, RuleId::VarRename,
};

std::string_view ruleName(RuleId id);  // kebab-case, e.g. "block-swap"
std::optional<RuleId> ruleFromName(std::string_view name);

struct RuleConfig {
    double renameFraction = 0.5;                        // in (0, 1]
    std::vector<std::string> deadGuardForms = {"if", "while"};
    std::set<RuleId> rulesEnabled{kAllRules.begin(), kAllRules.end()};
    bool lowercaseRenames = false;  // var_k instead of VAR_k
    bool allowCompoundDonors = false;
};

struct TransformError : std::runtime_error {
    enum class Kind {
        NoApplicableRule,
        NotALoopSite,
        NoDonorStatement,
        NoElseBranch,
        IneligibleOperator,
        PatternMismatch,
        NothingToRename,
        VacuousTransform,
        BadSite,
    };
    TransformError(Kind kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind(kind) {}
    Kind kind;
};

/// Bug switches for the differential-testing harness; production paths always
/// pass None.
enum class InjectedFault {
    None,
    DropNegation,            // block swap keeps the original condition
    SkipContinueUpdate,      // for->while forgets the update before break/continue
    SatisfiableGuard,        // dead-code guard that can hold
    NoOperatorFlip,          // operand swap keeps the asymmetric operator
    MissRenameOccurrence,    // one occurrence keeps its old name
    SwapTernaryArms,         // confusion ternary with exchanged arms
};

struct TransformOutcome {
    RuleId rule;
    NodeId site = kNoNode;  // node in original.ast
    SourceUnit original;
    SourceUnit transformed;
    uint64_t seed = 0;
    std::map<std::string, std::string> auxiliary;

    Span siteSpan() const { return original.ast.at(site).span; }
};

/// Nodes where `rule` is applicable, in source order.
std::vector<NodeId> findSites(const SourceUnit& unit, RuleId rule);

/// Seeded uniform pick over applicable rules, then over that rule's sites.
std::pair<RuleId, NodeId> selectRule(const SourceUnit& unit, const RuleConfig& config,
                                     uint64_t seed);

TransformOutcome loopExchange(const SourceUnit& unit, NodeId site);
TransformOutcome injectDeadCode(const SourceUnit& unit, NodeId site, uint64_t seed);
TransformOutcome blockSwap(const SourceUnit& unit, NodeId site);
TransformOutcome operandSwap(const SourceUnit& unit, NodeId site);
TransformOutcome confusionInsert(const SourceUnit& unit, NodeId site);
TransformOutcome varRename(const SourceUnit& unit, NodeId site, const RuleConfig& config,
                           uint64_t seed);

/// One rule per output: selection plus application, retrying the remaining
/// applicable rules under the same seed stream when a rule-level error hits.
TransformOutcome apply(const SourceUnit& unit, const RuleConfig& config, uint64_t seed);

/// Forced-rule variant used by the CLI's --rule flag.
TransformOutcome applyRule(const SourceUnit& unit, RuleId rule, const RuleConfig& config,
                           uint64_t seed, InjectedFault fault = InjectedFault::None);

/// Site-directed variant used by the differential fault harness.
TransformOutcome applyRuleAt(const SourceUnit& unit, RuleId rule, NodeId site,
                             const RuleConfig& config, uint64_t seed,
                             InjectedFault fault = InjectedFault::None);

}  // namespace denat::transform
