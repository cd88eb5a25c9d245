#pragma once

#include <cstdint>
#include <string>

namespace denat::progen {

struct GenOptions {
    int minStmts = 4;
    int maxStmts = 9;
    bool withArrays = true;
    // guarantees for targeted tests
    bool forceForContinue = false;
    bool forceIfElseAssign = false;
    bool forceIncrPair = false;
    bool forceComparison = false;
};

/// Deterministic random MiniLang program: type-correct, def-use clean, and
/// terminating within the interpreter's default fuel on any harness input.
std::string generateProgram(uint64_t seed, const GenOptions& options = {});

/// Tiny single-function unit (a handful of AST nodes) for metric oracles.
std::string generateTinyUnit(uint64_t seed);

}  // namespace denat::progen
