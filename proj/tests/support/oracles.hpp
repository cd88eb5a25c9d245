#pragma once

#include <cstdint>
#include <vector>

#include "denat/syntax.hpp"

namespace denat::oracles {

/// Brute-force syntax match: enumerate every reference subtree and greedily
/// pair it with a structurally equal (anonymized) hypothesis subtree. No
/// serialization; counting by pairwise comparison.
double bruteForceSyntaxMatch(const Ast& hyp, const Ast& ref);

/// Full-matrix Levenshtein over token streams.
uint64_t levenshteinMatrix(const std::vector<Token>& a, const std::vector<Token>& b);

}  // namespace denat::oracles
