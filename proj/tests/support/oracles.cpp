#include "support/oracles.hpp"

#include <algorithm>

namespace denat::oracles {

namespace {

// Anonymized structural equality: node kinds and child shapes only, leaf
// lexemes and operators ignored (mirrors the SM serialization contract).
bool anonEqual(const Ast& a, NodeId na, const Ast& b, NodeId nb) {
    const AstNode& x = a.at(na);
    const AstNode& y = b.at(nb);
    if (x.kind != y.kind) return false;
    if (x.children.size() != y.children.size()) return false;
    for (size_t i = 0; i < x.children.size(); ++i)
        if (!anonEqual(a, x.children[i], b, y.children[i])) return false;
    return true;
}

std::vector<NodeId> allNodes(const Ast& ast) {
    std::vector<NodeId> out;
    std::vector<NodeId> stack{ast.root};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        out.push_back(id);
        for (NodeId c : ast.at(id).children) stack.push_back(c);
    }
    return out;
}

}  // namespace

double bruteForceSyntaxMatch(const Ast& hyp, const Ast& ref) {
    std::vector<NodeId> refNodes = allNodes(ref);
    std::vector<NodeId> hypNodes = allNodes(hyp);
    std::vector<bool> used(hypNodes.size(), false);
    uint64_t matched = 0;
    for (NodeId rn : refNodes) {
        for (size_t i = 0; i < hypNodes.size(); ++i) {
            if (used[i]) continue;
            if (anonEqual(hyp, hypNodes[i], ref, rn)) {
                used[i] = true;
                ++matched;
                break;
            }
        }
    }
    return refNodes.empty() ? 1.0
                            : static_cast<double>(matched) / static_cast<double>(refNodes.size());
}

uint64_t levenshteinMatrix(const std::vector<Token>& a, const std::vector<Token>& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<std::vector<uint64_t>> d(n + 1, std::vector<uint64_t>(m + 1, 0));
    for (size_t i = 0; i <= n; ++i) d[i][0] = i;
    for (size_t j = 0; j <= m; ++j) d[0][j] = j;
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            uint64_t cost = sameToken(a[i - 1], b[j - 1]) ? 0 : 1;
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
        }
    }
    return d[n][m];
}

}  // namespace denat::oracles
