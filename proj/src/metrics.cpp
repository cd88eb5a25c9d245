#include "denat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "denat/dataflow.hpp"

namespace denat::metrics {

int exactMatch(const std::vector<Token>& hyp, const std::vector<Token>& ref) {
    if (hyp.size() != ref.size()) return 0;
    for (size_t i = 0; i < hyp.size(); ++i)
        if (!sameToken(hyp[i], ref[i])) return 0;
    return 1;
}

int exactMatch(const SourceUnit& hyp, const SourceUnit& ref) {
    return exactMatch(hyp.tokens, ref.tokens);
}

namespace {

// Canonical subtree serialization: node kinds only, leaves anonymized.
void serializeInto(const Ast& ast, NodeId id, std::string& out) {
    const AstNode& n = ast.at(id);
    out += '(';
    out += nodeKindName(n.kind);
    for (NodeId c : n.children) serializeInto(ast, c, out);
    out += ')';
}

std::map<std::string, uint64_t> subtreeMultiset(const Ast& ast) {
    std::map<std::string, uint64_t> out;
    std::vector<NodeId> stack{ast.root};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        std::string s;
        serializeInto(ast, id, s);
        ++out[s];
        for (NodeId c : ast.at(id).children) stack.push_back(c);
    }
    return out;
}

}  // namespace

double syntaxMatch(const Ast& hyp, const Ast& ref) {
    auto refSet = subtreeMultiset(ref);
    auto hypSet = subtreeMultiset(hyp);
    uint64_t total = 0;
    uint64_t matched = 0;
    for (const auto& [ser, cnt] : refSet) {
        total += cnt;
        auto it = hypSet.find(ser);
        if (it != hypSet.end()) matched += std::min(cnt, it->second);
    }
    return total == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(total);
}

double dataflowMatch(const SourceUnit& hyp, const SourceUnit& ref) {
    auto refEdges = dataflow::anonymizedEdges(dataflow::buildDefUse(ref.ast));
    if (refEdges.empty()) return 1.0;
    std::vector<std::pair<uint32_t, int>> hypEdges;
    try {
        hypEdges = dataflow::anonymizedEdges(dataflow::buildDefUse(hyp.ast));
    } catch (const dataflow::DataflowError&) {
        return 0.0;
    }
    // sorted multiset intersection
    size_t i = 0, j = 0, matched = 0;
    while (i < refEdges.size() && j < hypEdges.size()) {
        if (refEdges[i] == hypEdges[j]) {
            ++matched;
            ++i;
            ++j;
        } else if (refEdges[i] < hypEdges[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(matched) / static_cast<double>(refEdges.size());
}

namespace {

double tokenWeight(const Token& t, double keywordWeight) {
    return t.kind == TokenKind::Keyword ? keywordWeight : 1.0;
}

struct NgramStats {
    double clipped = 0.0;
    double total = 0.0;
};

NgramStats ngramPrecision(const std::vector<Token>& hyp, const std::vector<Token>& ref, size_t n,
                          double keywordWeight) {
    auto key = [](const std::vector<Token>& toks, size_t start, size_t n) {
        std::string k;
        for (size_t i = 0; i < n; ++i) {
            k += std::to_string(static_cast<int>(toks[start + i].kind));
            k += ':';
            k += toks[start + i].lexeme;
            k += '\x1f';
        }
        return k;
    };
    std::map<std::string, uint64_t> refCounts;
    if (ref.size() >= n)
        for (size_t i = 0; i + n <= ref.size(); ++i) ++refCounts[key(ref, i, n)];

    std::map<std::string, std::pair<uint64_t, double>> hypCounts;  // count, weight
    if (hyp.size() >= n) {
        for (size_t i = 0; i + n <= hyp.size(); ++i) {
            double w = 0.0;
            for (size_t k = 0; k < n; ++k) w += tokenWeight(hyp[i + k], keywordWeight);
            auto& slot = hypCounts[key(hyp, i, n)];
            ++slot.first;
            slot.second = w;
        }
    }
    NgramStats s;
    for (const auto& [k, cw] : hypCounts) {
        auto it = refCounts.find(k);
        uint64_t clip = it == refCounts.end() ? 0 : std::min(cw.first, it->second);
        s.clipped += static_cast<double>(clip) * cw.second;
        s.total += static_cast<double>(cw.first) * cw.second;
    }
    return s;
}

}  // namespace

double tokenBleu(const std::vector<Token>& hyp, const std::vector<Token>& ref,
                 double keywordWeight) {
    if (hyp.empty() || ref.empty()) return 0.0;
    double logSum = 0.0;
    for (size_t n = 1; n <= 4; ++n) {
        NgramStats s = ngramPrecision(hyp, ref, n, keywordWeight);
        double p;
        if (n == 1) {
            if (s.clipped <= 0.0) return 0.0;
            p = s.clipped / s.total;
        } else {
            p = (s.clipped + 1.0) / (s.total + 1.0);  // add-one smoothing
        }
        logSum += 0.25 * std::log(p);
    }
    double bp = 1.0;
    if (hyp.size() < ref.size())
        bp = std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(hyp.size()));
    return bp * std::exp(logSum);
}

uint64_t tokenEditDistance(const std::vector<Token>& a, const std::vector<Token>& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<uint64_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = j;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= m; ++j) {
            uint64_t sub = prev[j - 1] + (sameToken(a[i - 1], b[j - 1]) ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

PairScore scorePair(const std::string& hypText, const SourceUnit& ref,
                    const std::string& modelInputText, const CodeBleuWeights& weights) {
    PairScore s;
    std::vector<Token> hypToks;
    try {
        hypToks = lex(hypText);
    } catch (const LexError&) {
        s.hypLexes = false;
        s.hypParses = false;
        s.hypResolves = false;
        s.editDistance = tokenEditDistance({}, ref.tokens);
        return s;
    }

    s.em = exactMatch(hypToks, ref.tokens);
    s.editDistance = tokenEditDistance(hypToks, ref.tokens);
    s.bleu = tokenBleu(hypToks, ref.tokens, 1.0);
    s.weightedBleu = tokenBleu(hypToks, ref.tokens, weights.keywordWeight);

    try {
        std::vector<Token> inputToks = lex(modelInputText);
        s.isCopy = exactMatch(hypToks, inputToks) == 1;
    } catch (const LexError&) {
        s.isCopy = false;
    }

    SourceUnit hypUnit;
    try {
        hypUnit = SourceUnit::fromText(hypText);
    } catch (const std::exception&) {
        s.hypParses = false;
        s.hypResolves = false;
        s.codebleu = weights.alpha * s.bleu + weights.beta * s.weightedBleu;
        return s;
    }
    s.sm = syntaxMatch(hypUnit.ast, ref.ast);

    auto refEdges = dataflow::anonymizedEdges(dataflow::buildDefUse(ref.ast));
    if (refEdges.empty()) s.refNoEdges = true;
    try {
        dataflow::buildDefUse(hypUnit.ast);
        s.dm = dataflowMatch(hypUnit, ref);
    } catch (const dataflow::DataflowError&) {
        s.hypResolves = false;
        s.dm = 0.0;
    }

    s.codebleu = weights.alpha * s.bleu + weights.beta * s.weightedBleu + weights.gamma * s.sm +
                 weights.delta * s.dm;
    return s;
}

CopyStats copyAnalysis(const std::vector<std::pair<std::string, std::string>>& inputHypPairs) {
    if (inputHypPairs.empty()) throw EmptyCorpus();
    uint64_t copies = 0;
    std::vector<uint64_t> distances;
    distances.reserve(inputHypPairs.size());
    for (const auto& [input, hyp] : inputHypPairs) {
        std::vector<Token> a, b;
        bool lexed = true;
        try {
            a = lex(input);
            b = lex(hyp);
        } catch (const LexError&) {
            lexed = false;
        }
        if (lexed) {
            if (exactMatch(b, a)) ++copies;
            distances.push_back(tokenEditDistance(a, b));
        } else {
            distances.push_back(static_cast<uint64_t>(std::max(input.size(), hyp.size())));
        }
    }
    std::sort(distances.begin(), distances.end());
    CopyStats out;
    out.copyRate = static_cast<double>(copies) / static_cast<double>(inputHypPairs.size());
    out.medianEditDistance = static_cast<double>(distances[(distances.size() - 1) / 2]);
    return out;
}

std::map<std::string, Report> bucketReport(
    const std::vector<std::pair<std::string, PairScore>>& scored) {
    std::map<std::string, Report> out;
    for (const auto& [bucket, s] : scored) {
        Report& r = out[bucket];
        ++r.count;
        r.emRate += s.em;
        r.sm += s.sm;
        r.dm += s.dm;
        r.bleu += s.bleu;
        r.weightedBleu += s.weightedBleu;
        r.codebleu += s.codebleu;
    }
    for (auto& [bucket, r] : out) {
        double n = static_cast<double>(r.count);
        r.emRate /= n;
        r.sm /= n;
        r.dm /= n;
        r.bleu /= n;
        r.weightedBleu /= n;
        r.codebleu /= n;
    }
    return out;
}

std::string reportCsv(const std::map<std::string, Report>& buckets, bool includeTotal) {
    std::string out = "rule,count,em_rate,sm,dm,bleu,wbleu,codebleu\n";
    char line[256];
    Report total;
    uint64_t n = 0;
    for (const auto& [rule, r] : buckets) {
        std::snprintf(line, sizeof line, "%s,%llu,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", rule.c_str(),
                      static_cast<unsigned long long>(r.count), r.emRate, r.sm, r.dm, r.bleu,
                      r.weightedBleu, r.codebleu);
        out += line;
        total.emRate += r.emRate * static_cast<double>(r.count);
        total.sm += r.sm * static_cast<double>(r.count);
        total.dm += r.dm * static_cast<double>(r.count);
        total.bleu += r.bleu * static_cast<double>(r.count);
        total.weightedBleu += r.weightedBleu * static_cast<double>(r.count);
        total.codebleu += r.codebleu * static_cast<double>(r.count);
        n += r.count;
    }
    if (includeTotal && n > 0) {
        double d = static_cast<double>(n);
        std::snprintf(line, sizeof line, "all,%llu,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n",
                      static_cast<unsigned long long>(n), total.emRate / d, total.sm / d,
                      total.dm / d, total.bleu / d, total.weightedBleu / d, total.codebleu / d);
        out += line;
    }
    return out;
}

}  // namespace denat::metrics
