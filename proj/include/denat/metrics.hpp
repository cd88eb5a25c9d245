#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "denat/syntax.hpp"

namespace denat::metrics {

struct CodeBleuWeights {
    double alpha = 0.25;  // token BLEU
    double beta = 0.25;   // keyword-weighted BLEU
    double gamma = 0.25;  // syntax match
    double delta = 0.25;  // dataflow match
    double keywordWeight = 5.0;
};

/// Scores for one (hypothesis, reference) pair.
struct PairScore {
    int em = 0;
    double sm = 0.0;
    double dm = 0.0;
    double bleu = 0.0;
    double weightedBleu = 0.0;
    double codebleu = 0.0;
    uint64_t editDistance = 0;
    bool isCopy = false;       // hypothesis token-equal to the model input
    bool hypLexes = true;
    bool hypParses = true;     // RQ1-style flag: broken generations score SM 0
    bool hypResolves = true;   // dataflow failure flag, DM 0
    bool refNoEdges = false;   // DM defined as 1 for an edge-free reference
};

/// Aggregate over a bucket of pairs (plain means).
struct Report {
    uint64_t count = 0;
    double emRate = 0.0;
    double sm = 0.0;
    double dm = 0.0;
    double bleu = 0.0;
    double weightedBleu = 0.0;
    double codebleu = 0.0;
};

int exactMatch(const std::vector<Token>& hyp, const std::vector<Token>& ref);
int exactMatch(const SourceUnit& hyp, const SourceUnit& ref);

/// Fraction of the reference's subtrees present in the hypothesis, matching
/// on node kinds with identifier/literal leaves anonymized to their kind.
double syntaxMatch(const Ast& hyp, const Ast& ref);

/// Fraction of the reference's anonymized def-use edges present in the
/// hypothesis (per-chain first-occurrence numbering).
double dataflowMatch(const SourceUnit& hyp, const SourceUnit& ref);

/// Smoothed 4-gram token BLEU; `keywordWeight` scales keyword tokens in the
/// weighted variant (pass 1.0 for the plain one).
double tokenBleu(const std::vector<Token>& hyp, const std::vector<Token>& ref,
                 double keywordWeight);

uint64_t tokenEditDistance(const std::vector<Token>& a, const std::vector<Token>& b);

/// Full scoring of a raw hypothesis text against a parsed reference, with the
/// model's input for the copy check. Unlexable/unparseable hypotheses score 0
/// on the affected components instead of erroring.
PairScore scorePair(const std::string& hypText, const SourceUnit& ref,
                    const std::string& modelInputText, const CodeBleuWeights& weights);

struct CopyStats {
    double copyRate = 0.0;
    double medianEditDistance = 0.0;  // lower median for even counts
};

struct EmptyCorpus : std::runtime_error {
    EmptyCorpus() : std::runtime_error("empty corpus") {}
};

CopyStats copyAnalysis(const std::vector<std::pair<std::string, std::string>>& inputHypPairs);

/// Mean scores per bucket key (rule name), insertion-ordered by key.
std::map<std::string, Report> bucketReport(
    const std::vector<std::pair<std::string, PairScore>>& scored);

/// CSV per the report contract: rule,count,em_rate,sm,dm,bleu,wbleu,codebleu
std::string reportCsv(const std::map<std::string, Report>& buckets, bool includeTotal = true);

}  // namespace denat::metrics
