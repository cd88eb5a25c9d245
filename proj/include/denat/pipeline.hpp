#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "denat/metrics.hpp"
#include "denat/syntax.hpp"
#include "denat/transforms.hpp"

namespace denat::pipeline {

struct PairRecord {
    std::string id;  // stable content hash of original text + seed
    std::string language = "minilang";
    std::string original;
    std::string transformed;
    std::string rule;  // kebab-case rule name
    Span siteSpan;
    std::string seed;  // decimal string
    std::map<std::string, std::string> auxiliary;
};

struct RejectRecord {
    PairRecord record;
    std::string witness;
};

struct IngestSkip {
    std::string path;
    std::string reason;
    Span span;
};

struct IngestReport {
    uint64_t filesSeen = 0;
    uint64_t unitsOk = 0;
    std::vector<IngestSkip> skipped;
};

struct IngestedUnit {
    std::string path;
    SourceUnit unit;
};

/// Reads every ".mini" file under the given files/directories; files that fail
/// lex/parse/def-use are skipped and counted. Deterministic path ordering.
std::vector<IngestedUnit> ingest(const std::vector<std::string>& paths, IngestReport& report);

struct GenerateConfig {
    transform::RuleConfig rules;
    uint64_t masterSeed = 0;
    uint32_t trials = 16;
    bool dedup = false;
    bool perRule = false;
    int jobs = 1;
};

struct GenerateResult {
    std::vector<PairRecord> records;
    std::vector<RejectRecord> rejects;
    uint64_t ingested = 0;
    uint64_t emitted = 0;
    uint64_t skippedNoRule = 0;
    uint64_t quarantined = 0;
    uint64_t dedupDropped = 0;
};

/// One record per unit (or per applicable rule with perRule); every emitted
/// record passed differential execution, the rest land in the reject stream.
GenerateResult generatePairs(const std::vector<IngestedUnit>& units, const GenerateConfig& config);

struct SplitManifest {
    std::vector<std::string> trainIds;
    std::vector<std::string> validIds;
    double validFraction = 0.001;
    uint64_t splitSeed = 0;
};

/// Seeded held-out split, stratified by rule so the validation sample keeps
/// the corpus transform distribution. |valid| = round(fraction*N), floor 1.
SplitManifest split(const std::vector<PairRecord>& records, double validFraction,
                    uint64_t splitSeed);

struct Hypothesis {
    std::string id;
    std::string text;
};

struct AlignmentError : std::runtime_error {
    explicit AlignmentError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

struct EvalResult {
    std::map<std::string, metrics::Report> buckets;
    metrics::CopyStats copy;       // hypotheses vs. model inputs (transformed)
    double emRate = 0.0;           // vs. originals
    uint64_t unparseableHyps = 0;
    std::string csv;
};

/// Scores hypotheses (line-aligned with records by id) against the originals;
/// the copy analysis runs against the transformed inputs.
EvalResult evaluate(const std::vector<PairRecord>& records,
                    const std::vector<Hypothesis>& hyps, const metrics::CodeBleuWeights& weights,
                    int jobs = 1);

struct CheckResult {
    uint64_t checked = 0;
    uint64_t divergent = 0;
    uint64_t inconclusive = 0;
    std::vector<std::pair<std::string, std::string>> witnesses;  // id, detail
};

/// Re-runs the equivalence gate over an existing dataset.
CheckResult checkDataset(const std::vector<PairRecord>& records, uint32_t trials, int jobs = 1);

// --- serialization (JSONL / JSON, UTF-8, stable key order) ---

std::string recordToJson(const PairRecord& r);
std::string rejectToJson(const RejectRecord& r);
PairRecord recordFromJson(const std::string& line);

void writeRecords(const std::filesystem::path& path, const std::vector<PairRecord>& records);
void writeRejects(const std::filesystem::path& path, const std::vector<RejectRecord>& rejects);
std::vector<PairRecord> readRecords(const std::filesystem::path& path);

std::string manifestToJson(const SplitManifest& m);
void writeManifest(const std::filesystem::path& path, const SplitManifest& m);
SplitManifest readManifest(const std::filesystem::path& path);

std::vector<Hypothesis> readHypotheses(const std::filesystem::path& path);
void writeHypotheses(const std::filesystem::path& path, const std::vector<Hypothesis>& hyps);

/// Entry function of the transform site: the equivalence gate runs there.
std::string entryFunctionFor(const SourceUnit& unit, Span siteSpan);

uint64_t unitSeed(uint64_t masterSeed, const std::string& unitText);

}  // namespace denat::pipeline
