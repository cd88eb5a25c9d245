#include "denat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "denat/dataflow.hpp"
#include "denat/interp.hpp"
#include "denat/parallel.hpp"
#include "denat/rng.hpp"

namespace denat::pipeline {

using nlohmann::json;

uint64_t unitSeed(uint64_t masterSeed, const std::string& unitText) {
    return mixSeed(masterSeed, fnv1a64(unitText));
}

std::vector<IngestedUnit> ingest(const std::vector<std::string>& paths, IngestReport& report) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const std::string& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            for (const auto& entry : fs::recursive_directory_iterator(p, ec))
                if (entry.is_regular_file() && entry.path().extension() == ".mini")
                    files.push_back(entry.path().string());
        } else if (fs::is_regular_file(p, ec)) {
            files.push_back(p);
        } else {
            report.skipped.push_back(IngestSkip{p, "io: not a file or directory", {}});
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<IngestedUnit> units;
    for (const std::string& f : files) {
        ++report.filesSeen;
        std::ifstream in(f, std::ios::binary);
        if (!in) {
            report.skipped.push_back(IngestSkip{f, "io: unreadable", {}});
            continue;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            SourceUnit unit =
                SourceUnit::fromText(ss.str(), std::filesystem::path(f).stem().string());
            dataflow::buildDefUse(unit.ast);  // unresolved units are not transformable
            units.push_back(IngestedUnit{f, std::move(unit)});
            ++report.unitsOk;
        } catch (const LexError& e) {
            report.skipped.push_back(
                IngestSkip{f, std::string("lex: ") + e.what(), Span{e.offset, e.offset}});
        } catch (const ParseError& e) {
            report.skipped.push_back(IngestSkip{f, std::string("parse: ") + e.what(), e.span});
        } catch (const dataflow::DataflowError& e) {
            report.skipped.push_back(IngestSkip{f, std::string("dataflow: ") + e.what(), e.span});
        }
    }
    return units;
}

std::string entryFunctionFor(const SourceUnit& unit, Span siteSpan) {
    for (NodeId f : unit.ast.functions()) {
        const AstNode& fn = unit.ast.at(f);
        if (fn.span.begin <= siteSpan.begin && siteSpan.end <= fn.span.end)
            return fn.token->lexeme;
    }
    return unit.ast.at(unit.ast.functions().front()).token->lexeme;
}

namespace {

std::string hashId(const std::string& originalText, uint64_t seed) {
    uint64_t h = fnv1a64(originalText);
    h = mixSeed(h, seed);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

PairRecord recordOf(const transform::TransformOutcome& out) {
    PairRecord r;
    r.original = printAst(out.original.ast);
    r.transformed = out.transformed.text;
    r.rule = std::string(transform::ruleName(out.rule));
    r.siteSpan = out.siteSpan();
    r.seed = std::to_string(out.seed);
    r.auxiliary = out.auxiliary;
    r.id = hashId(r.original, out.seed);
    return r;
}

struct UnitWork {
    std::optional<PairRecord> record;
    std::optional<RejectRecord> reject;
    bool noRule = false;
};

UnitWork processOne(const SourceUnit& unit, const transform::RuleConfig& rules, uint64_t seed,
                    std::optional<transform::RuleId> forced, uint32_t trials) {
    UnitWork w;
    transform::TransformOutcome outcome;
    try {
        outcome = forced ? transform::applyRule(unit, *forced, rules, seed)
                         : transform::apply(unit, rules, seed);
    } catch (const transform::TransformError&) {
        w.noRule = true;
        return w;
    } catch (const std::exception&) {
        w.noRule = true;
        return w;
    }

    PairRecord rec = recordOf(outcome);
    std::string entry = entryFunctionFor(outcome.original, outcome.siteSpan());
    try {
        interp::EquivalenceReport rep =
            interp::equivalent(outcome.original, outcome.transformed, entry, trials, seed);
        if (rep.verdict == interp::Verdict::Equivalent) {
            w.record = std::move(rec);
        } else if (rep.verdict == interp::Verdict::Divergent) {
            w.reject = RejectRecord{std::move(rec), "divergent: " + rep.detail};
        } else {
            w.reject = RejectRecord{std::move(rec), "inconclusive: fuel exhausted"};
        }
    } catch (const std::exception& e) {
        w.reject = RejectRecord{std::move(rec), std::string("gate error: ") + e.what()};
    }
    return w;
}

}  // namespace

GenerateResult generatePairs(const std::vector<IngestedUnit>& units,
                             const GenerateConfig& config) {
    GenerateResult result;

    std::vector<const IngestedUnit*> work;
    std::set<uint64_t> seenHashes;
    for (const IngestedUnit& u : units) {
        if (config.dedup && !seenHashes.insert(fnv1a64(u.unit.text)).second) {
            ++result.dedupDropped;
            continue;
        }
        work.push_back(&u);
    }
    result.ingested = work.size();

    // one slot per (unit, rule-or-auto); deterministic order before scheduling
    struct Task {
        const IngestedUnit* unit;
        std::optional<transform::RuleId> rule;
        uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const IngestedUnit* u : work) {
        uint64_t base = unitSeed(config.masterSeed, u->unit.text);
        if (config.perRule) {
            for (transform::RuleId r : transform::kAllRules) {
                if (!config.rules.rulesEnabled.count(r)) continue;
                if (transform::findSites(u->unit, r).empty()) continue;
                tasks.push_back(
                    Task{u, r, mixSeed(base, static_cast<uint64_t>(r) + 1)});
            }
            if (tasks.empty() || tasks.back().unit != u) ++result.skippedNoRule;
        } else {
            tasks.push_back(Task{u, std::nullopt, base});
        }
    }

    std::vector<UnitWork> slots(tasks.size());
    par::forIndex(tasks.size(), config.jobs, [&](size_t i) {
        const Task& t = tasks[i];
        slots[i] = processOne(t.unit->unit, config.rules, t.seed, t.rule, config.trials);
    });

    for (UnitWork& w : slots) {
        if (w.record) {
            result.records.push_back(std::move(*w.record));
            ++result.emitted;
        } else if (w.reject) {
            result.rejects.push_back(std::move(*w.reject));
            ++result.quarantined;
        } else if (w.noRule) {
            ++result.skippedNoRule;
        }
    }
    return result;
}

SplitManifest split(const std::vector<PairRecord>& records, double validFraction,
                    uint64_t splitSeed) {
    if (records.empty()) throw metrics::EmptyCorpus();
    SplitManifest m;
    m.validFraction = validFraction;
    m.splitSeed = splitSeed;

    size_t total = records.size();
    size_t validCount = static_cast<size_t>(std::llround(validFraction * static_cast<double>(total)));
    validCount = std::max<size_t>(validCount, 1);
    validCount = std::min(validCount, total);

    // strata by rule, in rule-name order
    std::map<std::string, std::vector<size_t>> strata;
    for (size_t i = 0; i < records.size(); ++i) strata[records[i].rule].push_back(i);

    // largest-remainder allocation of validCount across strata
    struct Alloc {
        std::string rule;
        size_t take = 0;
        double remainder = 0.0;
    };
    std::vector<Alloc> allocs;
    size_t assigned = 0;
    for (const auto& [rule, idxs] : strata) {
        double exact = static_cast<double>(validCount) * static_cast<double>(idxs.size()) /
                       static_cast<double>(total);
        Alloc a;
        a.rule = rule;
        a.take = static_cast<size_t>(std::floor(exact));
        a.take = std::min(a.take, idxs.size());
        a.remainder = exact - std::floor(exact);
        assigned += a.take;
        allocs.push_back(std::move(a));
    }
    std::stable_sort(allocs.begin(), allocs.end(), [](const Alloc& a, const Alloc& b) {
        return a.remainder > b.remainder;
    });
    for (Alloc& a : allocs) {
        if (assigned >= validCount) break;
        if (a.take < strata[a.rule].size()) {
            ++a.take;
            ++assigned;
        }
    }
    // rare shortfall when some strata saturate: top up wherever room remains
    for (Alloc& a : allocs) {
        while (assigned < validCount && a.take < strata[a.rule].size()) {
            ++a.take;
            ++assigned;
        }
    }

    std::map<std::string, size_t> takeOf;
    for (const Alloc& a : allocs) takeOf[a.rule] = a.take;

    std::set<size_t> validIdx;
    for (auto& [rule, idxs] : strata) {
        Rng rng(mixSeed(splitSeed, fnv1a64(rule)));
        std::vector<size_t> shuffled = idxs;
        for (size_t i = 0; i + 1 < shuffled.size(); ++i) {
            size_t j = i + static_cast<size_t>(rng.bounded(shuffled.size() - i));
            std::swap(shuffled[i], shuffled[j]);
        }
        for (size_t k = 0; k < takeOf[rule]; ++k) validIdx.insert(shuffled[k]);
    }

    for (size_t i = 0; i < records.size(); ++i) {
        if (validIdx.count(i)) {
            m.validIds.push_back(records[i].id);
        } else {
            m.trainIds.push_back(records[i].id);
        }
    }
    return m;
}

EvalResult evaluate(const std::vector<PairRecord>& records, const std::vector<Hypothesis>& hyps,
                    const metrics::CodeBleuWeights& weights, int jobs) {
    if (records.size() != hyps.size())
        throw AlignmentError("hypothesis count " + std::to_string(hyps.size()) +
                             " does not match record count " + std::to_string(records.size()));
    for (size_t i = 0; i < records.size(); ++i) {
        if (records[i].id != hyps[i].id)
            throw AlignmentError("id mismatch at line " + std::to_string(i + 1) + ": expected " +
                                 records[i].id + ", got " + hyps[i].id);
    }
    if (records.empty()) throw metrics::EmptyCorpus();

    std::vector<metrics::PairScore> scores(records.size());
    par::forIndex(records.size(), jobs, [&](size_t i) {
        try {
            SourceUnit ref = SourceUnit::fromText(records[i].original);
            scores[i] = metrics::scorePair(hyps[i].text, ref, records[i].transformed, weights);
        } catch (const std::exception&) {
            // a corrupt reference scores nothing; flagged as unparseable
            scores[i] = metrics::PairScore{};
            scores[i].hypParses = false;
        }
    });

    EvalResult out;
    std::vector<std::pair<std::string, metrics::PairScore>> scored;
    std::vector<std::pair<std::string, std::string>> copyPairs;
    uint64_t em = 0;
    for (size_t i = 0; i < records.size(); ++i) {
        scored.emplace_back(records[i].rule, scores[i]);
        copyPairs.emplace_back(records[i].transformed, hyps[i].text);
        em += static_cast<uint64_t>(scores[i].em);
        if (!scores[i].hypParses) ++out.unparseableHyps;
    }
    out.buckets = metrics::bucketReport(scored);
    out.copy = metrics::copyAnalysis(copyPairs);
    out.emRate = static_cast<double>(em) / static_cast<double>(records.size());
    out.csv = metrics::reportCsv(out.buckets);
    return out;
}

CheckResult checkDataset(const std::vector<PairRecord>& records, uint32_t trials, int jobs) {
    CheckResult out;
    out.checked = records.size();
    struct Row {
        int verdict = 0;  // 0 ok, 1 divergent, 2 inconclusive, 3 error
        std::string detail;
    };
    std::vector<Row> rows(records.size());
    par::forIndex(records.size(), jobs, [&](size_t i) {
        const PairRecord& r = records[i];
        try {
            SourceUnit a = SourceUnit::fromText(r.original);
            SourceUnit b = SourceUnit::fromText(r.transformed);
            uint64_t seed = std::stoull(r.seed);
            std::string entry = entryFunctionFor(a, r.siteSpan);
            auto rep = interp::equivalent(a, b, entry, trials, seed);
            if (rep.verdict == interp::Verdict::Divergent) {
                rows[i] = Row{1, rep.detail};
            } else if (rep.verdict == interp::Verdict::Inconclusive) {
                rows[i] = Row{2, "fuel exhausted"};
            }
        } catch (const std::exception& e) {
            rows[i] = Row{1, std::string("check error: ") + e.what()};
        }
    });
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].verdict == 1) {
            ++out.divergent;
            out.witnesses.emplace_back(records[i].id, rows[i].detail);
        } else if (rows[i].verdict == 2) {
            ++out.inconclusive;
        }
    }
    return out;
}

// --- serialization ---

namespace {

json recordJson(const PairRecord& r) {
    json aux = json::object();
    for (const auto& [k, v] : r.auxiliary) aux[k] = v;
    json j;
    j["id"] = r.id;
    j["language"] = r.language;
    j["original"] = r.original;
    j["transformed"] = r.transformed;
    j["rule"] = r.rule;
    j["site_span"] = json::array({r.siteSpan.begin, r.siteSpan.end});
    j["seed"] = r.seed;
    j["auxiliary"] = aux;
    return j;
}

}  // namespace

std::string recordToJson(const PairRecord& r) { return recordJson(r).dump(); }

std::string rejectToJson(const RejectRecord& r) {
    json j = recordJson(r.record);
    j["witness"] = r.witness;
    return j.dump();
}

PairRecord recordFromJson(const std::string& line) {
    json j = json::parse(line);
    PairRecord r;
    r.id = j.at("id").get<std::string>();
    r.language = j.at("language").get<std::string>();
    r.original = j.at("original").get<std::string>();
    r.transformed = j.at("transformed").get<std::string>();
    r.rule = j.at("rule").get<std::string>();
    r.siteSpan = Span{j.at("site_span")[0].get<uint32_t>(), j.at("site_span")[1].get<uint32_t>()};
    r.seed = j.at("seed").get<std::string>();
    if (j.contains("auxiliary"))
        for (const auto& [k, v] : j.at("auxiliary").items())
            r.auxiliary[k] = v.get<std::string>();
    return r;
}

void writeRecords(const std::filesystem::path& path, const std::vector<PairRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const PairRecord& r : records) out << recordToJson(r) << '\n';
}

void writeRejects(const std::filesystem::path& path, const std::vector<RejectRecord>& rejects) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const RejectRecord& r : rejects) out << rejectToJson(r) << '\n';
}

std::vector<PairRecord> readRecords(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<PairRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(recordFromJson(line));
    }
    return out;
}

std::string manifestToJson(const SplitManifest& m) {
    json j;
    j["train_ids"] = m.trainIds;
    j["valid_ids"] = m.validIds;
    j["valid_fraction"] = m.validFraction;
    j["split_seed"] = m.splitSeed;
    return j.dump(2);
}

void writeManifest(const std::filesystem::path& path, const SplitManifest& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << manifestToJson(m) << '\n';
}

SplitManifest readManifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    json j = json::parse(in);
    SplitManifest m;
    m.trainIds = j.at("train_ids").get<std::vector<std::string>>();
    m.validIds = j.at("valid_ids").get<std::vector<std::string>>();
    m.validFraction = j.at("valid_fraction").get<double>();
    m.splitSeed = j.at("split_seed").get<uint64_t>();
    return m;
}

std::vector<Hypothesis> readHypotheses(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<Hypothesis> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        out.push_back(Hypothesis{j.at("id").get<std::string>(),
                                 j.at("hypothesis").get<std::string>()});
    }
    return out;
}

void writeHypotheses(const std::filesystem::path& path, const std::vector<Hypothesis>& hyps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const Hypothesis& h : hyps) {
        json j;
        j["id"] = h.id;
        j["hypothesis"] = h.text;
        out << j.dump() << '\n';
    }
}

}  // namespace denat::pipeline
