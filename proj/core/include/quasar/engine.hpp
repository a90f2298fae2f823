#pragma once

#include "quasar/corpus.hpp"
#include "quasar/criteria.hpp"
#include "quasar/provider.hpp"

#include <chrono>
#include <string>
#include <vector>

namespace quasar {

enum class AggregateStatus { Scored, NotFound, NoResult };

const char* aggregate_status_name(AggregateStatus status);

enum class Aggregator { mean, median, max };

Aggregator aggregator_from_name(const std::string& name);

struct Contribution {
    std::string document_path;
    int score = 0;
};

struct CriterionAggregate {
    int criterion_id = 0;
    AggregateStatus status = AggregateStatus::NotFound;
    double value = 0.0; // composed score for Scored, 0 for NotFound, unset for NoResult
    std::vector<Contribution> contributing; // Relevant results, sorted by path
    std::size_t irrelevant_count = 0;
    std::size_t failed_count = 0;
    std::string justification_digest;

    // The 0..4 value used wherever a number is required; NotFound counts
    // as 0, NoResult has none.
    std::optional<double> numeric() const;
};

struct EvaluationRun {
    int run_index = 1;
    std::vector<CriterionAggregate> aggregates; // one per catalog criterion, id order
    std::chrono::milliseconds wall_clock{0};
    std::string provider_name;
    std::string corpus_fingerprint;
    std::size_t provider_calls = 0;
};

struct RunSeries {
    std::vector<EvaluationRun> runs;
};

struct EngineConfig {
    int workers = 1;
    std::size_t char_budget = 24000;
    int max_images = 8;
    Aggregator aggregator = Aggregator::mean;
};

// One (document, criterion) provider round trip, including parse retries
// with a corrective instruction. Never throws for per-call trouble; every
// path ends in a FileCriterionResult (Failed carries the cause).
FileCriterionResult evaluate_file_criterion(const NormalizedDocument& doc,
                                            const Criterion& criterion, Provider& provider,
                                            const EngineConfig& config, int run_index = 1);

// Rolls the per-file results of one criterion up: Irrelevant results are
// excluded, at least one Relevant result yields Scored (mean by default),
// none at all yields NotFound, and failures without any Relevant result
// yield NoResult. Throws MixedCriterionIds.
CriterionAggregate aggregate_criterion(const std::vector<FileCriterionResult>& results,
                                       Aggregator aggregator = Aggregator::mean);

// Evaluates every (document x criterion) pair, possibly on several
// workers; the outcome is independent of scheduling. Throws
// ProviderUnavailable when the provider fails its preflight.
EvaluationRun run_once(const FilteredCorpus& corpus, const CriterionCatalog& catalog,
                       Provider& provider, const EngineConfig& config, int run_index = 1);

// k independent runs over the same corpus snapshot, run_index 1..k.
RunSeries run_many(const FilteredCorpus& corpus, const CriterionCatalog& catalog,
                   Provider& provider, int k, const EngineConfig& config);

// Canonical serialization. Deliberately excludes wall_clock so identical
// evaluations serialize to identical bytes; timing is reported separately.
std::string to_json(const EvaluationRun& run);
std::string to_json(const CriterionAggregate& aggregate);

} // namespace quasar
