#include "quasar/engine.hpp"

#include "quasar/errors.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

using ordered_json = nlohmann::ordered_json;

namespace quasar {

const char* aggregate_status_name(AggregateStatus status) {
    switch (status) {
        case AggregateStatus::Scored: return "scored";
        case AggregateStatus::NotFound: return "not_found";
        case AggregateStatus::NoResult: return "no_result";
    }
    return "no_result";
}

Aggregator aggregator_from_name(const std::string& name) {
    if (name == "mean") return Aggregator::mean;
    if (name == "median") return Aggregator::median;
    if (name == "max") return Aggregator::max;
    throw Error(ErrorCode::MalformedConfig,
                "unknown aggregator '" + name + "' (expected mean, median or max)");
}

std::optional<double> CriterionAggregate::numeric() const {
    switch (status) {
        case AggregateStatus::Scored: return value;
        case AggregateStatus::NotFound: return 0.0;
        case AggregateStatus::NoResult: return std::nullopt;
    }
    return std::nullopt;
}

namespace {

constexpr const char* kCorrective =
    "\nYour previous reply could not be parsed. Reply with only the structured object.";

bool is_transport_error(ErrorCode code) {
    return code == ErrorCode::Timeout || code == ErrorCode::HttpError;
}

double compose(const std::vector<Contribution>& contributing, Aggregator aggregator) {
    std::vector<int> scores;
    scores.reserve(contributing.size());
    for (const auto& c : contributing) scores.push_back(c.score);
    switch (aggregator) {
        case Aggregator::mean: {
            const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
            return sum / static_cast<double>(scores.size());
        }
        case Aggregator::median: {
            std::sort(scores.begin(), scores.end());
            const std::size_t n = scores.size();
            if (n % 2 == 1) return scores[n / 2];
            return (scores[n / 2 - 1] + scores[n / 2]) / 2.0;
        }
        case Aggregator::max:
            return *std::max_element(scores.begin(), scores.end());
    }
    return 0.0;
}

} // namespace

FileCriterionResult evaluate_file_criterion(const NormalizedDocument& doc,
                                            const Criterion& criterion, Provider& provider,
                                            const EngineConfig& config, int run_index) {
    const ProviderCapabilities caps{provider.config().multimodal, config.max_images};
    const PromptPayload base = render_prompt(criterion, doc, caps, config.char_budget);

    const int max_attempts = std::max(0, provider.config().max_retries) + 1;
    std::string last_reason = "no attempt made";
    std::string last_raw;
    int attempt = 1;
    for (; attempt <= max_attempts; ++attempt) {
        PromptPayload payload = base;
        if (attempt > 1) {
            payload.system_text += kCorrective;
        }
        RawCompletion raw;
        try {
            raw = provider.complete(payload, CallContext{run_index, attempt});
        } catch (const Error& e) {
            last_reason = e.what();
            if (!is_transport_error(e.code())) {
                // CapabilityMismatch, FixtureKeyMissing etc. repeat
                // identically; retrying cannot help.
                break;
            }
            continue;
        } catch (const std::exception& e) {
            last_reason = e.what();
            break;
        }
        last_raw = raw.text;
        try {
            FileCriterionResult result = parse_result(raw, criterion.id, doc.path);
            result.attempts = attempt;
            return result;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ParseFailure) throw;
            last_reason = e.what();
        }
    }
    FileCriterionResult result;
    result.criterion_id = criterion.id;
    result.document_path = doc.path;
    result.outcome = OutcomeKind::Failed;
    result.failure_reason = last_reason;
    result.raw_response = last_raw;
    result.attempts = std::min(attempt, max_attempts);
    return result;
}

CriterionAggregate aggregate_criterion(const std::vector<FileCriterionResult>& results,
                                       Aggregator aggregator) {
    CriterionAggregate agg;
    if (results.empty()) {
        agg.status = AggregateStatus::NotFound;
        agg.value = 0.0;
        return agg;
    }
    agg.criterion_id = results.front().criterion_id;
    for (const auto& r : results) {
        if (r.criterion_id != agg.criterion_id) {
            throw Error(ErrorCode::MixedCriterionIds,
                        "results mix criteria " + std::to_string(agg.criterion_id) + " and " +
                            std::to_string(r.criterion_id));
        }
    }
    std::vector<const FileCriterionResult*> sorted;
    sorted.reserve(results.size());
    for (const auto& r : results) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const FileCriterionResult* a, const FileCriterionResult* b) {
                  return a->document_path < b->document_path;
              });

    std::vector<std::string> relevant_justifications;
    std::vector<std::string> irrelevant_justifications;
    for (const FileCriterionResult* r : sorted) {
        switch (r->outcome) {
            case OutcomeKind::Relevant:
                agg.contributing.push_back({r->document_path, r->score});
                if (!r->justification.empty()) {
                    relevant_justifications.push_back(r->justification);
                }
                break;
            case OutcomeKind::Irrelevant:
                ++agg.irrelevant_count;
                if (!r->justification.empty()) {
                    irrelevant_justifications.push_back(r->justification);
                }
                break;
            case OutcomeKind::Failed:
                ++agg.failed_count;
                break;
        }
    }

    if (!agg.contributing.empty()) {
        agg.status = AggregateStatus::Scored;
        agg.value = compose(agg.contributing, aggregator);
    } else if (agg.failed_count > 0) {
        agg.status = AggregateStatus::NoResult;
        agg.value = 0.0;
    } else {
        agg.status = AggregateStatus::NotFound;
        agg.value = 0.0;
    }

    const auto& pool =
        agg.contributing.empty() ? irrelevant_justifications : relevant_justifications;
    std::vector<std::string> seen;
    for (const auto& j : pool) {
        if (std::find(seen.begin(), seen.end(), j) != seen.end()) continue;
        seen.push_back(j);
        if (!agg.justification_digest.empty()) agg.justification_digest += "\n";
        agg.justification_digest += j;
    }
    return agg;
}

EvaluationRun run_once(const FilteredCorpus& corpus, const CriterionCatalog& catalog,
                       Provider& provider, const EngineConfig& config, int run_index) {
    try {
        provider.preflight();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::AuthMissing) {
            throw Error(ErrorCode::ProviderUnavailable, e.what());
        }
        throw;
    }

    const auto start = std::chrono::steady_clock::now();
    const std::size_t docs = corpus.documents.size();
    const std::size_t criteria = catalog.items.size();
    const std::size_t total = docs * criteria;

    // Task t = (criterion index, document index); results land in a
    // preallocated slot so worker scheduling cannot affect the output.
    std::vector<FileCriterionResult> results(total);
    auto run_task = [&](std::size_t t) {
        const std::size_t ci = t / docs;
        const std::size_t di = t % docs;
        results[t] = evaluate_file_criterion(corpus.documents[di], catalog.items[ci], provider,
                                             config, run_index);
    };

    const int workers = std::max(1, config.workers);
    if (workers == 1 || total <= 1) {
        for (std::size_t t = 0; t < total; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) {
                run_task(t);
            }
        };
        std::vector<std::thread> threads;
        const std::size_t count = std::min<std::size_t>(workers, total);
        threads.reserve(count);
        for (std::size_t i = 0; i < count; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    EvaluationRun run;
    run.run_index = run_index;
    run.provider_name = provider.config().name;
    run.corpus_fingerprint = corpus_fingerprint(corpus);
    run.provider_calls = 0;
    for (const auto& r : results) run.provider_calls += static_cast<std::size_t>(r.attempts);

    for (std::size_t ci = 0; ci < criteria; ++ci) {
        std::vector<FileCriterionResult> per_criterion(results.begin() + ci * docs,
                                                       results.begin() + (ci + 1) * docs);
        CriterionAggregate agg = aggregate_criterion(per_criterion, config.aggregator);
        agg.criterion_id = catalog.items[ci].id; // empty corpus keeps the id
        run.aggregates.push_back(std::move(agg));
    }
    run.wall_clock = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return run;
}

RunSeries run_many(const FilteredCorpus& corpus, const CriterionCatalog& catalog,
                   Provider& provider, int k, const EngineConfig& config) {
    if (k < 1) {
        throw std::invalid_argument("run_many: k must be >= 1");
    }
    RunSeries series;
    series.runs.reserve(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        series.runs.push_back(run_once(corpus, catalog, provider, config, i));
    }
    return series;
}

namespace {

ordered_json aggregate_json(const CriterionAggregate& agg) {
    ordered_json contributing = ordered_json::array();
    for (const auto& c : agg.contributing) {
        contributing.push_back({{"document_path", c.document_path}, {"score", c.score}});
    }
    ordered_json j{{"criterion_id", agg.criterion_id},
                   {"status", aggregate_status_name(agg.status)}};
    if (agg.status == AggregateStatus::NoResult) {
        j["value"] = nullptr;
    } else {
        j["value"] = agg.value;
    }
    j["contributing"] = std::move(contributing);
    j["irrelevant_count"] = agg.irrelevant_count;
    j["failed_count"] = agg.failed_count;
    j["justification_digest"] = agg.justification_digest;
    return j;
}

} // namespace

std::string to_json(const CriterionAggregate& aggregate) {
    return aggregate_json(aggregate).dump(2);
}

std::string to_json(const EvaluationRun& run) {
    ordered_json aggregates = ordered_json::array();
    for (const auto& agg : run.aggregates) aggregates.push_back(aggregate_json(agg));
    ordered_json j{{"run_index", run.run_index},
                   {"provider", run.provider_name},
                   {"corpus_fingerprint", run.corpus_fingerprint},
                   {"aggregates", std::move(aggregates)}};
    return j.dump(2);
}

} // namespace quasar
