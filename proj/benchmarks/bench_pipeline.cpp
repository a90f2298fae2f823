#include "quasar/corpus.hpp"
#include "quasar/criteria.hpp"
#include "quasar/engine.hpp"
#include "quasar/provider.hpp"
#include "quasar/qmodel.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

using namespace quasar;

namespace {

std::vector<NormalizedDocument> synthetic_docs(int count, std::size_t chars) {
    std::mt19937 rng(42);
    const std::vector<std::string> words = {
        "architecture", "service",   "component", "deployment", "broker",
        "interface",    "database",  "module",    "gateway",    "context",
        "stakeholder",  "decision",  "quality",   "runtime",    "cluster"};
    std::vector<NormalizedDocument> docs;
    for (int i = 0; i < count; ++i) {
        NormalizedDocument doc;
        doc.path = "docs/d" + std::to_string(i) + ".md";
        while (doc.text.size() < chars) {
            doc.text += words[rng() % words.size()];
            doc.text += ' ';
        }
        doc.char_count = doc.text.size();
        docs.push_back(std::move(doc));
    }
    return docs;
}

const std::vector<std::string> kKeywords = {
    "architecture", "component",  "deployment", "stakeholder",       "design decision",
    "interface",    "quality requirement", "context", "module", "data flow"};

void BM_FilterRelevant(benchmark::State& state) {
    const auto docs = synthetic_docs(static_cast<int>(state.range(0)), 8192);
    for (auto _ : state) {
        benchmark::DoNotOptimize(filter_relevant(docs, kKeywords));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterRelevant)->Arg(8)->Arg(64)->Arg(256);

void BM_RenderPromptTruncation(benchmark::State& state) {
    const auto docs = synthetic_docs(1, static_cast<std::size_t>(state.range(0)));
    const Criterion& criterion = builtin_catalog().items[17];
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_prompt(criterion, docs[0], {false, 8}, 24000));
    }
}
BENCHMARK(BM_RenderPromptTruncation)->Arg(1024)->Arg(65536)->Arg(1 << 20);

void BM_AggregateCriterion(benchmark::State& state) {
    std::mt19937 rng(7);
    std::vector<FileCriterionResult> results;
    for (int i = 0; i < state.range(0); ++i) {
        FileCriterionResult r;
        r.criterion_id = 3;
        r.document_path = "docs/d" + std::to_string(i) + ".md";
        const int roll = static_cast<int>(rng() % 10);
        if (roll < 7) {
            r.outcome = OutcomeKind::Relevant;
            r.score = static_cast<int>(rng() % 5);
            r.justification = "covers the statement in part";
        } else if (roll < 9) {
            r.outcome = OutcomeKind::Irrelevant;
        } else {
            r.outcome = OutcomeKind::Failed;
        }
        results.push_back(std::move(r));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(aggregate_criterion(results));
    }
}
BENCHMARK(BM_AggregateCriterion)->Arg(16)->Arg(256);

void BM_StubRunOnce(benchmark::State& state) {
    FilteredCorpus corpus;
    corpus.documents = synthetic_docs(static_cast<int>(state.range(0)), 2048);
    corpus.keyword_counts["architecture"] = 1;
    ProviderConfig config;
    config.name = "stub";
    config.endpoint = "stub://42";
    const auto provider = make_provider(config);
    EngineConfig engine;
    engine.workers = static_cast<int>(state.range(1));
    const CriterionCatalog catalog = builtin_catalog();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_once(corpus, catalog, *provider, engine));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 25);
}
BENCHMARK(BM_StubRunOnce)->Args({8, 1})->Args({8, 4})->Args({32, 4});

void BM_EvaluateModel(benchmark::State& state) {
    BindingContext context;
    for (int i = 0; i < 25; ++i) context.criterion_ids.insert(i);
    const QualityModel model = load_model("builtin", context);
    std::map<std::string, LeafValue> leaves;
    for (int i = 0; i < 25; ++i) {
        leaves["criterion:" + std::to_string(i)] = (i % 5) / 4.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_model(model, leaves));
    }
}
BENCHMARK(BM_EvaluateModel);

} // namespace

BENCHMARK_MAIN();
