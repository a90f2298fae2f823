#include "quasar/cli.hpp"

#include "quasar/analysis.hpp"
#include "quasar/config.hpp"
#include "quasar/corpus.hpp"
#include "quasar/criteria.hpp"
#include "quasar/engine.hpp"
#include "quasar/errors.hpp"
#include "quasar/provider.hpp"
#include "quasar/qmodel.hpp"
#include "quasar/report.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace quasar::cli {

namespace {

ToolConfig load_with_overrides(const EvaluateOptions& options) {
    ToolConfig config = load_config(options.config_path);
    if (!options.provider.empty()) {
        if (!config.providers.count(options.provider)) {
            throw Error(ErrorCode::MalformedConfig,
                        "provider '" + options.provider + "' is not defined in " +
                            options.config_path);
        }
        config.selected_provider = options.provider;
    }
    if (options.runs > 0) config.runs = options.runs;
    if (options.workers > 0) config.workers = options.workers;
    if (!options.out_dir.empty()) config.output_dir = options.out_dir;
    if (!options.catalog.empty()) config.catalog_source = options.catalog;
    if (!options.model.empty()) config.model_source = options.model;
    return config;
}

std::map<std::string, LeafValue> collect_leaf_values(const RunSeries& series,
                                                     const FilteredCorpus& corpus,
                                                     std::size_t doc_volume_target) {
    std::map<std::string, LeafValue> leaves;
    for (const auto& fv : final_values(series)) {
        LeafValue value;
        if (fv.value.has_value()) {
            value = *fv.value / 4.0;
        }
        leaves["criterion:" + std::to_string(fv.criterion_id)] = value;
    }
    for (const auto& [name, value] : deterministic_metrics(corpus, doc_volume_target)) {
        leaves["deterministic:" + name] = value;
    }
    return leaves;
}

} // namespace

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
    try {
        if (options.source.empty()) {
            throw Error(ErrorCode::SourceNotFound, "no --source given");
        }
        const ToolConfig config = load_with_overrides(options);
        const CriterionCatalog catalog = load_catalog(config.catalog_source);

        BindingContext context;
        for (const auto& c : catalog.items) context.criterion_ids.insert(c.id);
        const QualityModel model = load_model(config.model_source, context);

        const DocumentSet set = ingest(options.source, config.ingest);
        ConvertConfig convert_config;
        if (!config.external_converter.command.empty()) {
            convert_config.external_converter = config.external_converter;
        }
        convert_config.workers = config.workers;
        const auto outcomes = convert_all(set, convert_config);
        std::vector<NormalizedDocument> docs;
        std::vector<std::string> warnings;
        for (const auto& outcome : outcomes) {
            docs.push_back(outcome.document);
            warnings.insert(warnings.end(), outcome.warnings.begin(),
                            outcome.warnings.end());
        }
        FilteredCorpus corpus = filter_relevant(docs, config.keywords);
        corpus.warnings = std::move(warnings);

        const ImageStore images = ImageStore::from_document_set(set);
        const ProviderConfig& provider_config = selected_provider(config);
        const auto provider = make_provider(provider_config, &images);

        EngineConfig engine_config;
        engine_config.workers = config.workers;
        engine_config.char_budget = config.char_budget;
        engine_config.max_images = config.max_images;
        engine_config.aggregator = aggregator_from_name(config.aggregator);

        const RunSeries series =
            run_many(corpus, catalog, *provider, config.runs, engine_config);

        Report report;
        report.config_digest = config_digest(config);
        report.provider_name = provider_config.name;
        report.catalog_source = config.catalog_source;
        report.criterion_count = catalog.items.size();
        report.corpus = summarize_corpus(options.source, set, corpus);
        report.series = series;
        report.assessment = evaluate_model(
            model, collect_leaf_values(series, corpus, config.doc_volume_target_chars));
        report.consistency_report = consistency(series);
        report.include_timings = options.include_timings;

        fs::create_directories(config.output_dir);
        for (const auto& run : series.runs) {
            util::write_file(util::join_path(config.output_dir,
                                             "run-" + std::to_string(run.run_index) + ".json"),
                             quasar::to_json(run) + "\n");
        }
        const std::string report_path = util::join_path(config.output_dir, "report.json");
        util::write_file(report_path, quasar::to_json(report));

        out << "source:            " << options.source << "\n";
        out << "documents:         " << corpus.documents.size() << " passing, "
            << corpus.excluded_count << " filtered out\n";
        out << "provider:          " << provider_config.name << " (" << config.runs
            << " run" << (config.runs == 1 ? "" : "s") << ")\n";
        for (const auto& run : series.runs) {
            out << "  run " << run.run_index << ":           " << run.wall_clock.count()
                << " ms, " << run.provider_calls << " provider calls\n";
        }
        out << "root value:        " << report.assessment.root_value;
        if (!report.assessment.root_rating.empty()) {
            out << " (" << report.assessment.root_rating << ")";
        }
        out << "\n";
        out << "consistency:       " << report.consistency_report.exact_match_fraction
            << " exact-match fraction over " << report.consistency_report.run_count
            << " runs\n";
        const auto no_result = no_result_criteria(series);
        if (!no_result.empty()) {
            out << "no result for:     ";
            for (std::size_t i = 0; i < no_result.size(); ++i) {
                out << (i ? ", " : "") << no_result[i];
            }
            out << "\n";
        }
        out << "report:            " << report_path << "\n";
        return is_degraded(series) ? kExitDegraded : kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    }
}

int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const std::string report_json = util::read_file(options.report_path);
        const RunSeries series = series_from_report_json(report_json);
        if (series.runs.empty()) {
            throw Error(ErrorCode::MalformedReport, "report contains no runs");
        }

        std::set<int> ids;
        for (const auto& agg : series.runs.front().aggregates) ids.insert(agg.criterion_id);
        CriterionCatalog pseudo_catalog;
        for (int id : ids) {
            pseudo_catalog.items.push_back({id, "criterion " + std::to_string(id), "", ""});
        }
        HumanBaseline baseline;
        try {
            baseline = load_baseline(options.baseline_path, pseudo_catalog);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MissingCriterion ||
                e.code() == ErrorCode::UnknownCriterion) {
                throw Error(ErrorCode::MalformedBaseline, e.what());
            }
            throw;
        }

        double threshold = options.threshold_pct;
        if (threshold < 0.0) threshold = 15.0;
        const DeviationReport result = deviation(series, baseline, threshold);

        std::string out_path = options.out_path;
        if (out_path.empty()) {
            std::string base = options.report_path;
            if (base.size() > 5 && base.compare(base.size() - 5, 5, ".json") == 0) {
                base.resize(base.size() - 5);
            }
            out_path = base + "-with-deviation.json";
        }
        util::write_file(out_path, report_with_deviation(report_json, result));

        out << "criterion  machine  human   deviation\n";
        for (const auto& d : result.per_criterion) {
            out << std::left << std::setw(11) << d.criterion_id << std::setw(9)
                << d.machine_value << std::setw(8) << d.human_mean << d.deviation_pct
                << "%\n";
        }
        for (const int id : result.excluded) {
            out << std::left << std::setw(11) << id << "excluded (no result in any run)\n";
        }
        std::ostringstream avg;
        avg << std::fixed << std::setprecision(1) << result.average_deviation_pct;
        out << "average deviation: " << avg.str() << "%\n";
        out << "agreement within " << threshold << "%: " << result.agreement_fraction
            << "\n";
        out << "written: " << out_path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    }
}

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const ToolConfig config = load_config(options.config_path);
        const CriterionCatalog catalog = load_catalog(config.catalog_source);
        BindingContext context;
        for (const auto& c : catalog.items) context.criterion_ids.insert(c.id);
        load_model(config.model_source, context);
        for (const auto& [name, provider] : config.providers) {
            if (provider.endpoint.rfind("stub://", 0) != 0 &&
                provider.endpoint.rfind("fixture://", 0) != 0 &&
                provider.endpoint.rfind("http://", 0) != 0 &&
                provider.endpoint.rfind("https://", 0) != 0) {
                throw Error(ErrorCode::MalformedConfig,
                            "provider '" + name + "' has unsupported endpoint scheme: " +
                                provider.endpoint);
            }
        }
        out << "config ok: " << options.config_path << " (" << catalog.items.size()
            << " criteria, " << config.providers.size() << " providers)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    }
}

namespace {

std::string example_baseline_json() {
    // Two raters over the bundled catalog, as a starting point for real
    // survey data.
    ordered_json scores_a = ordered_json::object();
    ordered_json scores_b = ordered_json::object();
    for (const auto& c : builtin_catalog().items) {
        scores_a[std::to_string(c.id)] = (c.id * 7 + 2) % 5;
        scores_b[std::to_string(c.id)] = (c.id * 3 + 1) % 5;
    }
    ordered_json j{{"raters", ordered_json::array(
                                  {ordered_json{{"id", "architect-a"}, {"scores", scores_a}},
                                   ordered_json{{"id", "architect-b"}, {"scores", scores_b}}})}};
    return j.dump(2) + "\n";
}

} // namespace

int cmd_init(const InitOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const fs::path dir(options.dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) {
            throw Error(ErrorCode::TargetNotWritable,
                        "cannot create directory " + options.dir);
        }
        const std::vector<std::pair<std::string, std::string>> files = {
            {"quasar.json", default_config_json()},
            {"catalog.json", builtin_catalog_json()},
            {"model.json", default_model_json()},
            {"baseline.example.json", example_baseline_json()},
        };
        if (!options.force) {
            for (const auto& [name, _] : files) {
                if (fs::exists(dir / name)) {
                    throw Error(ErrorCode::TargetNotWritable,
                                (dir / name).string() +
                                    " already exists (use --force to overwrite)");
                }
            }
        }
        for (const auto& [name, content] : files) {
            util::write_file((dir / name).string(), content);
            out << "wrote " << (dir / name).string() << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    }
}

} // namespace quasar::cli
