#include "quasar/cli.hpp"
#include "quasar/version.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"quasar - rubric-based architecture documentation scoring"};
    app.set_version_flag("--version", quasar::kVersion);
    app.require_subcommand(1);

    quasar::cli::EvaluateOptions eval_opts;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Run the full scoring pipeline over a directory or git URL");
    evaluate->add_option("--source", eval_opts.source, "Directory or git URL to analyze")
        ->required();
    evaluate->add_option("--config", eval_opts.config_path, "Config file (default ./quasar.json)");
    evaluate->add_option("--provider", eval_opts.provider, "Provider name from the config");
    evaluate->add_option("--runs", eval_opts.runs, "Number of repeated runs");
    evaluate->add_option("--workers", eval_opts.workers, "Worker thread limit");
    evaluate->add_option("--out", eval_opts.out_dir, "Output directory for report and run files");
    evaluate->add_option("--catalog", eval_opts.catalog, "Criterion catalog ('builtin' or path)");
    evaluate->add_option("--model", eval_opts.model, "Quality model ('builtin' or path)");
    evaluate->add_flag("--timings", eval_opts.include_timings,
                       "Record wall-clock durations in the report (breaks byte-reproducibility)");

    quasar::cli::CompareOptions cmp_opts;
    auto* compare = app.add_subcommand(
        "compare", "Compare a report against a human baseline");
    compare->add_option("--report", cmp_opts.report_path, "Report file from 'evaluate'")
        ->required();
    compare->add_option("--baseline", cmp_opts.baseline_path, "Human baseline file")
        ->required();
    compare->add_option("--threshold", cmp_opts.threshold_pct,
                        "Agreement threshold in percent (default 15)");
    compare->add_option("--out", cmp_opts.out_path, "Where to write the augmented report");

    quasar::cli::ValidateOptions val_opts;
    auto* validate = app.add_subcommand(
        "validate", "Check config, catalog and quality model without network calls");
    validate->add_option("--config", val_opts.config_path, "Config file (default ./quasar.json)");

    quasar::cli::InitOptions init_opts;
    auto* init = app.add_subcommand("init", "Scaffold config, catalog, model and baseline files");
    init->add_option("--dir", init_opts.dir, "Target directory (default .)");
    init->add_flag("--force", init_opts.force, "Overwrite existing files");

    CLI11_PARSE(app, argc, argv);

    if (*evaluate) return quasar::cli::cmd_evaluate(eval_opts, std::cout, std::cerr);
    if (*compare) return quasar::cli::cmd_compare(cmp_opts, std::cout, std::cerr);
    if (*validate) return quasar::cli::cmd_validate(val_opts, std::cout, std::cerr);
    if (*init) return quasar::cli::cmd_init(init_opts, std::cout, std::cerr);
    std::cerr << app.help() << "\n";
    return quasar::cli::kExitFatal;
}
