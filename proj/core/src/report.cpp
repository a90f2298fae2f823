#include "quasar/report.hpp"

#include "embedded_data.hpp"
#include "quasar/errors.hpp"
#include "quasar/version.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace quasar {

CorpusSummary summarize_corpus(const std::string& source, const DocumentSet& set,
                               const FilteredCorpus& corpus) {
    CorpusSummary summary;
    summary.source = source;
    for (const FileKind kind : {FileKind::markdown, FileKind::plaintext, FileKind::pdf,
                                FileKind::docx, FileKind::image, FileKind::other}) {
        summary.file_counts[file_kind_name(kind)] = 0;
    }
    std::size_t convertible = 0;
    for (const RawFile& f : set.files) {
        ++summary.file_counts[file_kind_name(f.kind)];
        if (f.kind != FileKind::image) ++convertible;
    }
    summary.ignored_count = set.ignored_count;
    summary.converted_count = convertible;
    summary.document_count = corpus.documents.size();
    summary.excluded_count = corpus.excluded_count;
    summary.keyword_counts = corpus.keyword_counts;
    summary.fingerprint = corpus_fingerprint(corpus);
    summary.warnings = corpus.warnings;
    return summary;
}

std::vector<FinalCriterionValue> final_values(const RunSeries& series) {
    std::vector<FinalCriterionValue> finals;
    if (series.runs.empty()) return finals;
    const std::size_t criteria = series.runs.front().aggregates.size();
    for (std::size_t i = 0; i < criteria; ++i) {
        FinalCriterionValue fv;
        fv.criterion_id = series.runs.front().aggregates[i].criterion_id;
        double sum = 0.0;
        std::size_t usable = 0;
        bool any_scored = false;
        std::vector<std::string> digest_lines;
        for (const auto& run : series.runs) {
            const auto& agg = run.aggregates[i];
            if (const auto numeric = agg.numeric(); numeric.has_value()) {
                sum += *numeric;
                ++usable;
                any_scored = any_scored || agg.status == AggregateStatus::Scored;
            }
            // Merge per-run digests, deduplicating lines across runs.
            std::size_t start = 0;
            const std::string& digest = agg.justification_digest;
            while (start <= digest.size() && !digest.empty()) {
                const std::size_t nl = digest.find('\n', start);
                const std::string line = digest.substr(
                    start, nl == std::string::npos ? std::string::npos : nl - start);
                if (!line.empty() &&
                    std::find(digest_lines.begin(), digest_lines.end(), line) ==
                        digest_lines.end()) {
                    digest_lines.push_back(line);
                }
                if (nl == std::string::npos) break;
                start = nl + 1;
            }
        }
        if (usable == 0) {
            fv.status = "no_result";
        } else {
            fv.value = sum / static_cast<double>(usable);
            fv.status = any_scored ? "scored" : "not_found";
        }
        for (const auto& line : digest_lines) {
            if (!fv.justification_digest.empty()) fv.justification_digest += "\n";
            fv.justification_digest += line;
        }
        finals.push_back(std::move(fv));
    }
    return finals;
}

std::vector<int> no_result_criteria(const RunSeries& series) {
    std::vector<int> out;
    for (const auto& fv : final_values(series)) {
        if (fv.status == "no_result") out.push_back(fv.criterion_id);
    }
    return out;
}

bool is_degraded(const RunSeries& series) {
    for (const auto& run : series.runs) {
        for (const auto& agg : run.aggregates) {
            if (agg.status == AggregateStatus::NoResult) return true;
        }
    }
    return false;
}

namespace {

ordered_json parse_fragment(const std::string& text) {
    return ordered_json::parse(text);
}

} // namespace

std::string to_json(const Report& report) {
    ordered_json corpus{{"source", report.corpus.source},
                        {"file_counts", ordered_json::object()},
                        {"ignored_count", report.corpus.ignored_count},
                        {"converted_count", report.corpus.converted_count},
                        {"document_count", report.corpus.document_count},
                        {"excluded_count", report.corpus.excluded_count},
                        {"keyword_counts", ordered_json::object()},
                        {"fingerprint", report.corpus.fingerprint},
                        {"warnings", report.corpus.warnings}};
    for (const auto& [kind, count] : report.corpus.file_counts) {
        corpus["file_counts"][kind] = count;
    }
    for (const auto& [keyword, count] : report.corpus.keyword_counts) {
        corpus["keyword_counts"][keyword] = count;
    }

    ordered_json runs = ordered_json::array();
    for (const auto& run : report.series.runs) {
        runs.push_back(parse_fragment(quasar::to_json(run)));
    }

    ordered_json finals = ordered_json::array();
    for (const auto& fv : final_values(report.series)) {
        ordered_json f{{"criterion_id", fv.criterion_id}, {"status", fv.status}};
        if (fv.value.has_value()) {
            f["value"] = *fv.value;
        } else {
            f["value"] = nullptr;
        }
        f["justification_digest"] = fv.justification_digest;
        finals.push_back(std::move(f));
    }

    ordered_json timings_runs = ordered_json::array();
    long long total_ms = 0;
    for (const auto& run : report.series.runs) {
        ordered_json t{{"run_index", run.run_index}, {"provider_calls", run.provider_calls}};
        if (report.include_timings) {
            t["wall_clock_ms"] = run.wall_clock.count();
            total_ms += run.wall_clock.count();
        } else {
            t["wall_clock_ms"] = nullptr;
        }
        timings_runs.push_back(std::move(t));
    }

    ordered_json j{
        {"schema_version", "1"},
        {"tool", ordered_json{{"name", "quasar"}, {"version", kVersion}}},
        {"config_digest", report.config_digest},
        {"provider", report.provider_name},
        {"criteria",
         ordered_json{{"source", report.catalog_source}, {"count", report.criterion_count}}},
        {"corpus", std::move(corpus)},
        {"runs", std::move(runs)},
        {"final", ordered_json{{"per_criterion", std::move(finals)},
                               {"no_result_criteria", no_result_criteria(report.series)},
                               {"degraded", is_degraded(report.series)}}},
        {"model_assessment", parse_fragment(quasar::to_json(report.assessment))},
        {"consistency", parse_fragment(quasar::to_json(report.consistency_report))},
        {"deviation", report.deviation_report.has_value()
                          ? parse_fragment(quasar::to_json(*report.deviation_report))
                          : ordered_json(nullptr)},
        {"timings", ordered_json{{"per_run", std::move(timings_runs)},
                                 {"total_wall_clock_ms",
                                  report.include_timings ? ordered_json(total_ms)
                                                         : ordered_json(nullptr)}}}};
    return j.dump(2) + "\n";
}

std::string canonical_json(const std::string& json_text) {
    try {
        return ordered_json::parse(json_text).dump(2) + "\n";
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedReport, e.what());
    }
}

RunSeries series_from_report_json(const std::string& report_json) {
    ordered_json parsed;
    try {
        parsed = ordered_json::parse(report_json);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedReport, e.what());
    }
    if (!parsed.contains("runs") || !parsed["runs"].is_array()) {
        throw Error(ErrorCode::MalformedReport, "report lacks a 'runs' array");
    }
    RunSeries series;
    try {
        for (const auto& r : parsed["runs"]) {
            EvaluationRun run;
            run.run_index = r.at("run_index").get<int>();
            run.provider_name = r.at("provider").get<std::string>();
            run.corpus_fingerprint = r.at("corpus_fingerprint").get<std::string>();
            for (const auto& a : r.at("aggregates")) {
                CriterionAggregate agg;
                agg.criterion_id = a.at("criterion_id").get<int>();
                const std::string status = a.at("status").get<std::string>();
                if (status == "scored") {
                    agg.status = AggregateStatus::Scored;
                    agg.value = a.at("value").get<double>();
                } else if (status == "not_found") {
                    agg.status = AggregateStatus::NotFound;
                    agg.value = 0.0;
                } else if (status == "no_result") {
                    agg.status = AggregateStatus::NoResult;
                } else {
                    throw Error(ErrorCode::MalformedReport,
                                "unknown aggregate status '" + status + "'");
                }
                if (a.contains("contributing")) {
                    for (const auto& c : a["contributing"]) {
                        agg.contributing.push_back({c.at("document_path").get<std::string>(),
                                                    c.at("score").get<int>()});
                    }
                }
                agg.irrelevant_count = a.value("irrelevant_count", 0u);
                agg.failed_count = a.value("failed_count", 0u);
                agg.justification_digest = a.value("justification_digest", std::string{});
                run.aggregates.push_back(std::move(agg));
            }
            series.runs.push_back(std::move(run));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedReport, std::string("malformed run data: ") + e.what());
    }
    return series;
}

std::string report_with_deviation(const std::string& report_json,
                                  const DeviationReport& deviation_report) {
    ordered_json parsed;
    try {
        parsed = ordered_json::parse(report_json);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedReport, e.what());
    }
    parsed["deviation"] = parse_fragment(quasar::to_json(deviation_report));
    return parsed.dump(2) + "\n";
}

std::string report_schema_json() {
    return std::string(embedded::report_schema_json());
}

namespace {

bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

void validate_node(const json& value, const json& schema, const std::string& path,
                   std::vector<std::string>& errors) {
    if (!schema.is_object()) return;

    if (schema.contains("type")) {
        bool ok = false;
        if (schema["type"].is_string()) {
            ok = type_matches(value, schema["type"].get<std::string>());
        } else if (schema["type"].is_array()) {
            for (const auto& t : schema["type"]) {
                if (type_matches(value, t.get<std::string>())) {
                    ok = true;
                    break;
                }
            }
        }
        if (!ok) {
            errors.push_back(path + ": type mismatch (expected " + schema["type"].dump() + ")");
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& candidate : schema["enum"]) {
            if (value == candidate) {
                found = true;
                break;
            }
        }
        if (!found) {
            errors.push_back(path + ": value not in enum " + schema["enum"].dump());
        }
    }
    if (value.is_number()) {
        if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>()) {
            errors.push_back(path + ": below minimum " + schema["minimum"].dump());
        }
        if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>()) {
            errors.push_back(path + ": above maximum " + schema["maximum"].dump());
        }
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!value.contains(key.get<std::string>())) {
                    errors.push_back(path + ": missing required key '" +
                                     key.get<std::string>() + "'");
                }
            }
        }
        const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        for (const auto& [key, child] : value.items()) {
            if (props != nullptr && props->contains(key)) {
                validate_node(child, (*props)[key], path + "/" + key, errors);
            } else if (schema.contains("additionalProperties")) {
                const auto& ap = schema["additionalProperties"];
                if (ap.is_boolean() && !ap.get<bool>()) {
                    errors.push_back(path + ": unexpected key '" + key + "'");
                } else if (ap.is_object()) {
                    validate_node(child, ap, path + "/" + key, errors);
                }
            }
        }
    }
    if (value.is_array()) {
        if (schema.contains("minItems") &&
            value.size() < schema["minItems"].get<std::size_t>()) {
            errors.push_back(path + ": fewer than minItems " + schema["minItems"].dump());
        }
        if (schema.contains("items") && schema["items"].is_object()) {
            std::size_t index = 0;
            for (const auto& item : value) {
                validate_node(item, schema["items"], path + "/" + std::to_string(index), errors);
                ++index;
            }
        }
    }
}

} // namespace

std::vector<std::string> validate_against_schema(const std::string& document_json,
                                                 const std::string& schema_json) {
    json document;
    json schema;
    try {
        document = json::parse(document_json);
    } catch (const json::exception& e) {
        return {std::string("document is not valid JSON: ") + e.what()};
    }
    try {
        schema = json::parse(schema_json);
    } catch (const json::exception& e) {
        return {std::string("schema is not valid JSON: ") + e.what()};
    }
    std::vector<std::string> errors;
    validate_node(document, schema, "", errors);
    return errors;
}

} // namespace quasar
