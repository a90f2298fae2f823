#pragma once

#include "quasar/analysis.hpp"
#include "quasar/config.hpp"
#include "quasar/engine.hpp"
#include "quasar/qmodel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quasar {

struct CorpusSummary {
    std::string source;
    std::map<std::string, std::size_t> file_counts; // by kind name
    std::size_t ignored_count = 0;
    std::size_t converted_count = 0;
    std::size_t document_count = 0; // passing documents
    std::size_t excluded_count = 0;
    std::map<std::string, std::size_t> keyword_counts;
    std::string fingerprint;
    std::vector<std::string> warnings;
};

CorpusSummary summarize_corpus(const std::string& source, const DocumentSet& set,
                               const FilteredCorpus& corpus);

// Cross-run final value per criterion: per-run numbers averaged, runs
// with NoResult skipped; a criterion NoResult in every run has no value.
struct FinalCriterionValue {
    int criterion_id = 0;
    std::string status; // "scored", "not_found" or "no_result"
    std::optional<double> value;
    std::string justification_digest;
};

std::vector<FinalCriterionValue> final_values(const RunSeries& series);

// Criteria without a usable value in any run.
std::vector<int> no_result_criteria(const RunSeries& series);

// True when any run carries any NoResult aggregate (exit code 2).
bool is_degraded(const RunSeries& series);

struct Report {
    std::string config_digest;
    std::string provider_name;
    std::string catalog_source;
    std::size_t criterion_count = 0;
    CorpusSummary corpus;
    RunSeries series;
    ModelAssessment assessment;
    ConsistencyReport consistency_report;
    std::optional<DeviationReport> deviation_report;
    bool include_timings = false; // real durations break byte-reproducibility
};

// The single-document machine-readable report, with stable key order and
// shortest round-trip number formatting; ends with a newline.
std::string to_json(const Report& report);

// parse + re-dump under the canonical settings; used for round-trip checks.
std::string canonical_json(const std::string& json_text);

// Rebuilds the RunSeries embedded in a report document (for `compare`).
RunSeries series_from_report_json(const std::string& report_json);

// Returns a copy of the report document with the deviation section filled in.
std::string report_with_deviation(const std::string& report_json,
                                  const DeviationReport& deviation_report);

std::string report_schema_json();

// Minimal JSON-Schema checker covering the keyword subset the shipped
// schema uses (type, properties, required, items, enum, minimum, maximum,
// additionalProperties, minItems). Returns human-readable violations,
// empty when the document conforms.
std::vector<std::string> validate_against_schema(const std::string& document_json,
                                                 const std::string& schema_json);

} // namespace quasar
