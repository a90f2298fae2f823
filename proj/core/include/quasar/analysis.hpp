#pragma once

#include "quasar/engine.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace quasar {

struct HumanBaseline {
    std::vector<std::string> raters;
    std::map<int, std::vector<int>> scores; // criterion id -> per-rater scores, 0..4
    std::map<int, double> mean;             // criterion id -> mean over raters
};

// Baseline file: {"raters": [{"id": ..., "scores": {"<criterion>": int}}]}.
// Throws MissingCriterion, ScoreOutOfRange, UnknownCriterion,
// MalformedBaseline.
HumanBaseline load_baseline(const std::string& path, const CriterionCatalog& catalog);
HumanBaseline baseline_from_json(const std::string& json_text, const CriterionCatalog& catalog);

struct CriterionConsistency {
    int criterion_id = 0;
    std::vector<AggregateStatus> statuses; // one per run
    std::vector<double> values;            // Scored runs only
    bool exact_match = false;              // statuses and values agree across runs
    double mean = 0.0;                     // over Scored values
    double range = 0.0;                    // max - min over Scored values
    double stddev = 0.0;                   // sample stddev over Scored values
    int availability = 0;                  // runs with a usable value (not NoResult)
};

struct ConsistencyReport {
    std::vector<CriterionConsistency> per_criterion;
    double exact_match_fraction = 0.0;
    int run_count = 0;
    bool single_run_warning = false;
};

// Run-to-run stability over a RunSeries. Throws MismatchedSeries when the
// runs disagree on corpus fingerprint or criterion set.
ConsistencyReport consistency(const RunSeries& series);

struct CriterionDeviation {
    int criterion_id = 0;
    double machine_value = 0.0; // mean per-run numeric value, NoResult runs skipped
    double human_mean = 0.0;
    double deviation_pct = 0.0; // |machine - human| / 4 * 100
};

struct DeviationReport {
    std::vector<CriterionDeviation> per_criterion; // included criteria only
    std::vector<int> excluded;                     // NoResult in every run
    double average_deviation_pct = 0.0;
    double threshold_pct = 15.0;
    double agreement_fraction = 0.0; // included criteria with deviation <= threshold

    double agreement_at(double threshold) const;
};

// Machine-vs-human comparison per criterion. Throws CriterionSetMismatch.
DeviationReport deviation(const RunSeries& series, const HumanBaseline& baseline,
                          double threshold_pct = 15.0);

std::string to_json(const ConsistencyReport& report);
std::string to_json(const DeviationReport& report);

} // namespace quasar
