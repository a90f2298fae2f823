#include "quasar/analysis.hpp"

#include "quasar/errors.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace quasar {

HumanBaseline baseline_from_json(const std::string& json_text, const CriterionCatalog& catalog) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedBaseline, e.what());
    }
    if (!parsed.is_object() || !parsed.contains("raters") || !parsed["raters"].is_array() ||
        parsed["raters"].empty()) {
        throw Error(ErrorCode::MalformedBaseline, "baseline needs a nonempty 'raters' array");
    }
    std::set<int> catalog_ids;
    for (const auto& c : catalog.items) catalog_ids.insert(c.id);

    HumanBaseline baseline;
    for (const json& rater : parsed["raters"]) {
        if (!rater.is_object() || !rater.contains("id") || !rater.contains("scores") ||
            !rater["scores"].is_object()) {
            throw Error(ErrorCode::MalformedBaseline,
                        "each rater needs an 'id' and a 'scores' object");
        }
        const std::string rater_id = rater["id"].is_string()
                                         ? rater["id"].get<std::string>()
                                         : rater["id"].dump();
        baseline.raters.push_back(rater_id);
        std::set<int> covered;
        for (const auto& [key, score] : rater["scores"].items()) {
            int cid = 0;
            try {
                cid = std::stoi(key);
            } catch (...) {
                throw Error(ErrorCode::MalformedBaseline,
                            "score key '" + key + "' is not a criterion id");
            }
            if (!catalog_ids.count(cid)) {
                throw Error(ErrorCode::UnknownCriterion,
                            "rater " + rater_id + " scores unknown criterion " + key);
            }
            if (!score.is_number_integer()) {
                throw Error(ErrorCode::MalformedBaseline,
                            "score for criterion " + key + " must be an integer");
            }
            const auto v = score.get<std::int64_t>();
            if (v < 0 || v > 4) {
                throw Error(ErrorCode::ScoreOutOfRange,
                            "rater " + rater_id + " scored criterion " + key + " as " +
                                std::to_string(v) + " (allowed 0..4)");
            }
            baseline.scores[cid].push_back(static_cast<int>(v));
            covered.insert(cid);
        }
        for (int cid : catalog_ids) {
            if (!covered.count(cid)) {
                throw Error(ErrorCode::MissingCriterion,
                            "rater " + rater_id + " is missing criterion " +
                                std::to_string(cid));
            }
        }
    }
    for (const auto& [cid, values] : baseline.scores) {
        double sum = 0.0;
        for (int v : values) sum += v;
        baseline.mean[cid] = sum / static_cast<double>(values.size());
    }
    return baseline;
}

HumanBaseline load_baseline(const std::string& path, const CriterionCatalog& catalog) {
    std::string text;
    try {
        text = util::read_file(path);
    } catch (...) {
        throw Error(ErrorCode::MalformedBaseline, "cannot read baseline file " + path);
    }
    return baseline_from_json(text, catalog);
}

namespace {

void check_series(const RunSeries& series) {
    if (series.runs.empty()) {
        throw Error(ErrorCode::MismatchedSeries, "series contains no runs");
    }
    const auto& first = series.runs.front();
    for (const auto& run : series.runs) {
        if (run.corpus_fingerprint != first.corpus_fingerprint) {
            throw Error(ErrorCode::MismatchedSeries,
                        "runs cover different corpora (fingerprints " +
                            first.corpus_fingerprint + " vs " + run.corpus_fingerprint + ")");
        }
        if (run.aggregates.size() != first.aggregates.size()) {
            throw Error(ErrorCode::MismatchedSeries, "runs cover different criterion sets");
        }
        for (std::size_t i = 0; i < run.aggregates.size(); ++i) {
            if (run.aggregates[i].criterion_id != first.aggregates[i].criterion_id) {
                throw Error(ErrorCode::MismatchedSeries,
                            "runs cover different criterion sets");
            }
        }
    }
}

} // namespace

ConsistencyReport consistency(const RunSeries& series) {
    check_series(series);
    ConsistencyReport report;
    report.run_count = static_cast<int>(series.runs.size());
    report.single_run_warning = series.runs.size() < 2;

    const std::size_t criteria = series.runs.front().aggregates.size();
    std::size_t exact = 0;
    for (std::size_t i = 0; i < criteria; ++i) {
        CriterionConsistency c;
        c.criterion_id = series.runs.front().aggregates[i].criterion_id;
        for (const auto& run : series.runs) {
            const auto& agg = run.aggregates[i];
            c.statuses.push_back(agg.status);
            if (agg.status == AggregateStatus::Scored) {
                c.values.push_back(agg.value);
            }
            if (agg.status != AggregateStatus::NoResult) {
                ++c.availability;
            }
        }
        const bool statuses_match =
            std::all_of(c.statuses.begin(), c.statuses.end(),
                        [&](AggregateStatus s) { return s == c.statuses.front(); });
        const bool values_match =
            std::all_of(c.values.begin(), c.values.end(),
                        [&](double v) { return v == c.values.front(); });
        c.exact_match = statuses_match && (c.values.empty() || values_match);

        if (!c.values.empty()) {
            double sum = 0.0;
            for (double v : c.values) sum += v;
            c.mean = sum / static_cast<double>(c.values.size());
            const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
            c.range = *hi - *lo;
            if (c.values.size() > 1) {
                double sq = 0.0;
                for (double v : c.values) sq += (v - c.mean) * (v - c.mean);
                c.stddev = std::sqrt(sq / static_cast<double>(c.values.size() - 1));
            }
        }
        if (c.exact_match) ++exact;
        report.per_criterion.push_back(std::move(c));
    }
    report.exact_match_fraction =
        criteria == 0 ? 1.0 : static_cast<double>(exact) / static_cast<double>(criteria);
    return report;
}

double DeviationReport::agreement_at(double threshold) const {
    if (per_criterion.empty()) return 0.0;
    std::size_t within = 0;
    for (const auto& c : per_criterion) {
        if (c.deviation_pct <= threshold) ++within;
    }
    return static_cast<double>(within) / static_cast<double>(per_criterion.size());
}

DeviationReport deviation(const RunSeries& series, const HumanBaseline& baseline,
                          double threshold_pct) {
    check_series(series);
    const auto& first = series.runs.front();
    std::set<int> series_ids;
    for (const auto& agg : first.aggregates) series_ids.insert(agg.criterion_id);
    std::set<int> baseline_ids;
    for (const auto& [cid, _] : baseline.mean) baseline_ids.insert(cid);
    if (series_ids != baseline_ids) {
        throw Error(ErrorCode::CriterionSetMismatch,
                    "series and baseline cover different criterion sets");
    }

    DeviationReport report;
    report.threshold_pct = threshold_pct;
    double total = 0.0;
    for (std::size_t i = 0; i < first.aggregates.size(); ++i) {
        const int cid = first.aggregates[i].criterion_id;
        double sum = 0.0;
        std::size_t usable = 0;
        for (const auto& run : series.runs) {
            if (const auto numeric = run.aggregates[i].numeric(); numeric.has_value()) {
                sum += *numeric;
                ++usable;
            }
        }
        if (usable == 0) {
            report.excluded.push_back(cid);
            continue;
        }
        CriterionDeviation d;
        d.criterion_id = cid;
        d.machine_value = sum / static_cast<double>(usable);
        d.human_mean = baseline.mean.at(cid);
        d.deviation_pct = std::abs(d.machine_value - d.human_mean) / 4.0 * 100.0;
        total += d.deviation_pct;
        report.per_criterion.push_back(std::move(d));
    }
    if (!report.per_criterion.empty()) {
        report.average_deviation_pct =
            total / static_cast<double>(report.per_criterion.size());
    }
    report.agreement_fraction = report.agreement_at(threshold_pct);
    return report;
}

std::string to_json(const ConsistencyReport& report) {
    ordered_json per = ordered_json::array();
    for (const auto& c : report.per_criterion) {
        ordered_json statuses = ordered_json::array();
        for (const auto s : c.statuses) statuses.push_back(aggregate_status_name(s));
        per.push_back({{"criterion_id", c.criterion_id},
                       {"statuses", std::move(statuses)},
                       {"values", c.values},
                       {"exact_match", c.exact_match},
                       {"mean", c.mean},
                       {"range", c.range},
                       {"stddev", c.stddev},
                       {"availability", c.availability}});
    }
    ordered_json j{{"run_count", report.run_count},
                   {"exact_match_fraction", report.exact_match_fraction},
                   {"single_run_warning", report.single_run_warning},
                   {"per_criterion", std::move(per)}};
    return j.dump(2);
}

std::string to_json(const DeviationReport& report) {
    ordered_json per = ordered_json::array();
    for (const auto& d : report.per_criterion) {
        per.push_back({{"criterion_id", d.criterion_id},
                       {"machine_value", d.machine_value},
                       {"human_mean", d.human_mean},
                       {"deviation_pct", d.deviation_pct}});
    }
    ordered_json j{{"average_deviation_pct", report.average_deviation_pct},
                   {"threshold_pct", report.threshold_pct},
                   {"agreement_fraction", report.agreement_fraction},
                   {"excluded", report.excluded},
                   {"per_criterion", std::move(per)}};
    return j.dump(2);
}

} // namespace quasar
