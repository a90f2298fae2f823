#pragma once

#include "quasar/corpus.hpp"
#include "quasar/engine.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace quasar {

struct ThresholdBand {
    double min_value = 0.0; // in [0,1]
    std::string rating;
};

struct QualityModelNode {
    std::string id;
    std::string name;
    double weight = 1.0; // relative to siblings, (0,1]
    std::string metric_binding; // leaf only: "criterion:<id>" or "deterministic:<name>"
    std::vector<QualityModelNode> children; // inner only
    std::vector<ThresholdBand> thresholds; // optional; ordered, partitions [0,1]

    bool is_leaf() const { return children.empty(); }
};

struct QualityModel {
    QualityModelNode root;
};

// What bindings may reference: the catalog's criterion ids and the
// registered deterministic metric names.
struct BindingContext {
    std::set<int> criterion_ids;
    std::set<std::string> metric_names = {"keyword_coverage", "doc_volume"};
};

struct NodeAssessment {
    std::string id;
    std::optional<double> value; // empty when every leaf below was Missing
    std::string rating;          // empty when no thresholds apply
};

struct ModelAssessment {
    std::vector<NodeAssessment> nodes; // preorder
    double root_value = 0.0;
    std::string root_rating;
    std::vector<std::string> missing_leaves; // bindings excluded as Missing
};

// A leaf input: a number in [0,1], or Missing (no value obtainable).
using LeafValue = std::optional<double>;

QualityModel model_from_json(const std::string& json_text, const BindingContext& context);

// path == "builtin" loads the bundled example model.
QualityModel load_model(const std::string& path, const BindingContext& context);

std::string default_model_json();

// Bridges the 0..4 criterion scale to the model's 0..1 scale.
// Scored(v) -> v/4, NotFound -> 0, NoResult -> Missing.
LeafValue normalize_score(const CriterionAggregate& aggregate);

// Bottom-up weighted aggregation. Missing leaves are excluded with their
// siblings' weights renormalized; ratings come from the threshold bands.
// Throws AllLeavesMissing when the root itself ends up Missing.
ModelAssessment evaluate_model(const QualityModel& model,
                               const std::map<std::string, LeafValue>& leaf_values);

// The two built-in deterministic metrics, pure functions of the corpus:
// keyword_coverage (fraction of keywords that occur at all) and
// doc_volume (relevant character mass against a target).
std::map<std::string, double> deterministic_metrics(const FilteredCorpus& corpus,
                                                    std::size_t doc_volume_target = 20000);

std::string to_json(const ModelAssessment& assessment);

} // namespace quasar
