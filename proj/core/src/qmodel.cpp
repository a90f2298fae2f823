#include "quasar/qmodel.hpp"

#include "embedded_data.hpp"
#include "quasar/errors.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace quasar {

namespace {

constexpr double kWeightTolerance = 1e-9;
constexpr double kClampTolerance = 1e-12;

std::vector<ThresholdBand> parse_thresholds(const json& arr, const std::string& node_id) {
    std::vector<ThresholdBand> bands;
    for (const json& t : arr) {
        if (!t.is_object() || !t.contains("min") || !t.contains("rating") ||
            !t["min"].is_number() || !t["rating"].is_string()) {
            throw Error(ErrorCode::MalformedModelFile,
                        "threshold entries need numeric 'min' and string 'rating' (node " +
                            node_id + ")");
        }
        bands.push_back({t["min"].get<double>(), t["rating"].get<std::string>()});
    }
    if (bands.empty()) {
        throw Error(ErrorCode::MalformedModelFile,
                    "empty thresholds array on node " + node_id);
    }
    if (bands.front().min_value != 0.0) {
        throw Error(ErrorCode::ThresholdOverlap,
                    "lowest band must start at 0 (node " + node_id + ")");
    }
    for (std::size_t i = 1; i < bands.size(); ++i) {
        if (bands[i].min_value <= bands[i - 1].min_value) {
            throw Error(ErrorCode::ThresholdOverlap,
                        "threshold bands overlap or repeat on node " + node_id);
        }
        if (bands[i].min_value > 1.0) {
            throw Error(ErrorCode::ThresholdOverlap,
                        "threshold band starts above 1 on node " + node_id);
        }
    }
    return bands;
}

QualityModelNode parse_node(const json& j, const BindingContext& context, bool is_root) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        throw Error(ErrorCode::MalformedModelFile, "every node needs a string 'id'");
    }
    QualityModelNode node;
    node.id = j["id"].get<std::string>();
    node.name = j.value("name", node.id);
    if (j.contains("weight")) {
        if (!j["weight"].is_number()) {
            throw Error(ErrorCode::MalformedModelFile, "weight must be numeric on " + node.id);
        }
        node.weight = j["weight"].get<double>();
    }
    if (!is_root && (node.weight <= 0.0 || node.weight > 1.0)) {
        throw Error(ErrorCode::MalformedModelFile,
                    "weight of node " + node.id + " must lie in (0,1]");
    }
    if (j.contains("thresholds")) {
        node.thresholds = parse_thresholds(j["thresholds"], node.id);
    }

    const bool has_children = j.contains("children");
    const bool has_metric = j.contains("metric");
    if (has_children == has_metric) {
        throw Error(ErrorCode::MalformedModelFile,
                    "node " + node.id + " needs exactly one of 'children' or 'metric'");
    }
    if (has_metric) {
        if (!j["metric"].is_string()) {
            throw Error(ErrorCode::MalformedModelFile, "metric must be a string on " + node.id);
        }
        node.metric_binding = j["metric"].get<std::string>();
        const std::string& b = node.metric_binding;
        if (b.rfind("criterion:", 0) == 0) {
            int id = -1;
            try {
                id = std::stoi(b.substr(10));
            } catch (...) {
            }
            if (!context.criterion_ids.count(id)) {
                throw Error(ErrorCode::UnknownBinding,
                            "leaf " + node.id + " references unknown " + b);
            }
        } else if (b.rfind("deterministic:", 0) == 0) {
            if (!context.metric_names.count(b.substr(14))) {
                throw Error(ErrorCode::UnknownBinding,
                            "leaf " + node.id + " references unknown " + b);
            }
        } else {
            throw Error(ErrorCode::UnknownBinding,
                        "leaf " + node.id + " binding '" + b +
                            "' must start with criterion: or deterministic:");
        }
        return node;
    }

    if (!j["children"].is_array() || j["children"].empty()) {
        throw Error(ErrorCode::MalformedModelFile,
                    "children of node " + node.id + " must be a nonempty array");
    }
    double sum = 0.0;
    for (const json& child : j["children"]) {
        node.children.push_back(parse_node(child, context, false));
        sum += node.children.back().weight;
    }
    if (std::abs(sum - 1.0) > kWeightTolerance) {
        throw Error(ErrorCode::WeightSumError,
                    "weights of node " + node.id + "'s children sum to " +
                        std::to_string(sum) + ", expected 1");
    }
    return node;
}

} // namespace

QualityModel model_from_json(const std::string& json_text, const BindingContext& context) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedModelFile, e.what());
    }
    QualityModel model;
    model.root = parse_node(parsed, context, true);
    return model;
}

QualityModel load_model(const std::string& path, const BindingContext& context) {
    if (path == "builtin") {
        return model_from_json(default_model_json(), context);
    }
    std::string text;
    try {
        text = util::read_file(path);
    } catch (...) {
        throw Error(ErrorCode::MalformedModelFile, "cannot read model file " + path);
    }
    return model_from_json(text, context);
}

std::string default_model_json() {
    return std::string(embedded::default_model_json());
}

LeafValue normalize_score(const CriterionAggregate& aggregate) {
    switch (aggregate.status) {
        case AggregateStatus::Scored: return aggregate.value / 4.0;
        case AggregateStatus::NotFound: return 0.0;
        case AggregateStatus::NoResult: return std::nullopt;
    }
    return std::nullopt;
}

namespace {

std::string rating_for(const std::vector<ThresholdBand>& bands, double value) {
    std::string rating;
    for (const auto& band : bands) {
        if (value >= band.min_value) {
            rating = band.rating;
        }
    }
    return rating;
}

LeafValue evaluate_node(const QualityModelNode& node,
                        const std::map<std::string, LeafValue>& leaf_values,
                        ModelAssessment& out) {
    NodeAssessment& slot = out.nodes.emplace_back();
    const std::size_t slot_index = out.nodes.size() - 1;
    slot.id = node.id;

    LeafValue value;
    if (node.is_leaf()) {
        const auto it = leaf_values.find(node.metric_binding);
        if (it == leaf_values.end()) {
            throw Error(ErrorCode::UnknownBinding,
                        "no input value for leaf binding " + node.metric_binding);
        }
        value = it->second;
        if (!value.has_value()) {
            out.missing_leaves.push_back(node.metric_binding);
        }
    } else {
        double weighted = 0.0;
        double present_weight = 0.0;
        for (const QualityModelNode& child : node.children) {
            const LeafValue child_value = evaluate_node(child, leaf_values, out);
            if (child_value.has_value()) {
                weighted += child.weight * *child_value;
                present_weight += child.weight;
            }
        }
        if (present_weight > 0.0) {
            // Missing children drop out; the rest are renormalized.
            value = weighted / present_weight;
        }
    }

    if (value.has_value()) {
        double v = *value;
        if (v < 0.0 && v >= -kClampTolerance) v = 0.0;
        if (v > 1.0 && v <= 1.0 + kClampTolerance) v = 1.0;
        value = v;
    }
    NodeAssessment& assessment = out.nodes[slot_index];
    assessment.value = value;
    if (value.has_value() && !node.thresholds.empty()) {
        assessment.rating = rating_for(node.thresholds, *value);
    }
    return value;
}

} // namespace

ModelAssessment evaluate_model(const QualityModel& model,
                               const std::map<std::string, LeafValue>& leaf_values) {
    ModelAssessment out;
    const LeafValue root = evaluate_node(model.root, leaf_values, out);
    if (!root.has_value()) {
        throw Error(ErrorCode::AllLeavesMissing,
                    "every leaf of the model was missing, no assessment possible");
    }
    out.root_value = *root;
    out.root_rating = out.nodes.front().rating;
    return out;
}

std::map<std::string, double> deterministic_metrics(const FilteredCorpus& corpus,
                                                    std::size_t doc_volume_target) {
    std::map<std::string, double> metrics;
    std::size_t present = 0;
    for (const auto& [keyword, count] : corpus.keyword_counts) {
        if (count > 0) ++present;
    }
    metrics["keyword_coverage"] =
        corpus.keyword_counts.empty()
            ? 0.0
            : static_cast<double>(present) / static_cast<double>(corpus.keyword_counts.size());

    std::size_t chars = 0;
    for (const auto& doc : corpus.documents) chars += doc.char_count;
    metrics["doc_volume"] =
        doc_volume_target == 0
            ? 0.0
            : std::min(1.0, static_cast<double>(chars) / static_cast<double>(doc_volume_target));
    return metrics;
}

std::string to_json(const ModelAssessment& assessment) {
    ordered_json nodes = ordered_json::array();
    for (const auto& node : assessment.nodes) {
        ordered_json n{{"id", node.id}};
        if (node.value.has_value()) {
            n["value"] = *node.value;
        } else {
            n["value"] = nullptr;
        }
        n["rating"] = node.rating;
        nodes.push_back(std::move(n));
    }
    ordered_json j{{"root_value", assessment.root_value},
                   {"root_rating", assessment.root_rating},
                   {"missing_leaves", assessment.missing_leaves},
                   {"nodes", std::move(nodes)}};
    return j.dump(2);
}

} // namespace quasar
