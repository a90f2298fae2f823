#include "quasar/qmodel.hpp"
#include "quasar/errors.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace quasar;

namespace {

BindingContext context_for(int criteria) {
    BindingContext context;
    for (int i = 0; i < criteria; ++i) context.criterion_ids.insert(i);
    return context;
}

CriterionAggregate scored(double value) {
    CriterionAggregate agg;
    agg.status = AggregateStatus::Scored;
    agg.value = value;
    return agg;
}

// Brute-force weighted sum with sibling renormalization, independent of
// evaluate_model's traversal.
std::optional<double> brute_force(const QualityModelNode& node,
                                  const std::map<std::string, LeafValue>& leaves) {
    if (node.is_leaf()) return leaves.at(node.metric_binding);
    double acc = 0.0;
    double weight_present = 0.0;
    for (const auto& child : node.children) {
        const auto v = brute_force(child, leaves);
        if (v.has_value()) {
            acc += child.weight * *v;
            weight_present += child.weight;
        }
    }
    if (weight_present == 0.0) return std::nullopt;
    return acc / weight_present;
}

struct RandomTree {
    QualityModel model;
    std::map<std::string, LeafValue> leaves;
    std::vector<std::string> bindings;
};

RandomTree random_tree(std::mt19937& rng, bool allow_missing) {
    RandomTree out;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int leaf_counter = 0;

    std::function<QualityModelNode(int)> build = [&](int depth) {
        QualityModelNode node;
        node.id = "n" + std::to_string(leaf_counter) + "d" + std::to_string(depth);
        const bool leaf = depth >= 3 || (depth > 0 && rng() % 3 == 0) ||
                          leaf_counter >= 5;
        if (leaf) {
            const std::string binding = "criterion:" + std::to_string(leaf_counter++);
            node.metric_binding = binding;
            out.bindings.push_back(binding);
            LeafValue value = unit(rng);
            if (allow_missing && rng() % 4 == 0) value.reset();
            out.leaves[binding] = value;
            return node;
        }
        const int n = 2 + static_cast<int>(rng() % 2);
        std::vector<double> weights;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            weights.push_back(0.1 + unit(rng));
            sum += weights.back();
        }
        for (int i = 0; i < n; ++i) {
            auto child = build(depth + 1);
            child.weight = weights[static_cast<std::size_t>(i)] / sum;
            node.children.push_back(std::move(child));
        }
        return node;
    };
    out.model.root = build(0);
    return out;
}

const char* kBands =
    R"([{"min": 0.0, "rating": "poor"}, {"min": 0.5, "rating": "adequate"},
        {"min": 0.8, "rating": "good"}])";

} // namespace

TEST_SUITE("qmodel.load") {
    TEST_CASE("weights summing to one load") {
        const std::string text = R"({
            "id": "root", "name": "Root",
            "children": [
                {"id": "a", "weight": 0.6, "metric": "criterion:0"},
                {"id": "b", "weight": 0.4, "metric": "criterion:1"}
            ]})";
        const auto model = model_from_json(text, context_for(2));
        CHECK(model.root.children.size() == 2);
    }

    TEST_CASE("weight sum violations carry the offending sum") {
        const std::string text = R"({
            "id": "root",
            "children": [
                {"id": "a", "weight": 0.6, "metric": "criterion:0"},
                {"id": "b", "weight": 0.5, "metric": "criterion:1"}
            ]})";
        try {
            model_from_json(text, context_for(2));
            FAIL("expected WeightSumError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::WeightSumError);
            CHECK(std::string(e.what()).find("1.1") != std::string::npos);
        }
    }

    TEST_CASE("unknown bindings are rejected") {
        const std::string text = R"({
            "id": "root",
            "children": [{"id": "a", "weight": 1.0, "metric": "criterion:99"}]})";
        try {
            model_from_json(text, context_for(25));
            FAIL("expected UnknownBinding");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnknownBinding);
        }
        const std::string det = R"({
            "id": "root",
            "children": [{"id": "a", "weight": 1.0, "metric": "deterministic:nope"}]})";
        CHECK_THROWS_AS(model_from_json(det, context_for(25)), Error);
    }

    TEST_CASE("threshold bands must partition from zero upward") {
        const std::string overlap = R"({
            "id": "root",
            "thresholds": [{"min": 0.0, "rating": "a"}, {"min": 0.5, "rating": "b"},
                           {"min": 0.5, "rating": "c"}],
            "children": [{"id": "a", "weight": 1.0, "metric": "criterion:0"}]})";
        try {
            model_from_json(overlap, context_for(1));
            FAIL("expected ThresholdOverlap");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ThresholdOverlap);
        }
        const std::string not_zero = R"({
            "id": "root",
            "thresholds": [{"min": 0.2, "rating": "a"}],
            "children": [{"id": "a", "weight": 1.0, "metric": "criterion:0"}]})";
        CHECK_THROWS_AS(model_from_json(not_zero, context_for(1)), Error);
    }

    TEST_CASE("a node cannot be both leaf and inner") {
        CHECK_THROWS_AS(model_from_json(R"({"id": "x"})", context_for(1)), Error);
        CHECK_THROWS_AS(model_from_json(
                            R"({"id": "x", "metric": "criterion:0", "children": []})",
                            context_for(1)),
                        Error);
    }

    TEST_CASE("the bundled model validates against the bundled catalog") {
        const auto model = load_model("builtin", context_for(25));
        REQUIRE(model.root.children.size() == 4);
        std::size_t leaves = 0;
        for (const auto& group : model.root.children) leaves += group.children.size();
        CHECK(leaves == 25);
    }
}

TEST_SUITE("qmodel.normalize") {
    TEST_CASE("scored values divide by four") {
        CHECK(normalize_score(scored(3.0)) == LeafValue{0.75});
        CHECK(normalize_score(scored(0.0)) == LeafValue{0.0});
        CHECK(normalize_score(scored(4.0)) == LeafValue{1.0});
    }

    TEST_CASE("not found is the scale minimum, no result is missing") {
        CriterionAggregate not_found;
        not_found.status = AggregateStatus::NotFound;
        CHECK(normalize_score(not_found) == LeafValue{0.0});
        CriterionAggregate no_result;
        no_result.status = AggregateStatus::NoResult;
        CHECK(!normalize_score(no_result).has_value());
    }
}

TEST_SUITE("qmodel.evaluate") {
    TEST_CASE("single leaf with bands picks the right rating") {
        const std::string text = std::string(R"({
            "id": "root", "thresholds": )") + kBands + R"(,
            "children": [{"id": "leaf", "weight": 1.0, "metric": "criterion:0"}]})";
        const auto model = model_from_json(text, context_for(1));
        const auto assessment = evaluate_model(model, {{"criterion:0", 0.75}});
        CHECK(assessment.root_value == 0.75);
        CHECK(assessment.root_rating == "adequate");
        CHECK(assessment.missing_leaves.empty());
    }

    TEST_CASE("weighted sum of two leaves") {
        const std::string text = R"({
            "id": "root",
            "children": [
                {"id": "a", "weight": 0.6, "metric": "criterion:0"},
                {"id": "b", "weight": 0.4, "metric": "criterion:1"}
            ]})";
        const auto model = model_from_json(text, context_for(2));
        const auto assessment =
            evaluate_model(model, {{"criterion:0", 1.0}, {"criterion:1", 0.5}});
        CHECK(assessment.root_value == doctest::Approx(0.8).epsilon(1e-12));
    }

    TEST_CASE("a missing leaf renormalizes its siblings") {
        const std::string text = R"({
            "id": "root",
            "children": [
                {"id": "a", "weight": 0.3333333333333333, "metric": "criterion:0"},
                {"id": "b", "weight": 0.3333333333333333, "metric": "criterion:1"},
                {"id": "c", "weight": 0.3333333333333334, "metric": "criterion:2"}
            ]})";
        const auto model = model_from_json(text, context_for(3));
        const auto assessment = evaluate_model(
            model, {{"criterion:0", 0.9}, {"criterion:1", 0.3}, {"criterion:2", std::nullopt}});
        // Oracle: renormalized weights 0.5/0.5 over 0.9 and 0.3.
        CHECK(assessment.root_value == doctest::Approx(0.6).epsilon(1e-9));
        REQUIRE(assessment.missing_leaves.size() == 1);
        CHECK(assessment.missing_leaves[0] == "criterion:2");
    }

    TEST_CASE("all leaves missing is an error") {
        const std::string text = R"({
            "id": "root",
            "children": [{"id": "a", "weight": 1.0, "metric": "criterion:0"}]})";
        const auto model = model_from_json(text, context_for(1));
        try {
            evaluate_model(model, {{"criterion:0", std::nullopt}});
            FAIL("expected AllLeavesMissing");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::AllLeavesMissing);
        }
    }

    TEST_CASE("absent bindings are rejected up front") {
        const std::string text = R"({
            "id": "root",
            "children": [{"id": "a", "weight": 1.0, "metric": "criterion:0"}]})";
        const auto model = model_from_json(text, context_for(1));
        CHECK_THROWS_AS(evaluate_model(model, {}), Error);
    }

    TEST_CASE("random trees match the brute-force oracle") {
        std::mt19937 rng(20260808);
        for (int trial = 0; trial < 200; ++trial) {
            auto tree = random_tree(rng, trial % 2 == 1);
            const auto expected = brute_force(tree.model.root, tree.leaves);
            if (!expected.has_value()) {
                CHECK_THROWS_AS(evaluate_model(tree.model, tree.leaves), Error);
                continue;
            }
            const auto assessment = evaluate_model(tree.model, tree.leaves);
            CHECK(std::abs(assessment.root_value - *expected) <= 1e-12);
        }
    }

    TEST_CASE("raising one leaf never lowers the root") {
        std::mt19937 rng(4242);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            auto tree = random_tree(rng, false);
            const auto before = evaluate_model(tree.model, tree.leaves);
            const auto& binding =
                tree.bindings[rng() % tree.bindings.size()];
            const double old_value = *tree.leaves[binding];
            const double bumped = old_value + (1.0 - old_value) * unit(rng);
            tree.leaves[binding] = bumped;
            const auto after = evaluate_model(tree.model, tree.leaves);
            CHECK(after.root_value >= before.root_value - 1e-12);
        }
    }

    TEST_CASE("values stay in the unit interval") {
        std::mt19937 rng(99);
        for (int trial = 0; trial < 100; ++trial) {
            auto tree = random_tree(rng, false);
            const auto assessment = evaluate_model(tree.model, tree.leaves);
            for (const auto& node : assessment.nodes) {
                REQUIRE(node.value.has_value());
                CHECK(*node.value >= 0.0);
                CHECK(*node.value <= 1.0);
            }
        }
    }

    TEST_CASE("assessments serialize deterministically") {
        const auto model = load_model("builtin", context_for(25));
        std::map<std::string, LeafValue> leaves;
        for (int i = 0; i < 25; ++i) {
            leaves["criterion:" + std::to_string(i)] = (i % 5) / 4.0;
        }
        const auto a = evaluate_model(model, leaves);
        const auto b = evaluate_model(model, leaves);
        CHECK(to_json(a) == to_json(b));
    }
}

TEST_SUITE("qmodel.metrics") {
    TEST_CASE("keyword coverage is the fraction of keywords present") {
        FilteredCorpus corpus;
        for (int i = 0; i < 10; ++i) {
            corpus.keyword_counts["k" + std::to_string(i)] = i < 4 ? 2 : 0;
        }
        const auto metrics = deterministic_metrics(corpus);
        CHECK(metrics.at("keyword_coverage") == doctest::Approx(0.4).epsilon(1e-12));
    }

    TEST_CASE("doc volume clamps at the target") {
        FilteredCorpus corpus;
        corpus.keyword_counts["architecture"] = 1;
        NormalizedDocument doc;
        doc.char_count = 30000;
        corpus.documents.push_back(doc);
        CHECK(deterministic_metrics(corpus, 20000).at("doc_volume") == 1.0);
        CHECK(deterministic_metrics(corpus, 60000).at("doc_volume") ==
              doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("an empty corpus scores zero on both metrics") {
        FilteredCorpus corpus;
        const auto metrics = deterministic_metrics(corpus);
        CHECK(metrics.at("keyword_coverage") == 0.0);
        CHECK(metrics.at("doc_volume") == 0.0);
    }
}
