#include "quasar/cli.hpp"
#include "quasar/config.hpp"
#include "quasar/errors.hpp"
#include "quasar/report.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

using namespace quasar;
using nlohmann::json;
using test_support::TempDir;

namespace {

std::string stub_config_text(int runs = 3, int workers = 2,
                             const std::string& keywords = R"(["architecture"])") {
    return R"({
        "keywords": )" + keywords + R"(,
        "provider": "stub",
        "providers": {"stub": {"endpoint": "stub://42", "multimodal": true}},
        "runs": )" + std::to_string(runs) + R"(,
        "workers": )" + std::to_string(workers) + R"(
    })";
}

std::string fixture_provider_config(const std::string& fixture_path, int runs = 1) {
    return R"({
        "keywords": ["architecture"],
        "provider": "fx",
        "providers": {"fx": {"endpoint": "fixture://)" + fixture_path + R"("}},
        "runs": )" + std::to_string(runs) + R"(,
        "workers": 2
    })";
}

struct CommandResult {
    int exit_code;
    std::string out;
    std::string err;
};

CommandResult run_evaluate(const cli::EvaluateOptions& options) {
    std::ostringstream out, err;
    const int code = cli::cmd_evaluate(options, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_SUITE("config") {
    TEST_CASE("the shipped default config parses") {
        const ToolConfig config = config_from_json(default_config_json());
        CHECK(config.selected_provider == "stub");
        CHECK(config.runs == 3);
        CHECK(config.keywords.size() == 10);
        CHECK(config.providers.count("local") == 1);
        CHECK(selected_provider(config).endpoint == "stub://42");
    }

    TEST_CASE("shipped default config file equals the embedded one") {
        CHECK(test_support::slurp(test_support::data_dir() + "/default_config.json") ==
              default_config_json());
    }

    TEST_CASE("structural violations are rejected") {
        CHECK_THROWS_AS(config_from_json("{"), Error);
        // no providers
        CHECK_THROWS_AS(config_from_json(R"({"keywords": ["a"], "provider": "x",
                                             "providers": {}})"),
                        Error);
        // selected provider missing
        CHECK_THROWS_AS(config_from_json(R"({"keywords": ["a"], "provider": "nope",
            "providers": {"stub": {"endpoint": "stub://1"}}})"),
                        Error);
        // runs < 1
        CHECK_THROWS_AS(config_from_json(R"({"keywords": ["a"], "provider": "stub",
            "providers": {"stub": {"endpoint": "stub://1"}}, "runs": 0})"),
                        Error);
        // unknown aggregator
        CHECK_THROWS_AS(config_from_json(R"({"keywords": ["a"], "provider": "stub",
            "providers": {"stub": {"endpoint": "stub://1"}}, "aggregator": "mode"})"),
                        Error);
        // empty keywords
        CHECK_THROWS_AS(config_from_json(R"({"keywords": [], "provider": "stub",
            "providers": {"stub": {"endpoint": "stub://1"}}})"),
                        Error);
    }

    TEST_CASE("digest ignores formatting but tracks content") {
        const std::string compact =
            R"({"keywords":["a"],"provider":"stub","providers":{"stub":{"endpoint":"stub://1"}}})";
        const std::string spaced = R"({
            "provider": "stub",
            "keywords": [ "a" ],
            "providers": { "stub": { "endpoint": "stub://1" } }
        })";
        CHECK(config_digest(config_from_json(compact)) ==
              config_digest(config_from_json(spaced)));
        const std::string changed =
            R"({"keywords":["b"],"provider":"stub","providers":{"stub":{"endpoint":"stub://1"}}})";
        CHECK(config_digest(config_from_json(compact)) !=
              config_digest(config_from_json(changed)));
    }
}

TEST_SUITE("report.schema_validator") {
    TEST_CASE("accepts conforming and flags violating documents") {
        const std::string schema = R"({
            "type": "object",
            "required": ["name", "count"],
            "additionalProperties": false,
            "properties": {
                "name": {"type": "string"},
                "count": {"type": "integer", "minimum": 0, "maximum": 10},
                "tags": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "mode": {"type": "string", "enum": ["a", "b"]}
            }})";
        CHECK(validate_against_schema(R"({"name": "x", "count": 3})", schema).empty());
        CHECK(!validate_against_schema(R"({"name": "x"})", schema).empty());
        CHECK(!validate_against_schema(R"({"name": 4, "count": 3})", schema).empty());
        CHECK(!validate_against_schema(R"({"name": "x", "count": 11})", schema).empty());
        CHECK(!validate_against_schema(R"({"name": "x", "count": -1})", schema).empty());
        CHECK(!validate_against_schema(R"({"name": "x", "count": 1, "zzz": 0})", schema)
                   .empty());
        CHECK(!validate_against_schema(R"({"name": "x", "count": 1, "tags": []})", schema)
                   .empty());
        CHECK(!validate_against_schema(R"({"name": "x", "count": 1, "mode": "c"})", schema)
                   .empty());
        CHECK(validate_against_schema(R"({"name": "x", "count": 1, "mode": "b",
                                          "tags": ["t"]})",
                                      schema)
                  .empty());
    }

    TEST_CASE("null-or-object unions work") {
        const std::string schema =
            R"({"type": ["object", "null"], "properties": {"x": {"type": "number"}}})";
        CHECK(validate_against_schema("null", schema).empty());
        CHECK(validate_against_schema(R"({"x": 1.5})", schema).empty());
        CHECK(!validate_against_schema("3", schema).empty());
    }

    TEST_CASE("shipped schema file equals the embedded one") {
        CHECK(test_support::slurp(test_support::data_dir() + "/report.schema.json") ==
              report_schema_json());
    }
}

TEST_SUITE("cli.validate_init") {
    TEST_CASE("init scaffolds four files that validate") {
        TempDir dir;
        std::ostringstream out, err;
        const int code = cli::cmd_init({dir.file("scaffold"), false}, out, err);
        REQUIRE(code == cli::kExitOk);
        for (const char* name :
             {"quasar.json", "catalog.json", "model.json", "baseline.example.json"}) {
            CHECK(std::filesystem::exists(dir.file("scaffold") + "/" + name));
        }
        std::ostringstream vout, verr;
        CHECK(cli::cmd_validate({dir.file("scaffold") + "/quasar.json"}, vout, verr) ==
              cli::kExitOk);
    }

    TEST_CASE("init refuses to clobber without force") {
        TempDir dir;
        std::ostringstream out, err;
        REQUIRE(cli::cmd_init({dir.str(), false}, out, err) == cli::kExitOk);
        std::ostringstream out2, err2;
        CHECK(cli::cmd_init({dir.str(), false}, out2, err2) == cli::kExitFatal);
        CHECK(err2.str().find("already exists") != std::string::npos);
        std::ostringstream out3, err3;
        CHECK(cli::cmd_init({dir.str(), true}, out3, err3) == cli::kExitOk);
    }

    TEST_CASE("validate rejects a model with a bad weight sum") {
        TempDir dir;
        test_support::spit(dir.file("model.json"), R"({
            "id": "root",
            "children": [
                {"id": "a", "weight": 0.6, "metric": "criterion:0"},
                {"id": "b", "weight": 0.5, "metric": "criterion:1"}
            ]})");
        test_support::spit(dir.file("quasar.json"), R"({
            "keywords": ["architecture"],
            "provider": "stub",
            "providers": {"stub": {"endpoint": "stub://42"}},
            "model": ")" + dir.file("model.json") + R"("
        })");
        std::ostringstream out, err;
        CHECK(cli::cmd_validate({dir.file("quasar.json")}, out, err) == cli::kExitFatal);
        CHECK(err.str().find("WeightSumError") != std::string::npos);
    }

    TEST_CASE("validate rejects a catalog with duplicate ids") {
        TempDir dir;
        test_support::spit(dir.file("catalog.json"),
                           R"([{"id": 1, "statement": "a"}, {"id": 1, "statement": "b"}])");
        test_support::spit(dir.file("quasar.json"), R"({
            "keywords": ["architecture"],
            "provider": "stub",
            "providers": {"stub": {"endpoint": "stub://42"}},
            "catalog": ")" + dir.file("catalog.json") + R"("
        })");
        std::ostringstream out, err;
        CHECK(cli::cmd_validate({dir.file("quasar.json")}, out, err) == cli::kExitFatal);
        CHECK(err.str().find("DuplicateCriterionId") != std::string::npos);
    }
}

TEST_SUITE("cli.evaluate") {
    TEST_CASE("stub pipeline over the large fixture is clean and consistent") {
        TempDir dir;
        test_support::spit(dir.file("quasar.json"), stub_config_text(3));
        cli::EvaluateOptions options;
        options.source = test_support::fixture("large");
        options.config_path = dir.file("quasar.json");
        options.out_dir = dir.file("out");
        const auto result = run_evaluate(options);
        CHECK(result.exit_code == cli::kExitOk);

        const json report =
            json::parse(test_support::slurp(dir.file("out") + "/report.json"));
        CHECK(report["criteria"]["count"] == 25);
        CHECK(report["final"]["per_criterion"].size() == 25);
        CHECK(report["consistency"]["exact_match_fraction"] == 1.0);
        CHECK(report["consistency"]["run_count"] == 3);
        CHECK(report["corpus"]["keyword_counts"]["architecture"] == 11);
        CHECK(report["corpus"]["document_count"] == 4);
        CHECK(report["final"]["degraded"] == false);
        for (int i = 1; i <= 3; ++i) {
            CHECK(std::filesystem::exists(dir.file("out") + "/run-" + std::to_string(i) +
                                          ".json"));
        }
    }

    TEST_CASE("unreadable source fails fatally and names the path") {
        TempDir dir;
        test_support::spit(dir.file("quasar.json"), stub_config_text());
        cli::EvaluateOptions options;
        options.source = "/nonexistent/source/tree";
        options.config_path = dir.file("quasar.json");
        options.out_dir = dir.file("out");
        const auto result = run_evaluate(options);
        CHECK(result.exit_code == cli::kExitFatal);
        CHECK(result.err.find("/nonexistent/source/tree") != std::string::npos);
    }

    TEST_CASE("an all-failed criterion degrades the exit code and is listed") {
        TempDir dir;
        test_support::spit(dir.file("fx.json"), R"({"rules": [
            {"criterion": 4, "path": "*", "raw": "not parseable, ever"},
            {"criterion": "*", "path": "*", "relevant": true, "score": 3}]})");
        test_support::spit(dir.file("quasar.json"),
                           fixture_provider_config(dir.file("fx.json"), 2));
        cli::EvaluateOptions options;
        options.source = test_support::fixture("large");
        options.config_path = dir.file("quasar.json");
        options.out_dir = dir.file("out");
        const auto result = run_evaluate(options);
        CHECK(result.exit_code == cli::kExitDegraded);
        const json report =
            json::parse(test_support::slurp(dir.file("out") + "/report.json"));
        CHECK(report["final"]["no_result_criteria"] == json::array({4}));
        CHECK(report["final"]["degraded"] == true);
    }

    TEST_CASE("reports are byte-identical across invocations and worker limits") {
        TempDir dir;
        test_support::spit(dir.file("quasar.json"), stub_config_text(2));
        auto run_to = [&](const std::string& out_dir, int workers) {
            cli::EvaluateOptions options;
            options.source = test_support::fixture("large");
            options.config_path = dir.file("quasar.json");
            options.out_dir = dir.file(out_dir);
            options.workers = workers;
            REQUIRE(run_evaluate(options).exit_code == cli::kExitOk);
            return test_support::slurp(dir.file(out_dir) + "/report.json");
        };
        const std::string first = run_to("out1", 2);
        const std::string second = run_to("out2", 2);
        const std::string parallel = run_to("out3", 16);
        CHECK(first == second);
        CHECK(first == parallel);
    }

    TEST_CASE("emitted reports conform to the shipped schema and round-trip") {
        TempDir dir;
        test_support::spit(dir.file("quasar.json"), stub_config_text(1));
        cli::EvaluateOptions options;
        options.source = test_support::fixture("large");
        options.config_path = dir.file("quasar.json");
        options.out_dir = dir.file("out");
        REQUIRE(run_evaluate(options).exit_code == cli::kExitOk);
        const std::string report = test_support::slurp(dir.file("out") + "/report.json");
        const auto violations = validate_against_schema(report, report_schema_json());
        for (const auto& v : violations) {
            MESSAGE(v);
        }
        CHECK(violations.empty());
        CHECK(canonical_json(report) == report);
    }

    TEST_CASE("timings stay out of the report unless requested") {
        TempDir dir;
        test_support::spit(dir.file("quasar.json"), stub_config_text(1));
        cli::EvaluateOptions options;
        options.source = test_support::fixture("large");
        options.config_path = dir.file("quasar.json");
        options.out_dir = dir.file("out");
        options.include_timings = true;
        REQUIRE(run_evaluate(options).exit_code == cli::kExitOk);
        const json report =
            json::parse(test_support::slurp(dir.file("out") + "/report.json"));
        CHECK(report["timings"]["per_run"][0]["wall_clock_ms"].is_number());
        CHECK(report["timings"]["total_wall_clock_ms"].is_number());
        // Still schema-conforming with numbers in place of nulls.
        CHECK(validate_against_schema(report.dump(), report_schema_json()).empty());
    }
}

TEST_SUITE("cli.compare") {
    namespace {
    std::string evaluate_large(TempDir& dir, const std::string& out_name) {
        test_support::spit(dir.file("quasar.json"), stub_config_text(2));
        cli::EvaluateOptions options;
        options.source = test_support::fixture("large");
        options.config_path = dir.file("quasar.json");
        options.out_dir = dir.file(out_name);
        REQUIRE(run_evaluate(options).exit_code == cli::kExitOk);
        return dir.file(out_name) + "/report.json";
    }
    } // namespace

    TEST_CASE("identical machine and human scores print a zero average") {
        TempDir dir;
        // Script every (criterion, document) pair to 3, so every final
        // machine value is exactly 3; the baseline mirrors it.
        test_support::spit(dir.file("fx.json"), R"({"rules": [
            {"criterion": "*", "path": "*", "relevant": true, "score": 3}]})");
        test_support::spit(dir.file("quasar.json"),
                           fixture_provider_config(dir.file("fx.json"), 2));
        cli::EvaluateOptions eval;
        eval.source = test_support::fixture("large");
        eval.config_path = dir.file("quasar.json");
        eval.out_dir = dir.file("out");
        REQUIRE(run_evaluate(eval).exit_code == cli::kExitOk);
        const std::string report_path = dir.file("out") + "/report.json";

        json scores = json::object();
        for (int i = 0; i < 25; ++i) scores[std::to_string(i)] = 3;
        test_support::spit(dir.file("baseline.json"),
                           json{{"raters", json::array({json{{"id", "a"}, {"scores", scores}}})}}
                               .dump());
        std::ostringstream out, err;
        cli::CompareOptions options;
        options.report_path = report_path;
        options.baseline_path = dir.file("baseline.json");
        const int code = cli::cmd_compare(options, out, err);
        REQUIRE(code == cli::kExitOk);
        CHECK(out.str().find("average deviation: 0.0%") != std::string::npos);
        CHECK(out.str().find("agreement within 15%: 1") != std::string::npos);
    }

    TEST_CASE("the deviation fixture prints 25.0% with one exclusion") {
        TempDir dir;
        // Wrap the fixture's runs into a minimal report document.
        const json machine = json::parse(
            test_support::slurp(test_support::fixture("deviation/machine.json")));
        test_support::spit(dir.file("report.json"), machine.dump(2));
        std::ostringstream out, err;
        cli::CompareOptions options;
        options.report_path = dir.file("report.json");
        options.baseline_path = test_support::fixture("deviation/baseline.json");
        options.out_path = dir.file("augmented.json");
        const int code = cli::cmd_compare(options, out, err);
        REQUIRE(code == cli::kExitOk);
        CHECK(out.str().find("average deviation: 25.0%") != std::string::npos);
        CHECK(out.str().find("excluded") != std::string::npos);
        const json augmented = json::parse(test_support::slurp(dir.file("augmented.json")));
        CHECK(augmented["deviation"]["average_deviation_pct"] == 25.0);
        CHECK(augmented["deviation"]["excluded"] == json::array({3}));
    }

    TEST_CASE("a baseline missing a criterion is malformed and names it") {
        TempDir dir;
        const std::string report_path = evaluate_large(dir, "out");
        test_support::spit(dir.file("baseline.json"), R"({"raters": [{"id": "a",
            "scores": {"0": 1}}]})");
        std::ostringstream out, err;
        cli::CompareOptions options;
        options.report_path = report_path;
        options.baseline_path = dir.file("baseline.json");
        const int code = cli::cmd_compare(options, out, err);
        CHECK(code == cli::kExitFatal);
        CHECK(err.str().find("MalformedBaseline") != std::string::npos);
        CHECK(err.str().find("criterion 1") != std::string::npos);
    }
}
