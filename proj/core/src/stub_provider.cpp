#include "providers_internal.hpp"

#include "quasar/errors.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace quasar::detail {

namespace {

std::string reply_json(bool relevant, int score, const std::string& justification) {
    ordered_json j{{"relevant", relevant}, {"score", score}, {"justification", justification}};
    return j.dump();
}

// Offline stand-in: relevance and score are a pure hash of
// (seed, criterion_id, document_path), so repeated runs agree exactly.
class StubProvider final : public Provider {
public:
    StubProvider(ProviderConfig config, std::uint64_t seed)
        : Provider(std::move(config)), seed_(seed) {}

protected:
    RawCompletion do_complete(const PromptPayload& payload, const CallContext&) override {
        const std::string key = std::to_string(seed_) + "|" +
                                std::to_string(payload.criterion_id) + "|" +
                                payload.document_path;
        const std::uint64_t h = util::fnv1a64(key);
        const bool relevant = (h % 10) < 8;
        const int score = static_cast<int>((h >> 8) % 5);
        RawCompletion out;
        if (relevant) {
            out.text = reply_json(true, score,
                                  "stub assessment " + util::to_hex(h).substr(0, 8) +
                                      " for " + payload.document_path);
        } else {
            out.text = reply_json(false, 0, "stub found no relevant content in " +
                                                payload.document_path);
        }
        return out;
    }

private:
    std::uint64_t seed_;
};

struct FixtureRule {
    bool any_criterion = false;
    int criterion_id = 0;
    bool any_path = false;
    std::string path;
    int run = 0; // 0 = any run
    std::vector<std::string> replies_by_attempt; // last entry repeats
};

// Replays scripted replies from a fixture file. Rules are matched in file
// order, first match wins, so specific entries go before wildcards.
class FixtureProvider final : public Provider {
public:
    FixtureProvider(ProviderConfig config, std::vector<FixtureRule> rules)
        : Provider(std::move(config)), rules_(std::move(rules)) {}

protected:
    RawCompletion do_complete(const PromptPayload& payload, const CallContext& ctx) override {
        for (const FixtureRule& rule : rules_) {
            if (!rule.any_criterion && rule.criterion_id != payload.criterion_id) continue;
            if (!rule.any_path && rule.path != payload.document_path) continue;
            if (rule.run != 0 && rule.run != ctx.run_index) continue;
            const std::size_t idx = std::min<std::size_t>(
                static_cast<std::size_t>(ctx.attempt > 0 ? ctx.attempt - 1 : 0),
                rule.replies_by_attempt.size() - 1);
            RawCompletion out;
            out.text = rule.replies_by_attempt[idx];
            return out;
        }
        throw Error(ErrorCode::FixtureKeyMissing,
                    "no fixture rule for criterion " + std::to_string(payload.criterion_id) +
                        ", document " + payload.document_path + ", run " +
                        std::to_string(ctx.run_index));
    }

private:
    std::vector<FixtureRule> rules_;
};

std::string entry_to_reply(const json& entry) {
    if (entry.contains("raw")) {
        if (!entry["raw"].is_string()) {
            throw Error(ErrorCode::MalformedConfig, "fixture 'raw' must be a string");
        }
        return entry["raw"].get<std::string>();
    }
    const bool relevant = entry.value("relevant", true);
    if (!relevant) {
        return reply_json(false, 0, entry.value("justification", "scripted: not relevant"));
    }
    if (!entry.contains("score") || !entry["score"].is_number_integer()) {
        throw Error(ErrorCode::MalformedConfig,
                    "fixture entry needs an integer 'score' when relevant");
    }
    return reply_json(true, entry["score"].get<int>(),
                      entry.value("justification", "scripted result"));
}

std::vector<FixtureRule> parse_fixture(const std::string& path) {
    json parsed;
    try {
        parsed = json::parse(util::read_file(path));
    } catch (const Error&) {
        throw Error(ErrorCode::MalformedConfig, "cannot read fixture file " + path);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedConfig,
                    "fixture file " + path + " is not valid JSON: " + e.what());
    }
    if (!parsed.is_object() || !parsed.contains("rules") || !parsed["rules"].is_array()) {
        throw Error(ErrorCode::MalformedConfig,
                    "fixture file " + path + " needs a top-level 'rules' array");
    }
    std::vector<FixtureRule> rules;
    for (const json& r : parsed["rules"]) {
        FixtureRule rule;
        if (!r.contains("criterion") || !r.contains("path")) {
            throw Error(ErrorCode::MalformedConfig,
                        "fixture rule needs 'criterion' and 'path'");
        }
        if (r["criterion"].is_string() && r["criterion"].get<std::string>() == "*") {
            rule.any_criterion = true;
        } else if (r["criterion"].is_number_integer()) {
            rule.criterion_id = r["criterion"].get<int>();
        } else {
            throw Error(ErrorCode::MalformedConfig, "'criterion' must be an integer or \"*\"");
        }
        if (r["path"].is_string()) {
            const auto p = r["path"].get<std::string>();
            rule.any_path = p == "*";
            rule.path = p;
        } else {
            throw Error(ErrorCode::MalformedConfig, "'path' must be a string");
        }
        if (r.contains("run")) {
            rule.run = r["run"].get<int>();
        }
        if (r.contains("attempts")) {
            if (!r["attempts"].is_array() || r["attempts"].empty()) {
                throw Error(ErrorCode::MalformedConfig,
                            "'attempts' must be a nonempty array");
            }
            for (const json& a : r["attempts"]) {
                rule.replies_by_attempt.push_back(entry_to_reply(a));
            }
        } else {
            rule.replies_by_attempt.push_back(entry_to_reply(r));
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

} // namespace

std::unique_ptr<Provider> make_stub_provider(const ProviderConfig& config) {
    const std::string seed_text = config.endpoint.substr(std::string("stub://").size());
    std::uint64_t seed = 0;
    if (!seed_text.empty()) {
        try {
            seed = std::stoull(seed_text);
        } catch (...) {
            seed = util::fnv1a64(seed_text); // allow symbolic seeds
        }
    }
    return std::make_unique<StubProvider>(config, seed);
}

std::unique_ptr<Provider> make_fixture_provider(const ProviderConfig& config) {
    const std::string path = config.endpoint.substr(std::string("fixture://").size());
    return std::make_unique<FixtureProvider>(config, parse_fixture(path));
}

} // namespace quasar::detail
