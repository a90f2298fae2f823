#pragma once

#include "quasar/criteria.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace quasar {

struct ProviderConfig {
    std::string name;
    // http(s)://... hits an OpenAI-compatible chat-completion API.
    // stub://<seed> is the deterministic offline stub.
    // fixture://<path> replays scripted results from a fixture file.
    std::string endpoint;
    std::string model;
    std::string api_key_env; // environment variable holding the key; empty for none
    bool multimodal = false;
    double temperature = 0.0;
    double timeout_s = 60.0;
    int max_retries = 2;
    int max_inflight = 0;    // 0 = unlimited
    std::string log_dir;     // when set, one request/response file per call
};

struct RawCompletion {
    std::string text;
    double latency_ms = 0.0;
    std::int64_t prompt_tokens = -1;     // -1 when the backend reports none
    std::int64_t completion_tokens = -1;
};

// Identifies one provider call within an evaluation; lets fixture scripts
// key replies by run and by retry attempt.
struct CallContext {
    int run_index = 1; // 1-based
    int attempt = 1;   // 1-based
};

enum class OutcomeKind { Relevant, Irrelevant, Failed };

const char* outcome_kind_name(OutcomeKind kind);

struct FileCriterionResult {
    int criterion_id = 0;
    std::string document_path;
    OutcomeKind outcome = OutcomeKind::Failed;
    int score = -1;              // 0..4, meaningful only for Relevant
    std::string justification;   // empty for Failed
    std::string failure_reason;  // set only for Failed
    std::string raw_response;    // last verbatim reply text
    int attempts = 1;
};

// Image bytes for multimodal attachments, keyed by repository-relative
// path. Built from the ingested DocumentSet.
struct ImageStore {
    std::map<std::string, std::string> bytes_by_path;

    static ImageStore from_document_set(const DocumentSet& set);
};

class Provider {
public:
    virtual ~Provider() = default;

    const ProviderConfig& config() const { return config_; }

    // Validates that the provider can be called at all (e.g. the API key
    // variable is set). Throws AuthMissing.
    virtual void preflight() const {}

    // Sends one payload. Throws Timeout, HttpError, AuthMissing,
    // CapabilityMismatch or FixtureKeyMissing. Safe to call from
    // multiple threads.
    RawCompletion complete(const PromptPayload& payload, const CallContext& ctx);

protected:
    explicit Provider(ProviderConfig config) : config_(std::move(config)) {}
    virtual RawCompletion do_complete(const PromptPayload& payload, const CallContext& ctx) = 0;

private:
    void log_call(const PromptPayload& payload, const CallContext& ctx,
                  const RawCompletion& reply);
    void gate_enter();
    void gate_leave();

    ProviderConfig config_;
    std::mutex gate_mutex_;
    std::condition_variable gate_cv_;
    int in_flight_ = 0;
    std::atomic<std::uint64_t> log_sequence_{0};
};

// Dispatches on the endpoint scheme. `images` may be null for text-only
// use; the HTTP backend needs it to inline attachment bytes.
std::unique_ptr<Provider> make_provider(const ProviderConfig& config,
                                        const ImageStore* images = nullptr);

struct ParsedReply {
    bool relevant = false;
    int score = 0;
    std::string justification;
};

// Extracts the first structured {relevant, score, justification} object
// from a reply, tolerating surrounding prose and fenced code blocks.
// Throws ParseFailure when no valid object exists or the score is out of
// range.
ParsedReply parse_reply(const std::string& reply_text);

// Parses a raw completion into a per-file result. Throws ParseFailure.
FileCriterionResult parse_result(const RawCompletion& raw, int criterion_id,
                                 const std::string& document_path);

} // namespace quasar
