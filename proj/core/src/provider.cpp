#include "quasar/provider.hpp"

#include "quasar/errors.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <mutex>

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace quasar {

const char* outcome_kind_name(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::Relevant: return "relevant";
        case OutcomeKind::Irrelevant: return "irrelevant";
        case OutcomeKind::Failed: return "failed";
    }
    return "failed";
}

ImageStore ImageStore::from_document_set(const DocumentSet& set) {
    ImageStore store;
    for (const RawFile& f : set.files) {
        if (f.kind == FileKind::image) {
            store.bytes_by_path[f.path] = f.bytes;
        }
    }
    return store;
}

void Provider::gate_enter() {
    if (config_.max_inflight <= 0) return;
    std::unique_lock lock(gate_mutex_);
    gate_cv_.wait(lock, [&] { return in_flight_ < config_.max_inflight; });
    ++in_flight_;
}

void Provider::gate_leave() {
    if (config_.max_inflight <= 0) return;
    {
        std::lock_guard lock(gate_mutex_);
        --in_flight_;
    }
    gate_cv_.notify_one();
}

RawCompletion Provider::complete(const PromptPayload& payload, const CallContext& ctx) {
    if (!payload.attachments.empty() && !config_.multimodal) {
        throw Error(ErrorCode::CapabilityMismatch,
                    "payload carries " + std::to_string(payload.attachments.size()) +
                        " attachments but provider '" + config_.name + "' is text-only");
    }
    gate_enter();
    RawCompletion reply;
    try {
        reply = do_complete(payload, ctx);
    } catch (...) {
        gate_leave();
        throw;
    }
    gate_leave();
    if (!config_.log_dir.empty()) {
        log_call(payload, ctx, reply);
    }
    return reply;
}

void Provider::log_call(const PromptPayload& payload, const CallContext& ctx,
                        const RawCompletion& reply) {
    std::error_code ec;
    std::filesystem::create_directories(config_.log_dir, ec);
    const std::uint64_t seq = log_sequence_.fetch_add(1);
    ordered_json j{{"criterion_id", payload.criterion_id},
                   {"document_path", payload.document_path},
                   {"run_index", ctx.run_index},
                   {"attempt", ctx.attempt},
                   {"system_text", payload.system_text},
                   {"user_text", payload.user_text},
                   {"response", reply.text},
                   {"latency_ms", reply.latency_ms}};
    const std::string name = "call-" + std::to_string(seq) + "-c" +
                             std::to_string(payload.criterion_id) + "-r" +
                             std::to_string(ctx.run_index) + "-a" +
                             std::to_string(ctx.attempt) + ".json";
    try {
        util::write_file(util::join_path(config_.log_dir, name), j.dump(2));
    } catch (const Error&) {
        // Audit logging is best effort; never fail a call over it.
    }
}

namespace {

// Finds the end of the JSON object starting at `start` ('{'), honoring
// strings and escapes. Returns npos when unbalanced.
std::size_t find_object_end(const std::string& text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i;
        }
    }
    return std::string::npos;
}

} // namespace

ParsedReply parse_reply(const std::string& reply_text) {
    std::size_t pos = reply_text.find('{');
    while (pos != std::string::npos) {
        const std::size_t end = find_object_end(reply_text, pos);
        if (end == std::string::npos) break;
        json obj;
        bool parsed = false;
        try {
            obj = json::parse(reply_text.substr(pos, end - pos + 1));
            parsed = true;
        } catch (const json::exception&) {
        }
        if (parsed && obj.is_object() && obj.contains("relevant") &&
            obj["relevant"].is_boolean()) {
            ParsedReply out;
            out.relevant = obj["relevant"].get<bool>();
            if (obj.contains("justification") && obj["justification"].is_string()) {
                out.justification = obj["justification"].get<std::string>();
            }
            if (!out.relevant) {
                out.score = 0;
                return out;
            }
            if (!obj.contains("score") || !obj["score"].is_number_integer()) {
                throw Error(ErrorCode::ParseFailure,
                            "structured object lacks an integer score");
            }
            const auto score = obj["score"].get<std::int64_t>();
            if (score < 0 || score > 4) {
                throw Error(ErrorCode::ParseFailure,
                            "score " + std::to_string(score) + " outside 0..4");
            }
            out.score = static_cast<int>(score);
            return out;
        }
        pos = reply_text.find('{', pos + 1);
    }
    throw Error(ErrorCode::ParseFailure, "no structured object found in reply");
}

FileCriterionResult parse_result(const RawCompletion& raw, int criterion_id,
                                 const std::string& document_path) {
    const ParsedReply reply = parse_reply(raw.text);
    FileCriterionResult result;
    result.criterion_id = criterion_id;
    result.document_path = document_path;
    result.raw_response = raw.text;
    result.justification = reply.justification;
    if (reply.relevant) {
        result.outcome = OutcomeKind::Relevant;
        result.score = reply.score;
    } else {
        result.outcome = OutcomeKind::Irrelevant;
        result.score = -1;
    }
    return result;
}

} // namespace quasar
