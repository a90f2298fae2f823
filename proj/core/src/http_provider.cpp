#include "providers_internal.hpp"

#include "quasar/errors.hpp"

#ifdef QUASAR_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace quasar::detail {

namespace {

constexpr const char* kDefaultPath = "/v1/chat/completions";

struct SplitUrl {
    std::string base; // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::MalformedConfig, "endpoint lacks a scheme: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.base = endpoint;
        out.path = kDefaultPath;
    } else {
        out.base = endpoint.substr(0, path_start);
        out.path = endpoint.substr(path_start);
        if (out.path == "/") out.path = kDefaultPath;
    }
    return out;
}

std::string base64_encode(const std::string& data) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < data.size()) {
        const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                           (static_cast<unsigned char>(data[i + 1]) << 8) |
                           static_cast<unsigned char>(data[i + 2]);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += alphabet[v & 63];
        i += 3;
    }
    if (i + 1 == data.size()) {
        const unsigned v = static_cast<unsigned char>(data[i]) << 16;
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == data.size()) {
        const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                           (static_cast<unsigned char>(data[i + 1]) << 8);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::string mime_for(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "png") return "image/png";
    if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
    if (ext == "gif") return "image/gif";
    if (ext == "bmp") return "image/bmp";
    if (ext == "webp") return "image/webp";
    return "application/octet-stream";
}

bool is_svg(const std::string& path) {
    return path.size() > 4 && path.compare(path.size() - 4, 4, ".svg") == 0;
}

// OpenAI-compatible chat-completion client. One request shape serves
// both locally hosted and cloud backends; only the endpoint URL varies.
class HttpProvider final : public Provider {
public:
    HttpProvider(ProviderConfig config, const ImageStore* images)
        : Provider(std::move(config)), images_(images), url_(split_url(this->config().endpoint)) {
#ifndef QUASAR_WITH_TLS
        if (this->config().endpoint.rfind("https://", 0) == 0) {
            throw Error(ErrorCode::MalformedConfig,
                        "built without TLS support, https endpoints are unavailable");
        }
#endif
    }

    void preflight() const override {
        resolve_api_key();
    }

protected:
    RawCompletion do_complete(const PromptPayload& payload, const CallContext&) override {
        const std::string key = resolve_api_key();

        httplib::Client client(url_.base);
        const auto timeout = std::chrono::milliseconds(
            static_cast<long long>(std::max(0.001, config().timeout_s) * 1000.0));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);

        httplib::Headers headers;
        if (!key.empty()) {
            headers.emplace("Authorization", "Bearer " + key);
        }

        const auto start = std::chrono::steady_clock::now();
        const auto result =
            client.Post(url_.path, headers, build_body(payload), "application/json");
        const auto elapsed = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();

        if (!result) {
            throw Error(ErrorCode::Timeout,
                        "no response from " + config().endpoint + " (" +
                            httplib::to_string(result.error()) + ")");
        }
        if (result->status != 200) {
            throw Error(ErrorCode::HttpError,
                        "status " + std::to_string(result->status) + " from " +
                            config().endpoint + ": " + result->body.substr(0, 512));
        }
        return extract_completion(result->body, elapsed);
    }

private:
    std::string resolve_api_key() const {
        if (config().api_key_env.empty()) return {};
        const char* value = std::getenv(config().api_key_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw Error(ErrorCode::AuthMissing,
                        "environment variable " + config().api_key_env + " is not set");
        }
        return value;
    }

    std::string build_body(const PromptPayload& payload) const {
        ordered_json messages = ordered_json::array();
        messages.push_back({{"role", "system"}, {"content", payload.system_text}});
        if (payload.attachments.empty()) {
            messages.push_back({{"role", "user"}, {"content", payload.user_text}});
        } else {
            ordered_json parts = ordered_json::array();
            parts.push_back({{"type", "text"}, {"text", payload.user_text}});
            for (const ImageRef& img : payload.attachments) {
                const std::string* bytes = nullptr;
                if (images_ != nullptr) {
                    const auto it = images_->bytes_by_path.find(img.path);
                    if (it != images_->bytes_by_path.end()) bytes = &it->second;
                }
                if (bytes == nullptr) {
                    parts.push_back({{"type", "text"},
                                     {"text", "[image unavailable: " + img.path + "]"}});
                } else if (is_svg(img.path)) {
                    parts.push_back(
                        {{"type", "text"}, {"text", "[image " + img.path + "]\n" + *bytes}});
                } else {
                    const std::string url = "data:" + mime_for(img.path) + ";base64," +
                                            base64_encode(*bytes);
                    parts.push_back(
                        {{"type", "image_url"}, {"image_url", ordered_json{{"url", url}}}});
                }
            }
            messages.push_back({{"role", "user"}, {"content", std::move(parts)}});
        }
        ordered_json body{{"model", config().model},
                          {"temperature", config().temperature},
                          {"messages", std::move(messages)}};
        return body.dump();
    }

    static RawCompletion extract_completion(const std::string& body, double latency_ms) {
        json parsed;
        try {
            parsed = json::parse(body);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::HttpError,
                        std::string("response body is not JSON: ") + e.what());
        }
        RawCompletion out;
        out.latency_ms = latency_ms;
        try {
            out.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception&) {
            throw Error(ErrorCode::HttpError,
                        "response lacks choices[0].message.content: " + body.substr(0, 512));
        }
        if (parsed.contains("usage") && parsed["usage"].is_object()) {
            const auto& usage = parsed["usage"];
            if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number()) {
                out.prompt_tokens = usage["prompt_tokens"].get<std::int64_t>();
            }
            if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number()) {
                out.completion_tokens = usage["completion_tokens"].get<std::int64_t>();
            }
        }
        return out;
    }

    const ImageStore* images_;
    SplitUrl url_;
};

} // namespace

std::unique_ptr<Provider> make_http_provider(const ProviderConfig& config,
                                             const ImageStore* images) {
    return std::make_unique<HttpProvider>(config, images);
}

} // namespace quasar::detail

namespace quasar {

std::unique_ptr<Provider> make_provider(const ProviderConfig& config, const ImageStore* images) {
    if (config.endpoint.rfind("stub://", 0) == 0) {
        return detail::make_stub_provider(config);
    }
    if (config.endpoint.rfind("fixture://", 0) == 0) {
        return detail::make_fixture_provider(config);
    }
    if (config.endpoint.rfind("http://", 0) == 0 || config.endpoint.rfind("https://", 0) == 0) {
        return detail::make_http_provider(config, images);
    }
    throw Error(ErrorCode::MalformedConfig,
                "unsupported endpoint scheme in '" + config.endpoint +
                    "' (expected http(s)://, stub:// or fixture://)");
}

} // namespace quasar
