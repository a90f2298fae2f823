#include "quasar/config.hpp"

#include "embedded_data.hpp"
#include "quasar/engine.hpp"
#include "quasar/errors.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace quasar {

namespace {

FileKind kind_from_name(const std::string& name) {
    if (name == "markdown") return FileKind::markdown;
    if (name == "plaintext") return FileKind::plaintext;
    if (name == "pdf") return FileKind::pdf;
    if (name == "docx") return FileKind::docx;
    if (name == "image") return FileKind::image;
    if (name == "other") return FileKind::other;
    throw Error(ErrorCode::MalformedConfig, "unknown file kind '" + name + "'");
}

void parse_ingest(const json& j, IngestConfig& ingest) {
    if (j.contains("ignore")) {
        if (!j["ignore"].is_array()) {
            throw Error(ErrorCode::MalformedConfig, "ingest.ignore must be an array");
        }
        ingest.ignore_globs = j["ignore"].get<std::vector<std::string>>();
    }
    if (j.contains("max_file_size_bytes")) {
        const auto v = j["max_file_size_bytes"].get<std::int64_t>();
        if (v <= 0) {
            throw Error(ErrorCode::MalformedConfig, "max_file_size_bytes must be positive");
        }
        ingest.max_file_size_bytes = static_cast<std::size_t>(v);
    }
    if (j.contains("extensions")) {
        if (!j["extensions"].is_object()) {
            throw Error(ErrorCode::MalformedConfig, "ingest.extensions must be an object");
        }
        ingest.extension_map.clear();
        for (const auto& [kind_name, exts] : j["extensions"].items()) {
            const FileKind kind = kind_from_name(kind_name);
            for (const auto& ext : exts) {
                ingest.extension_map[util::ascii_lower(ext.get<std::string>())] = kind;
            }
        }
    }
}

ProviderConfig parse_provider(const std::string& name, const json& j) {
    ProviderConfig p;
    p.name = name;
    if (!j.is_object() || !j.contains("endpoint") || !j["endpoint"].is_string()) {
        throw Error(ErrorCode::MalformedConfig,
                    "provider '" + name + "' needs a string 'endpoint'");
    }
    p.endpoint = j["endpoint"].get<std::string>();
    p.model = j.value("model", std::string{});
    p.api_key_env = j.value("api_key_env", std::string{});
    p.multimodal = j.value("multimodal", false);
    p.temperature = j.value("temperature", 0.0);
    p.timeout_s = j.value("timeout_s", 60.0);
    p.max_retries = j.value("max_retries", 2);
    p.max_inflight = j.value("max_inflight", 0);
    p.log_dir = j.value("log_dir", std::string{});
    if (p.temperature < 0.0) {
        throw Error(ErrorCode::MalformedConfig,
                    "provider '" + name + "': temperature must be >= 0");
    }
    if (p.timeout_s <= 0.0) {
        throw Error(ErrorCode::MalformedConfig,
                    "provider '" + name + "': timeout_s must be > 0");
    }
    if (p.max_retries < 0) {
        throw Error(ErrorCode::MalformedConfig,
                    "provider '" + name + "': max_retries must be >= 0");
    }
    return p;
}

} // namespace

ToolConfig config_from_json(const std::string& json_text) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedConfig, e.what());
    }
    if (!parsed.is_object()) {
        throw Error(ErrorCode::MalformedConfig, "config must be a JSON object");
    }
    ToolConfig config;
    if (parsed.contains("ingest")) parse_ingest(parsed["ingest"], config.ingest);
    if (parsed.contains("convert") && parsed["convert"].is_object()) {
        const auto& conv = parsed["convert"];
        if (conv.contains("external_converter") && conv["external_converter"].is_object()) {
            const auto& ec = conv["external_converter"];
            config.external_converter.command = ec.value("command", std::string{});
            if (ec.contains("args")) {
                config.external_converter.args = ec["args"].get<std::vector<std::string>>();
            }
        }
    }
    if (parsed.contains("keywords")) {
        config.keywords = parsed["keywords"].get<std::vector<std::string>>();
    }
    if (config.keywords.empty()) {
        throw Error(ErrorCode::MalformedConfig, "config needs a nonempty 'keywords' list");
    }
    if (!parsed.contains("providers") || !parsed["providers"].is_object() ||
        parsed["providers"].empty()) {
        throw Error(ErrorCode::MalformedConfig, "config needs a nonempty 'providers' object");
    }
    for (const auto& [name, p] : parsed["providers"].items()) {
        config.providers[name] = parse_provider(name, p);
    }
    if (!parsed.contains("provider") || !parsed["provider"].is_string()) {
        throw Error(ErrorCode::MalformedConfig, "config needs a selected 'provider' name");
    }
    config.selected_provider = parsed["provider"].get<std::string>();
    if (!config.providers.count(config.selected_provider)) {
        throw Error(ErrorCode::MalformedConfig,
                    "selected provider '" + config.selected_provider +
                        "' is not defined under 'providers'");
    }
    config.catalog_source = parsed.value("catalog", std::string("builtin"));
    config.model_source = parsed.value("model", std::string("builtin"));
    config.aggregator = parsed.value("aggregator", std::string("mean"));
    aggregator_from_name(config.aggregator); // validates
    config.runs = parsed.value("runs", 3);
    config.workers = parsed.value("workers", 4);
    if (config.runs < 1) {
        throw Error(ErrorCode::MalformedConfig, "runs must be >= 1");
    }
    if (config.workers < 1) {
        throw Error(ErrorCode::MalformedConfig, "workers must be >= 1");
    }
    if (parsed.contains("char_budget")) {
        const auto v = parsed["char_budget"].get<std::int64_t>();
        if (v < 256) {
            throw Error(ErrorCode::MalformedConfig, "char_budget must be at least 256");
        }
        config.char_budget = static_cast<std::size_t>(v);
    }
    config.max_images = parsed.value("max_images", 8);
    if (config.max_images < 0) {
        throw Error(ErrorCode::MalformedConfig, "max_images must be >= 0");
    }
    if (parsed.contains("doc_volume_target_chars")) {
        const auto v = parsed["doc_volume_target_chars"].get<std::int64_t>();
        if (v < 1) {
            throw Error(ErrorCode::MalformedConfig, "doc_volume_target_chars must be >= 1");
        }
        config.doc_volume_target_chars = static_cast<std::size_t>(v);
    }
    config.agreement_threshold_pct = parsed.value("agreement_threshold_pct", 15.0);
    if (config.agreement_threshold_pct < 0.0 || config.agreement_threshold_pct > 100.0) {
        throw Error(ErrorCode::MalformedConfig, "agreement_threshold_pct must be in [0,100]");
    }
    config.output_dir = parsed.value("output_dir", std::string("quasar-out"));
    return config;
}

ToolConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = util::read_file(path);
    } catch (...) {
        throw Error(ErrorCode::MalformedConfig, "cannot read config file " + path);
    }
    return config_from_json(text);
}

std::string default_config_json() {
    return std::string(embedded::default_config_json());
}

std::string canonical_config_json(const ToolConfig& config) {
    ordered_json extensions = ordered_json::object();
    // Group the extension map back by kind, in enum order.
    for (const FileKind kind : {FileKind::markdown, FileKind::plaintext, FileKind::pdf,
                                FileKind::docx, FileKind::image, FileKind::other}) {
        ordered_json exts = ordered_json::array();
        for (const auto& [ext, k] : config.ingest.extension_map) {
            if (k == kind) exts.push_back(ext);
        }
        if (!exts.empty()) extensions[file_kind_name(kind)] = std::move(exts);
    }
    ordered_json providers = ordered_json::object();
    for (const auto& [name, p] : config.providers) {
        providers[name] = ordered_json{{"endpoint", p.endpoint},
                                       {"model", p.model},
                                       {"api_key_env", p.api_key_env},
                                       {"multimodal", p.multimodal},
                                       {"temperature", p.temperature},
                                       {"timeout_s", p.timeout_s},
                                       {"max_retries", p.max_retries},
                                       {"max_inflight", p.max_inflight},
                                       {"log_dir", p.log_dir}};
    }
    ordered_json j{
        {"ingest", ordered_json{{"ignore", config.ingest.ignore_globs},
                                {"max_file_size_bytes", config.ingest.max_file_size_bytes},
                                {"extensions", std::move(extensions)}}},
        {"convert",
         ordered_json{{"external_converter",
                       config.external_converter.command.empty()
                           ? ordered_json(nullptr)
                           : ordered_json{{"command", config.external_converter.command},
                                          {"args", config.external_converter.args}}}}},
        {"keywords", config.keywords},
        {"provider", config.selected_provider},
        {"providers", std::move(providers)},
        {"catalog", config.catalog_source},
        {"model", config.model_source},
        {"aggregator", config.aggregator},
        {"runs", config.runs},
        {"char_budget", config.char_budget},
        {"max_images", config.max_images},
        {"doc_volume_target_chars", config.doc_volume_target_chars},
        {"agreement_threshold_pct", config.agreement_threshold_pct}};
    return j.dump(2);
}

std::string config_digest(const ToolConfig& config) {
    return util::to_hex(util::fnv1a64(canonical_config_json(config)));
}

const ProviderConfig& selected_provider(const ToolConfig& config) {
    const auto it = config.providers.find(config.selected_provider);
    if (it == config.providers.end()) {
        throw Error(ErrorCode::MalformedConfig,
                    "selected provider '" + config.selected_provider + "' is not defined");
    }
    return it->second;
}

} // namespace quasar
