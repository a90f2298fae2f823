#pragma once

#include "quasar/corpus.hpp"
#include "quasar/provider.hpp"

#include <map>
#include <string>
#include <vector>

namespace quasar {

struct ToolConfig {
    IngestConfig ingest;
    ExternalConverter external_converter; // empty command = none configured
    std::vector<std::string> keywords;
    std::map<std::string, ProviderConfig> providers;
    std::string selected_provider;
    std::string catalog_source = "builtin";
    std::string model_source = "builtin";
    std::string aggregator = "mean";
    int runs = 3;
    int workers = 4;
    std::size_t char_budget = 24000;
    int max_images = 8;
    std::size_t doc_volume_target_chars = 20000;
    double agreement_threshold_pct = 15.0;
    std::string output_dir = "quasar-out";
};

// Throws MalformedConfig on structural problems (missing provider,
// runs < 1, unknown aggregator, ...).
ToolConfig config_from_json(const std::string& json_text);
ToolConfig load_config(const std::string& path);

std::string default_config_json();

// Deterministic re-serialization of the evaluation-relevant settings;
// whitespace and key order of the input file do not affect it, nor do
// execution details that cannot change results (output_dir, workers).
std::string canonical_config_json(const ToolConfig& config);

// FNV-1a hex digest of the canonical form.
std::string config_digest(const ToolConfig& config);

const ProviderConfig& selected_provider(const ToolConfig& config);

} // namespace quasar
