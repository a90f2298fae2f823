#pragma once

#include <iosfwd>
#include <string>

namespace quasar::cli {

// Exit codes: 0 success, 1 fatal error, 2 pipeline degradation (at least
// one criterion ended NoResult).
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitDegraded = 2;

struct EvaluateOptions {
    std::string source;
    std::string config_path = "./quasar.json";
    std::string provider;  // overrides the config's selection when set
    int runs = 0;          // 0 = take from config
    int workers = 0;       // 0 = take from config
    std::string out_dir;   // overrides config output_dir when set
    std::string catalog;   // overrides config catalog when set
    std::string model;     // overrides config model when set
    bool include_timings = false;
};

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);

struct CompareOptions {
    std::string report_path;
    std::string baseline_path;
    double threshold_pct = -1.0; // <0 = use the default of 15%
    std::string out_path;        // default: <report>-with-deviation.json
};

int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err);

struct ValidateOptions {
    std::string config_path = "./quasar.json";
};

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);

struct InitOptions {
    std::string dir = ".";
    bool force = false;
};

int cmd_init(const InitOptions& options, std::ostream& out, std::ostream& err);

} // namespace quasar::cli
