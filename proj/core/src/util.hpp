#pragma once

// Internal helpers shared by the core modules. Not installed.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quasar::util {

// FNV-1a, used for corpus/config fingerprints and the stub provider hash.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t value);

std::string ascii_lower(std::string_view s);

// Case-insensitive, word-boundary-anchored occurrence count of `needle`
// in `haystack`. Boundaries are non-alphanumeric characters or the string
// edges; matches do not overlap.
std::size_t count_word_occurrences(std::string_view haystack, std::string_view needle);

std::string trim(std::string_view s);

// Glob match with `*` (within a path segment), `?`, and `**` (across
// segments). Paths use forward slashes. A pattern ending in `/` matches
// everything under that directory.
bool glob_match(std::string_view pattern, std::string_view path);

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs argv[0] with the given arguments, capturing stdout/stderr.
// No shell is involved. Throws quasar::Error(Io) if the process cannot
// be spawned at all.
CommandResult run_command(const std::vector<std::string>& argv);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::string join_path(std::string_view dir, std::string_view name);

} // namespace quasar::util
