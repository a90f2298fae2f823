#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace quasar {

enum class FileKind { markdown, plaintext, pdf, docx, image, other };

const char* file_kind_name(FileKind kind);

struct RawFile {
    std::string path; // repository-relative, forward slashes
    FileKind kind = FileKind::other;
    std::string bytes;
};

struct DocumentSet {
    std::vector<RawFile> files; // sorted by path, lexicographic byte order
    std::size_t ignored_count = 0;
};

struct ExternalConverter {
    std::string command;
    std::vector<std::string> args; // "{file}" expands to the input path
};

struct IngestConfig {
    std::vector<std::string> ignore_globs = {".git/**", ".hg/**", ".svn/**", "node_modules/**"};
    std::size_t max_file_size_bytes = 4 * 1024 * 1024;
    std::map<std::string, FileKind> extension_map = default_extension_map();

    static std::map<std::string, FileKind> default_extension_map();
};

struct ConvertConfig {
    std::optional<ExternalConverter> external_converter;
    int workers = 1;
};

struct ImageRef {
    std::string path;    // repository-relative path of the image file
    std::string caption; // alt text, possibly empty
};

enum class ConversionMode { native, external, skipped };

const char* conversion_mode_name(ConversionMode mode);

struct NormalizedDocument {
    std::string path;
    std::string text;
    std::vector<ImageRef> images;
    std::size_t char_count = 0; // always == text.size()
    ConversionMode conversion = ConversionMode::native;
};

struct ConversionOutcome {
    NormalizedDocument document;
    std::vector<std::string> warnings; // dangling image refs, converter failures
};

struct FilteredCorpus {
    std::vector<NormalizedDocument> documents;      // the passing subset, input order
    std::map<std::string, std::size_t> keyword_counts; // over ALL converted documents
    std::size_t excluded_count = 0;
    std::vector<std::string> warnings;
};

// Walks a local directory or clones a git URL and walks the clone.
// Files matching an ignore glob or exceeding the size cap are skipped
// (counted in ignored_count). Throws SourceNotFound, CloneFailed or
// EmptyCorpus.
DocumentSet ingest(const std::string& source, const IngestConfig& config);

bool looks_like_git_url(const std::string& source);

// Converts one non-image file to its text+images form. Markdown and
// plaintext convert natively; pdf/docx run through the configured
// external converter; anything else is skipped. Converter failures are
// downgraded to skipped with a warning. `origin` supplies the path set
// used to drop dangling image references.
ConversionOutcome convert(const RawFile& file, const ConvertConfig& config,
                          const DocumentSet& origin);

// Converts every non-image file of the set, in path order. Conversion of
// independent files may run on config.workers threads; output order is
// path order regardless.
std::vector<ConversionOutcome> convert_all(const DocumentSet& set, const ConvertConfig& config);

// Keyword filter over converted documents. A document passes when any
// keyword occurs at least once (case-insensitive, word-boundary) in its
// text or an image caption. keyword_counts totals span all input
// documents, passing or not.
FilteredCorpus filter_relevant(const std::vector<NormalizedDocument>& docs,
                               const std::vector<std::string>& keywords);

// Canonical JSON serialization; byte-identical for identical corpora.
std::string to_json(const FilteredCorpus& corpus);

// FNV-1a over the canonical serialization, as a 16-digit hex string.
std::string corpus_fingerprint(const FilteredCorpus& corpus);

} // namespace quasar
