#include "quasar/corpus.hpp"

#include "quasar/errors.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <stdlib.h>
#include <unistd.h>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace quasar {

const char* file_kind_name(FileKind kind) {
    switch (kind) {
        case FileKind::markdown: return "markdown";
        case FileKind::plaintext: return "plaintext";
        case FileKind::pdf: return "pdf";
        case FileKind::docx: return "docx";
        case FileKind::image: return "image";
        case FileKind::other: return "other";
    }
    return "other";
}

const char* conversion_mode_name(ConversionMode mode) {
    switch (mode) {
        case ConversionMode::native: return "native";
        case ConversionMode::external: return "external";
        case ConversionMode::skipped: return "skipped";
    }
    return "skipped";
}

std::map<std::string, FileKind> IngestConfig::default_extension_map() {
    return {
        {".md", FileKind::markdown},
        {".markdown", FileKind::markdown},
        {".mdown", FileKind::markdown},
        {".txt", FileKind::plaintext},
        {".rst", FileKind::plaintext},
        {".adoc", FileKind::plaintext},
        {".pdf", FileKind::pdf},
        {".docx", FileKind::docx},
        {".png", FileKind::image},
        {".jpg", FileKind::image},
        {".jpeg", FileKind::image},
        {".gif", FileKind::image},
        {".svg", FileKind::image},
        {".bmp", FileKind::image},
        {".webp", FileKind::image},
    };
}

bool looks_like_git_url(const std::string& source) {
    for (const char* prefix : {"http://", "https://", "git://", "ssh://", "file://"}) {
        if (source.rfind(prefix, 0) == 0) return true;
    }
    return source.rfind("git@", 0) == 0;
}

namespace {

FileKind classify(const std::string& path, const std::map<std::string, FileKind>& ext_map) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return FileKind::other;
    const std::string ext = util::ascii_lower(path.substr(dot));
    const auto it = ext_map.find(ext);
    return it == ext_map.end() ? FileKind::other : it->second;
}

bool is_ignored(const std::string& rel_path, const std::vector<std::string>& globs) {
    return std::any_of(globs.begin(), globs.end(), [&](const std::string& g) {
        return util::glob_match(g, rel_path);
    });
}

std::string relative_slash_path(const fs::path& root, const fs::path& p) {
    std::string rel = p.lexically_relative(root).generic_string();
    return rel;
}

DocumentSet walk_directory(const fs::path& root, const IngestConfig& config) {
    DocumentSet set;
    for (auto it = fs::recursive_directory_iterator(
             root, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        const std::string rel = relative_slash_path(root, it->path());
        if (is_ignored(rel, config.ignore_globs)) {
            ++set.ignored_count;
            continue;
        }
        std::error_code ec;
        const auto size = fs::file_size(it->path(), ec);
        if (ec || size > config.max_file_size_bytes) {
            ++set.ignored_count;
            continue;
        }
        RawFile file;
        file.path = rel;
        file.kind = classify(rel, config.extension_map);
        file.bytes = util::read_file(it->path().string());
        set.files.push_back(std::move(file));
    }
    std::sort(set.files.begin(), set.files.end(),
              [](const RawFile& a, const RawFile& b) { return a.path < b.path; });
    if (set.files.empty()) {
        throw Error(ErrorCode::EmptyCorpus,
                    "no files under " + root.string() + " after ignore rules");
    }
    return set;
}

DocumentSet clone_and_walk(const std::string& url, const IngestConfig& config) {
    std::string tmpl = (fs::temp_directory_path() / "quasar-clone-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) {
        throw Error(ErrorCode::Io, "cannot create temporary clone directory");
    }
    const std::string dir(buf.data());
    const auto result =
        util::run_command({"git", "clone", "--depth", "1", "--quiet", url, dir});
    if (result.exit_code != 0) {
        throw Error(ErrorCode::CloneFailed,
                    "git clone of " + url + " exited with " +
                        std::to_string(result.exit_code) + " (clone dir retained at " + dir +
                        "): " + util::trim(result.err));
    }
    DocumentSet set;
    try {
        set = walk_directory(dir, config);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(dir, ec);
        throw;
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    return set;
}

} // namespace

DocumentSet ingest(const std::string& source, const IngestConfig& config) {
    if (looks_like_git_url(source)) {
        return clone_and_walk(source, config);
    }
    const fs::path root(source);
    if (!fs::exists(root) || !fs::is_directory(root)) {
        throw Error(ErrorCode::SourceNotFound, source + " is not a directory or git URL");
    }
    return walk_directory(root, config);
}

namespace {

// Resolves `target` relative to the directory of `doc_path`, collapsing
// "." and ".." segments. Returns empty when the target escapes the root
// or carries a URL scheme.
std::string resolve_ref(const std::string& doc_path, std::string target) {
    if (const auto hash = target.find('#'); hash != std::string::npos) {
        target.resize(hash);
    }
    if (target.empty()) return {};
    if (target.find("://") != std::string::npos || target.rfind("data:", 0) == 0 ||
        target.rfind("mailto:", 0) == 0) {
        return {};
    }
    std::string base;
    if (const auto slash = doc_path.find_last_of('/'); slash != std::string::npos) {
        base = doc_path.substr(0, slash);
    }
    std::string combined = target.front() == '/' ? target.substr(1)
                           : base.empty()        ? target
                                                 : base + "/" + target;
    std::vector<std::string> out;
    std::stringstream ss(combined);
    std::string seg;
    while (std::getline(ss, seg, '/')) {
        if (seg.empty() || seg == ".") continue;
        if (seg == "..") {
            if (out.empty()) return {}; // escapes the corpus root
            out.pop_back();
            continue;
        }
        out.push_back(seg);
    }
    std::string result;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i) result += '/';
        result += out[i];
    }
    return result;
}

struct MarkdownResult {
    std::string text;
    std::vector<std::pair<std::string, std::string>> images; // (target, alt)
};

// Light markdown pass: pulls out ![alt](target) references (alt text
// stays in the output), rewrites [text](target) as "text (target)" so
// link targets survive, and strips ATX heading markers.
MarkdownResult strip_markdown(const std::string& src) {
    MarkdownResult result;
    std::string& out = result.text;
    out.reserve(src.size());
    bool at_line_start = true;
    std::size_t i = 0;
    const std::size_t n = src.size();
    while (i < n) {
        const char c = src[i];
        if (at_line_start && c == '#') {
            std::size_t j = i;
            while (j < n && src[j] == '#' && j - i < 6) ++j;
            if (j < n && (src[j] == ' ' || src[j] == '\t')) {
                i = j + 1;
                at_line_start = false;
                continue;
            }
        }
        const bool is_image = c == '!' && i + 1 < n && src[i + 1] == '[';
        if (c == '[' || is_image) {
            const std::size_t open = is_image ? i + 1 : i;
            std::size_t close = open + 1;
            int depth = 1;
            while (close < n && depth > 0) {
                if (src[close] == '[') ++depth;
                else if (src[close] == ']') --depth;
                if (depth) ++close;
            }
            if (close < n && close + 1 < n && src[close + 1] == '(') {
                std::size_t paren = close + 2;
                int pdepth = 1;
                while (paren < n && pdepth > 0) {
                    if (src[paren] == '(') ++pdepth;
                    else if (src[paren] == ')') --pdepth;
                    if (pdepth) ++paren;
                }
                if (paren < n) {
                    const std::string label = src.substr(open + 1, close - open - 1);
                    std::string target = src.substr(close + 2, paren - close - 2);
                    if (const auto ws = target.find_first_of(" \t");
                        ws != std::string::npos) {
                        target.resize(ws); // drop optional title
                    }
                    if (is_image) {
                        result.images.emplace_back(target, label);
                        out += label;
                    } else {
                        out += label;
                        if (!target.empty()) {
                            out += " (";
                            out += target;
                            out += ")";
                        }
                    }
                    i = paren + 1;
                    at_line_start = false;
                    continue;
                }
            }
        }
        out += c;
        at_line_start = c == '\n';
        ++i;
    }
    return result;
}

std::string run_external_converter(const RawFile& file, const ExternalConverter& conv) {
    std::string ext;
    if (const auto dot = file.path.find_last_of('.'); dot != std::string::npos) {
        ext = file.path.substr(dot);
    }
    std::string tmpl = (fs::temp_directory_path() / ("quasar-convXXXXXX" + ext)).string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    const int fd = mkstemps(buf.data(), static_cast<int>(ext.size()));
    if (fd < 0) {
        throw Error(ErrorCode::Io, "cannot create temporary file for conversion");
    }
    close(fd);
    const std::string tmp_path(buf.data());
    util::write_file(tmp_path, file.bytes);

    std::vector<std::string> argv;
    argv.push_back(conv.command);
    for (std::string arg : conv.args) {
        std::size_t pos;
        while ((pos = arg.find("{file}")) != std::string::npos) {
            arg.replace(pos, 6, tmp_path);
        }
        argv.push_back(std::move(arg));
    }
    const auto result = util::run_command(argv);
    std::error_code ec;
    fs::remove(tmp_path, ec);
    if (result.exit_code != 0) {
        throw Error(ErrorCode::ExternalConverterFailed,
                    conv.command + " exited with " + std::to_string(result.exit_code) +
                        " for " + file.path);
    }
    if (result.out.empty()) {
        throw Error(ErrorCode::ExternalConverterFailed,
                    conv.command + " produced no output for " + file.path);
    }
    return result.out;
}

} // namespace

ConversionOutcome convert(const RawFile& file, const ConvertConfig& config,
                          const DocumentSet& origin) {
    if (file.kind == FileKind::image) {
        throw std::invalid_argument("convert: images are attached, not converted");
    }
    ConversionOutcome outcome;
    NormalizedDocument& doc = outcome.document;
    doc.path = file.path;

    switch (file.kind) {
        case FileKind::markdown: {
            auto md = strip_markdown(file.bytes);
            doc.text = std::move(md.text);
            doc.conversion = ConversionMode::native;
            for (auto& [target, alt] : md.images) {
                const std::string resolved = resolve_ref(file.path, target);
                const bool exists =
                    !resolved.empty() &&
                    std::any_of(origin.files.begin(), origin.files.end(),
                                [&](const RawFile& f) { return f.path == resolved; });
                if (exists) {
                    doc.images.push_back({resolved, alt});
                } else {
                    outcome.warnings.push_back("dangling image reference '" + target +
                                               "' in " + file.path);
                }
            }
            break;
        }
        case FileKind::plaintext:
            doc.text = file.bytes;
            doc.conversion = ConversionMode::native;
            break;
        case FileKind::pdf:
        case FileKind::docx: {
            if (!config.external_converter) {
                doc.conversion = ConversionMode::skipped;
                outcome.warnings.push_back("no external converter configured, skipping " +
                                           file.path);
                break;
            }
            try {
                doc.text = run_external_converter(file, *config.external_converter);
                doc.conversion = ConversionMode::external;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ExternalConverterFailed) throw;
                doc.conversion = ConversionMode::skipped;
                outcome.warnings.push_back(e.what());
            }
            break;
        }
        case FileKind::other:
        case FileKind::image:
            doc.conversion = ConversionMode::skipped;
            break;
    }
    doc.char_count = doc.text.size();
    return outcome;
}

std::vector<ConversionOutcome> convert_all(const DocumentSet& set, const ConvertConfig& config) {
    std::vector<const RawFile*> inputs;
    for (const RawFile& f : set.files) {
        if (f.kind != FileKind::image) inputs.push_back(&f);
    }
    std::vector<ConversionOutcome> outcomes(inputs.size());
    const int workers = std::max(1, config.workers);
    if (workers == 1 || inputs.size() <= 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            outcomes[i] = convert(*inputs[i], config, set);
        }
        return outcomes;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < inputs.size(); i = next.fetch_add(1)) {
            outcomes[i] = convert(*inputs[i], config, set);
        }
    };
    std::vector<std::thread> threads;
    const std::size_t count = std::min<std::size_t>(workers, inputs.size());
    threads.reserve(count);
    for (std::size_t i = 0; i < count; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return outcomes;
}

FilteredCorpus filter_relevant(const std::vector<NormalizedDocument>& docs,
                               const std::vector<std::string>& keywords) {
    if (keywords.empty()) {
        throw std::invalid_argument("filter_relevant: keyword list is empty");
    }
    std::vector<std::string> trimmed;
    trimmed.reserve(keywords.size());
    for (const auto& k : keywords) {
        std::string t = util::trim(k);
        if (t.empty()) {
            throw std::invalid_argument("filter_relevant: keyword is empty after trimming");
        }
        trimmed.push_back(std::move(t));
    }
    FilteredCorpus corpus;
    for (const auto& k : trimmed) corpus.keyword_counts[k] = 0;
    for (const auto& doc : docs) {
        std::size_t doc_total = 0;
        for (const auto& k : trimmed) {
            std::size_t count = util::count_word_occurrences(doc.text, k);
            for (const auto& img : doc.images) {
                count += util::count_word_occurrences(img.caption, k);
            }
            corpus.keyword_counts[k] += count;
            doc_total += count;
        }
        if (doc_total > 0) {
            corpus.documents.push_back(doc);
        } else {
            ++corpus.excluded_count;
        }
    }
    return corpus;
}

namespace {

ordered_json document_to_json(const NormalizedDocument& doc) {
    ordered_json images = ordered_json::array();
    for (const auto& img : doc.images) {
        images.push_back({{"path", img.path}, {"caption", img.caption}});
    }
    return ordered_json{{"path", doc.path},
                        {"conversion", conversion_mode_name(doc.conversion)},
                        {"char_count", doc.char_count},
                        {"text", doc.text},
                        {"images", std::move(images)}};
}

} // namespace

std::string to_json(const FilteredCorpus& corpus) {
    ordered_json docs = ordered_json::array();
    for (const auto& doc : corpus.documents) docs.push_back(document_to_json(doc));
    ordered_json counts = ordered_json::object();
    for (const auto& [k, n] : corpus.keyword_counts) counts[k] = n;
    ordered_json j{{"documents", std::move(docs)},
                   {"keyword_counts", std::move(counts)},
                   {"excluded_count", corpus.excluded_count},
                   {"warnings", corpus.warnings}};
    return j.dump(2);
}

std::string corpus_fingerprint(const FilteredCorpus& corpus) {
    return util::to_hex(util::fnv1a64(to_json(corpus)));
}

} // namespace quasar
