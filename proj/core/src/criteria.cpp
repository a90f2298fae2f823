#include "quasar/criteria.hpp"

#include "embedded_data.hpp"
#include "quasar/errors.hpp"
#include "util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

using nlohmann::json;

namespace quasar {

const Criterion* CriterionCatalog::find(int id) const {
    const auto it = std::find_if(items.begin(), items.end(),
                                 [&](const Criterion& c) { return c.id == id; });
    return it == items.end() ? nullptr : &*it;
}

CriterionCatalog catalog_from_json(const std::string& json_text) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedCatalogFile, e.what());
    }
    if (!parsed.is_array()) {
        throw Error(ErrorCode::MalformedCatalogFile, "catalog must be a JSON array");
    }
    CriterionCatalog catalog;
    std::set<int> seen;
    for (const auto& entry : parsed) {
        if (!entry.is_object() || !entry.contains("id") || !entry.contains("statement") ||
            !entry["id"].is_number_integer() || !entry["statement"].is_string()) {
            throw Error(ErrorCode::MalformedCatalogFile,
                        "each entry needs integer 'id' and string 'statement'");
        }
        Criterion c;
        c.id = entry["id"].get<int>();
        c.statement = entry["statement"].get<std::string>();
        if (c.statement.empty()) {
            throw Error(ErrorCode::MalformedCatalogFile,
                        "criterion " + std::to_string(c.id) + " has an empty statement");
        }
        if (entry.contains("rating_hint")) {
            if (!entry["rating_hint"].is_string()) {
                throw Error(ErrorCode::MalformedCatalogFile, "rating_hint must be a string");
            }
            c.rating_hint = entry["rating_hint"].get<std::string>();
        }
        if (entry.contains("group")) {
            if (!entry["group"].is_string()) {
                throw Error(ErrorCode::MalformedCatalogFile, "group must be a string");
            }
            c.group = entry["group"].get<std::string>();
        }
        if (!seen.insert(c.id).second) {
            throw Error(ErrorCode::DuplicateCriterionId,
                        "criterion id " + std::to_string(c.id) + " appears twice");
        }
        catalog.items.push_back(std::move(c));
    }
    if (catalog.items.empty()) {
        throw Error(ErrorCode::EmptyCatalog, "catalog contains no criteria");
    }
    std::sort(catalog.items.begin(), catalog.items.end(),
              [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
    return catalog;
}

const CriterionCatalog& builtin_catalog() {
    static const CriterionCatalog catalog =
        catalog_from_json(std::string(embedded::builtin_catalog_json()));
    return catalog;
}

std::string builtin_catalog_json() {
    return std::string(embedded::builtin_catalog_json());
}

CriterionCatalog load_catalog(const std::string& source) {
    if (source == "builtin") {
        return builtin_catalog();
    }
    std::string text;
    try {
        text = util::read_file(source);
    } catch (...) {
        throw Error(ErrorCode::MalformedCatalogFile, "cannot read catalog file " + source);
    }
    return catalog_from_json(text);
}

namespace {

constexpr std::string_view kElisionMarker = "\n[... elided ...]\n";

std::string build_system_text(const Criterion& criterion) {
    std::ostringstream ss;
    ss << "You rate software architecture documentation. Judge how strongly the "
          "document supports the statement, on a scale from 0 (disagree completely) "
          "to 4 (agree completely).\n"
          "First decide whether the document contains any information relevant to "
          "the statement. Reply with exactly one JSON object and nothing else:\n"
          "{\"relevant\": <true|false>, \"score\": <integer 0-4>, "
          "\"justification\": \"<short reason>\"}\n"
          "When the document contains no information about the statement, set "
          "\"relevant\" to false.";
    if (!criterion.rating_hint.empty()) {
        ss << "\nRating guidance: " << criterion.rating_hint;
    }
    return ss.str();
}

} // namespace

PromptPayload render_prompt(const Criterion& criterion, const NormalizedDocument& doc,
                            const ProviderCapabilities& caps, std::size_t budget) {
    if (budget == 0) {
        throw std::invalid_argument("render_prompt: budget must be positive");
    }
    PromptPayload payload;
    payload.criterion_id = criterion.id;
    payload.document_path = doc.path;
    payload.system_text = build_system_text(criterion);

    if (caps.multimodal) {
        const std::size_t limit =
            std::min<std::size_t>(doc.images.size(),
                                  caps.max_images < 0 ? 0 : static_cast<std::size_t>(caps.max_images));
        payload.attachments.assign(doc.images.begin(), doc.images.begin() + limit);
    }

    std::string prefix = "Statement: " + criterion.statement + "\n\nDocument: " + doc.path + "\n";
    std::string suffix;
    if (!caps.multimodal && !doc.images.empty()) {
        suffix += "\nImages referenced by the document:\n";
        for (const auto& img : doc.images) {
            suffix += "[image: " + img.path;
            if (!img.caption.empty()) {
                suffix += " — " + img.caption;
            }
            suffix += "]\n";
        }
    }

    std::string body;
    if (doc.text.empty()) {
        body = "(the document body is empty)";
    } else {
        body = doc.text;
    }

    const std::size_t scaffold = prefix.size() + suffix.size();
    std::string user_text;
    if (scaffold + body.size() <= budget) {
        user_text = prefix + body + suffix;
    } else if (scaffold + kElisionMarker.size() + 2 <= budget) {
        const std::size_t room = budget - scaffold - kElisionMarker.size();
        const std::size_t head = room * 8 / 10;
        const std::size_t tail = room - head;
        user_text = prefix + body.substr(0, head);
        user_text += kElisionMarker;
        user_text += body.substr(body.size() - tail);
        user_text += suffix;
    } else {
        // Degenerate budget smaller than the scaffolding itself.
        user_text = (prefix + body + suffix).substr(0, budget);
    }
    payload.user_text = std::move(user_text);
    return payload;
}

} // namespace quasar
