#pragma once

#include "quasar/corpus.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace quasar {

struct Criterion {
    int id = 0;
    std::string statement;
    std::string rating_hint; // optional grading guidance, empty when absent
    std::string group;       // optional quality-model grouping label
};

struct CriterionCatalog {
    std::vector<Criterion> items; // ordered by id, ids unique

    const Criterion* find(int id) const;
};

// The bundled rubric: 25 statements with ids 0..24.
const CriterionCatalog& builtin_catalog();

// JSON text of the bundled rubric, as shipped in core/data/.
std::string builtin_catalog_json();

// Parses a catalog from a JSON array of {id, statement, rating_hint?, group?}.
// Throws DuplicateCriterionId, EmptyCatalog or MalformedCatalogFile.
CriterionCatalog catalog_from_json(const std::string& json_text);

// source == "builtin" yields the bundled rubric; anything else is read as
// a file path.
CriterionCatalog load_catalog(const std::string& source);

struct ProviderCapabilities {
    bool multimodal = false;
    int max_images = 8;
};

struct PromptPayload {
    std::string system_text;
    std::string user_text;
    std::vector<ImageRef> attachments; // nonempty only for multimodal providers
    int criterion_id = 0;
    std::string document_path;
};

// Renders a (criterion, document) pair into a provider-ready payload.
// user_text never exceeds `budget` characters; oversize document bodies
// are cut to the first 80% / last 20% of the available room around an
// elision marker. For text-only providers images become inline
// placeholders; for multimodal ones up to caps.max_images attachments are
// carried in document order.
PromptPayload render_prompt(const Criterion& criterion, const NormalizedDocument& doc,
                            const ProviderCapabilities& caps, std::size_t budget);

} // namespace quasar
