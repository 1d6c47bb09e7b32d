#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revdist/categorize.hpp"
#include "revdist/edit_model.hpp"

namespace revdist {

/// Lowercased text with interior whitespace runs collapsed to single spaces
/// and the ends trimmed. `source[i]` is the offset in the raw text that
/// normalized character i came from, so matches can be mapped back.
struct NormalizedText {
    std::string text;
    std::vector<std::size_t> source;
};

NormalizedText normalize_text(std::string_view raw);

/// Locates the edit's original snippet in the draft under normalization and
/// attaches its category. Edits with an empty original snippet are treated
/// as insertions: grounded, no offset.
GroundedEdit ground_edit(std::string_view draft, RevisionEdit edit,
                         const CategoryKeywords& keywords = default_keywords());

struct SkippedEdit {
    std::size_t index = 0; // position in the input edit list
    std::string reason;
};

struct ApplyResult {
    std::string text;
    std::vector<SkippedEdit> skipped;
};

/// Applies grounded replacement edits to the draft, highest offset first so
/// earlier offsets stay valid. Ungrounded edits and pure insertions are
/// skipped and reported, never applied. Offsets must come from grounding
/// against this exact draft.
ApplyResult apply_edits(std::string_view draft, std::span<const GroundedEdit> edits);

/// Grounds and categorizes a full edit list into a DocumentEval with the
/// distance and per-category counts filled in. Baseline scores start empty.
DocumentEval evaluate_document(std::string document_id, std::string_view draft,
                               std::span<const RevisionEdit> edits,
                               const CategoryKeywords& keywords = default_keywords());

} // namespace revdist
