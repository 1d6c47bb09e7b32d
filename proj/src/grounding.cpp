#include "revdist/grounding.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace revdist {

NormalizedText normalize_text(std::string_view raw) {
    NormalizedText out;
    out.text.reserve(raw.size());
    out.source.reserve(raw.size());
    bool pending_space = false;
    std::size_t pending_at = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(raw[i]);
        if (std::isspace(c)) {
            if (!out.text.empty() && !pending_space) {
                pending_space = true;
                pending_at = i;
            }
            continue;
        }
        if (pending_space) {
            out.text.push_back(' ');
            out.source.push_back(pending_at);
            pending_space = false;
        }
        out.text.push_back(static_cast<char>(std::tolower(c)));
        out.source.push_back(i);
    }
    // A trailing whitespace run is dropped entirely.
    return out;
}

GroundedEdit ground_edit(std::string_view draft, RevisionEdit edit,
                         const CategoryKeywords& keywords) {
    GroundedEdit grounded;
    grounded.category = categorize_edit(edit, keywords);
    grounded.edit = std::move(edit);

    NormalizedText snippet = normalize_text(grounded.edit.original_snippet);
    if (snippet.text.empty()) {
        // Nothing to locate: a pure insertion.
        grounded.grounded = true;
        grounded.match_offset = std::nullopt;
        return grounded;
    }

    NormalizedText normalized_draft = normalize_text(draft);
    std::size_t pos = normalized_draft.text.find(snippet.text);
    if (pos == std::string::npos) {
        grounded.grounded = false;
        grounded.match_offset = std::nullopt;
    } else {
        grounded.grounded = true;
        grounded.match_offset = pos;
    }
    return grounded;
}

ApplyResult apply_edits(std::string_view draft, std::span<const GroundedEdit> edits) {
    ApplyResult result;
    result.text.assign(draft.begin(), draft.end());

    struct Replacement {
        std::size_t offset;     // in the normalized draft
        std::size_t length;     // normalized snippet length
        std::size_t edit_index;
    };
    std::vector<Replacement> replacements;

    for (std::size_t i = 0; i < edits.size(); ++i) {
        const GroundedEdit& ge = edits[i];
        if (ge.is_insertion()) {
            result.skipped.push_back({i, "pure insertion, no anchor to replace"});
            continue;
        }
        if (!ge.grounded || !ge.match_offset.has_value()) {
            result.skipped.push_back({i, "not grounded in the draft"});
            continue;
        }
        std::size_t length = normalize_text(ge.edit.original_snippet).text.size();
        replacements.push_back({*ge.match_offset, length, i});
    }

    // Highest offset first, so spans below stay valid in the evolving string.
    std::stable_sort(replacements.begin(), replacements.end(),
                     [](const Replacement& a, const Replacement& b) {
                         return a.offset > b.offset;
                     });

    NormalizedText normalized = normalize_text(draft);
    for (const Replacement& rep : replacements) {
        if (rep.length == 0 || rep.offset + rep.length > normalized.text.size()) {
            result.skipped.push_back({rep.edit_index, "offset out of range for this draft"});
            continue;
        }
        // Normalized snippets are trimmed, so the first and last matched
        // characters map to single characters of the raw draft.
        std::size_t begin = normalized.source[rep.offset];
        std::size_t end = normalized.source[rep.offset + rep.length - 1] + 1;
        result.text.replace(begin, end - begin, edits[rep.edit_index].edit.revised_snippet);
    }

    std::sort(result.skipped.begin(), result.skipped.end(),
              [](const SkippedEdit& a, const SkippedEdit& b) { return a.index < b.index; });
    return result;
}

DocumentEval evaluate_document(std::string document_id, std::string_view draft,
                               std::span<const RevisionEdit> edits,
                               const CategoryKeywords& keywords) {
    DocumentEval eval;
    eval.document_id = std::move(document_id);
    eval.edits.reserve(edits.size());
    for (EditCategory category : kAllCategories) {
        eval.category_counts[category] = 0;
    }
    for (const RevisionEdit& edit : edits) {
        GroundedEdit grounded = ground_edit(draft, edit, keywords);
        eval.category_counts[grounded.category] += 1;
        eval.edits.push_back(std::move(grounded));
    }
    eval.revision_distance = count_revision_distance(edits);
    return eval;
}

} // namespace revdist
