#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revdist {

/// One structured revision edit emitted by the proxy user. The unit counted
/// by the revision distance.
struct RevisionEdit {
    std::string action_name;
    std::string revision_description;
    std::string revision_level;
    std::string revision_intention;
    std::string original_snippet;
    std::string revised_snippet;

    bool operator==(const RevisionEdit&) const = default;
};

/// Returns true when the edit satisfies the model invariants: a non-blank
/// action_name and at least one non-empty snippet.
bool is_valid_edit(const RevisionEdit& edit);

enum class EditCategory {
    Order,
    Comparison,
    Description,
    Other,
};

std::string_view to_string(EditCategory category);
std::optional<EditCategory> category_from_string(std::string_view name);

/// All categories in their fixed precedence order.
inline constexpr EditCategory kAllCategories[] = {
    EditCategory::Order,
    EditCategory::Comparison,
    EditCategory::Description,
    EditCategory::Other,
};

/// An edit located (or not) in the draft it targets. Insertions (empty
/// original snippet) are grounded but carry no match offset.
struct GroundedEdit {
    RevisionEdit edit;
    bool grounded = false;
    std::optional<std::size_t> match_offset; // offset into the normalized draft
    EditCategory category = EditCategory::Other;

    /// True when the original snippet holds nothing to anchor on (empty or
    /// whitespace-only), i.e. the edit only adds text.
    bool is_insertion() const;

    bool operator==(const GroundedEdit&) const = default;
};

/// Per-document evaluation result.
struct DocumentEval {
    std::string document_id;
    std::vector<GroundedEdit> edits;
    std::size_t revision_distance = 0;
    std::map<EditCategory, std::size_t> category_counts;
    std::map<std::string, double> baseline_scores;

    bool operator==(const DocumentEval&) const = default;
};

/// The revision distance of an edit list is its length: every edit carries
/// weight 1, grounded or not.
inline std::size_t count_revision_distance(std::span<const RevisionEdit> edits) {
    return edits.size();
}

} // namespace revdist
