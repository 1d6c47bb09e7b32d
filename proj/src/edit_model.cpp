#include "revdist/edit_model.hpp"

#include <algorithm>
#include <cctype>

namespace revdist {

namespace {

bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

bool GroundedEdit::is_insertion() const {
    return edit.original_snippet.empty() || is_blank(edit.original_snippet);
}

bool is_valid_edit(const RevisionEdit& edit) {
    if (edit.action_name.empty() || is_blank(edit.action_name)) {
        return false;
    }
    return !edit.original_snippet.empty() || !edit.revised_snippet.empty();
}

std::string_view to_string(EditCategory category) {
    switch (category) {
        case EditCategory::Order: return "order";
        case EditCategory::Comparison: return "comparison";
        case EditCategory::Description: return "description";
        case EditCategory::Other: return "other";
    }
    return "other";
}

std::optional<EditCategory> category_from_string(std::string_view name) {
    for (EditCategory category : kAllCategories) {
        if (name == to_string(category)) {
            return category;
        }
    }
    return std::nullopt;
}

} // namespace revdist
