#include "revdist/categorize.hpp"

#include "revdist/errors.hpp"
#include "revdist/kv_file.hpp"

namespace revdist {

CategoryKeywords CategoryKeywords::defaults() {
    CategoryKeywords table;
    table.order = {"reorder", "reorganize", "move", "sequence", "restructure"};
    table.comparison = {"compare", "comparison", "contrast", "relate"};
    table.description = {"simplify", "elaborate", "expand",   "condense", "rewrite",
                         "describe", "clarify",   "rephrase", "shorten"};
    return table;
}

CategoryKeywords CategoryKeywords::from_file(const std::filesystem::path& path) {
    CategoryKeywords table;
    for (const KeyValueEntry& entry : parse_key_value_file(path)) {
        std::vector<std::string> keywords = split_comma_list(entry.value);
        for (std::string& keyword : keywords) {
            keyword = to_lower_copy(keyword);
        }
        if (entry.key == "order") {
            table.order = std::move(keywords);
        } else if (entry.key == "comparison") {
            table.comparison = std::move(keywords);
        } else if (entry.key == "description") {
            table.description = std::move(keywords);
        } else {
            throw FormatError("unknown category \"" + entry.key + "\"", entry.line);
        }
    }
    return table;
}

const CategoryKeywords& default_keywords() {
    static const CategoryKeywords table = CategoryKeywords::defaults();
    return table;
}

namespace {

bool contains_any(const std::string& haystack, const std::vector<std::string>& keywords) {
    for (const std::string& keyword : keywords) {
        if (!keyword.empty() && haystack.find(keyword) != std::string::npos) {
            return true;
        }
    }
    return false;
}

} // namespace

EditCategory categorize_edit(const RevisionEdit& edit, const CategoryKeywords& keywords) {
    // The separator keeps keywords from matching across the field boundary.
    std::string haystack =
        to_lower_copy(edit.action_name) + " " + to_lower_copy(edit.revision_intention);
    if (contains_any(haystack, keywords.order)) {
        return EditCategory::Order;
    }
    if (contains_any(haystack, keywords.comparison)) {
        return EditCategory::Comparison;
    }
    if (contains_any(haystack, keywords.description)) {
        return EditCategory::Description;
    }
    return EditCategory::Other;
}

} // namespace revdist
