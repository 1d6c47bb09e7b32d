#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "revdist/edit_model.hpp"

namespace revdist {

/// Keyword table driving edit categorization. Keywords are lowercase and
/// matched as substrings of the case-folded "action_name intention" text,
/// so "Reordered" still hits the "reorder" keyword.
struct CategoryKeywords {
    std::vector<std::string> order;
    std::vector<std::string> comparison;
    std::vector<std::string> description;

    static CategoryKeywords defaults();

    /// Loads a table from a flat key-value file:
    ///   order = reorder, reorganize, move
    ///   comparison = compare, contrast
    ///   description = simplify, elaborate
    /// Unknown keys are rejected. Missing keys leave that category empty.
    static CategoryKeywords from_file(const std::filesystem::path& path);
};

const CategoryKeywords& default_keywords();

/// Classifies an edit into exactly one category. Order beats Comparison
/// beats Description; Other when no keyword matches.
EditCategory categorize_edit(const RevisionEdit& edit,
                             const CategoryKeywords& keywords = default_keywords());

} // namespace revdist
