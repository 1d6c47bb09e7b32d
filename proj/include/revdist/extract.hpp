#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "revdist/edit_model.hpp"

namespace revdist {

struct ExtractionResult {
    std::vector<RevisionEdit> edits;
    std::vector<std::string> dropped; // one diagnostic per malformed element
};

/// Recovers a list of revision edits from a raw model response:
///   1. if a fenced code block exists, only its body is considered;
///   2. the first top-level JSON array is used, else the first array-valued
///      field of a top-level JSON object;
///   3. one trailing comma per array/object is tolerated;
///   4. elements missing action_name or both snippets are dropped with a
///      diagnostic; absent optional fields become empty strings.
/// Throws ParseError when no JSON array is recoverable.
ExtractionResult extract_structured_edits(std::string_view raw);

} // namespace revdist
