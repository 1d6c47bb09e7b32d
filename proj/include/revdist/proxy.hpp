#pragma once

#include <optional>
#include <string>
#include <vector>

#include "revdist/backend.hpp"
#include "revdist/edit_model.hpp"
#include "revdist/prompts.hpp"

namespace revdist {

inline constexpr std::size_t kDefaultMaxEdits = 50;

struct GenerationOptions {
    std::optional<std::string> reference;
    std::optional<std::string> task_hint;
    std::size_t max_edits = kDefaultMaxEdits;
};

struct GenerationDiagnostics {
    int parse_retries = 0;           // corrective re-asks that were needed
    bool truncated = false;          // hit the max_edits cap
    std::vector<std::string> dropped; // malformed-element diagnostics
};

struct GenerationResult {
    std::vector<RevisionEdit> edits;
    GenerationDiagnostics diagnostics;
};

/// Prompt -> completion -> structured extraction. A malformed response is
/// re-asked once with a corrective instruction; a second failure propagates
/// as ParseError. Lists longer than max_edits are truncated loudly.
GenerationResult generate_revision_edits(LLMBackend& backend, const PromptLibrary& library,
                                         const std::string& document_id, const std::string& draft,
                                         const GenerationOptions& options = {});

} // namespace revdist
