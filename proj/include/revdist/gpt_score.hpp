#pragma once

#include <optional>
#include <string>

#include "revdist/backend.hpp"
#include "revdist/metrics.hpp"
#include "revdist/prompts.hpp"

namespace revdist {

struct GptScoreResult {
    MetricScore score;
    int parse_retries = 0;
};

/// Asks the backend for a 0-100 quality rating and takes the first in-range
/// integer from the reply. One corrective re-ask on an unusable reply, then
/// ParseError.
GptScoreResult run_gpt_score(LLMBackend& backend, const PromptLibrary& library,
                             const std::string& candidate,
                             const std::optional<std::string>& reference = std::nullopt,
                             const std::optional<std::string>& task_hint = std::nullopt,
                             const std::string& document_id = "");

MetricScore gpt_score(LLMBackend& backend, const PromptLibrary& library,
                      const std::string& candidate,
                      const std::optional<std::string>& reference = std::nullopt);

} // namespace revdist
