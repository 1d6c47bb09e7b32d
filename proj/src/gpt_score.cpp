#include "revdist/gpt_score.hpp"

#include <cctype>
#include <optional>

#include "revdist/errors.hpp"

namespace revdist {

namespace {

/// First integer in [0,100] appearing in the text, scanning digit runs left
/// to right. Out-of-range runs are passed over.
std::optional<int> first_in_range_integer(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t length = i - start;
        if (length <= 3) {
            int value = 0;
            for (std::size_t j = start; j < i; ++j) {
                value = value * 10 + (text[j] - '0');
            }
            if (value >= 0 && value <= 100) {
                return value;
            }
        }
    }
    return std::nullopt;
}

constexpr std::string_view kCorrectiveSuffix =
    "Your previous reply was not usable. Reply with a single integer between 0 and 100 and "
    "nothing else.";

} // namespace

GptScoreResult run_gpt_score(LLMBackend& backend, const PromptLibrary& library,
                             const std::string& candidate,
                             const std::optional<std::string>& reference,
                             const std::optional<std::string>& task_hint,
                             const std::string& document_id) {
    PromptRequest request =
        build_gpt_score_prompt(library, candidate, reference, task_hint, document_id);

    GptScoreResult result;
    std::string raw = backend.complete(request);
    std::optional<int> value = first_in_range_integer(raw);
    if (!value.has_value()) {
        result.parse_retries = 1;
        PromptRequest corrected = with_corrective_suffix(request, kCorrectiveSuffix);
        raw = backend.complete(corrected);
        value = first_in_range_integer(raw);
    }
    if (!value.has_value()) {
        throw ParseError("no integer between 0 and 100 in the judge response");
    }
    result.score = MetricScore{"gpt_score", static_cast<double>(*value), true};
    return result;
}

MetricScore gpt_score(LLMBackend& backend, const PromptLibrary& library,
                      const std::string& candidate, const std::optional<std::string>& reference) {
    return run_gpt_score(backend, library, candidate, reference).score;
}

} // namespace revdist
