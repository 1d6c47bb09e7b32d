#include "revdist/proxy.hpp"

#include "revdist/errors.hpp"
#include "revdist/extract.hpp"

namespace revdist {

namespace {

constexpr std::string_view kCorrectiveSuffix =
    "Your previous reply could not be parsed. Return only a JSON array of edit objects, "
    "with no surrounding text.";

} // namespace

GenerationResult generate_revision_edits(LLMBackend& backend, const PromptLibrary& library,
                                         const std::string& document_id, const std::string& draft,
                                         const GenerationOptions& options) {
    PromptRequest request = build_revision_prompt(library, draft, options.reference,
                                                  options.task_hint, document_id);

    GenerationResult result;
    ExtractionResult extracted;
    std::string raw = backend.complete(request);
    try {
        extracted = extract_structured_edits(raw);
    } catch (const ParseError&) {
        result.diagnostics.parse_retries = 1;
        PromptRequest corrected = with_corrective_suffix(request, kCorrectiveSuffix);
        raw = backend.complete(corrected);
        extracted = extract_structured_edits(raw); // a second ParseError propagates
    }

    result.edits = std::move(extracted.edits);
    result.diagnostics.dropped = std::move(extracted.dropped);
    if (result.edits.size() > options.max_edits) {
        result.edits.resize(options.max_edits);
        result.diagnostics.truncated = true;
    }
    return result;
}

} // namespace revdist
