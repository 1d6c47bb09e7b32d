#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace revdist {

enum class TemplateId {
    revision_ref_based,
    revision_ref_free,
    gpt_score,
};

std::string_view to_string(TemplateId id);
std::optional<TemplateId> template_id_from_string(std::string_view name);

/// A chat prompt split into the system preamble and the user payload.
struct PromptTemplate {
    std::string system_text;
    std::string user_text;
};

struct PromptRequest {
    TemplateId template_id = TemplateId::revision_ref_based;
    std::string system_text;
    std::string user_text;
    std::string document_id;
    std::string rendered_prompt; // system + user, the fingerprint input

    bool operator==(const PromptRequest&) const = default;
};

/// The versioned set of prompt templates. Templates are plain-text files
/// with {{draft}}, {{reference}} and {{task_hint}} placeholders; a line of
/// "---" separates the system preamble from the user payload. The directory
/// must hold revision_ref_based.txt, revision_ref_free.txt, gpt_score.txt
/// and a VERSION file.
class PromptLibrary {
public:
    static PromptLibrary builtin();
    static PromptLibrary from_directory(const std::filesystem::path& dir);

    const PromptTemplate& get(TemplateId id) const;
    const std::string& version() const { return version_; }

private:
    std::map<TemplateId, PromptTemplate> templates_;
    std::string version_;
};

/// Renders the reference-based template when a reference is present, the
/// reference-free one otherwise. Throws ConfigError on an empty draft.
PromptRequest build_revision_prompt(const PromptLibrary& library, const std::string& draft,
                                    const std::optional<std::string>& reference = std::nullopt,
                                    const std::optional<std::string>& task_hint = std::nullopt,
                                    const std::string& document_id = "");

/// Renders the judge prompt asking for a single 0-100 quality rating.
PromptRequest build_gpt_score_prompt(const PromptLibrary& library, const std::string& candidate,
                                     const std::optional<std::string>& reference = std::nullopt,
                                     const std::optional<std::string>& task_hint = std::nullopt,
                                     const std::string& document_id = "");

/// Returns a copy of the request with a corrective instruction appended to
/// the user payload (used after a malformed response).
PromptRequest with_corrective_suffix(const PromptRequest& request, std::string_view suffix);

} // namespace revdist
