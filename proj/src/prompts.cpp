#include "revdist/prompts.hpp"

#include <fstream>
#include <sstream>

#include "revdist/errors.hpp"
#include "revdist/kv_file.hpp"

namespace revdist {

std::string_view to_string(TemplateId id) {
    switch (id) {
        case TemplateId::revision_ref_based: return "revision_ref_based";
        case TemplateId::revision_ref_free: return "revision_ref_free";
        case TemplateId::gpt_score: return "gpt_score";
    }
    return "revision_ref_based";
}

std::optional<TemplateId> template_id_from_string(std::string_view name) {
    for (TemplateId id : {TemplateId::revision_ref_based, TemplateId::revision_ref_free,
                          TemplateId::gpt_score}) {
        if (name == to_string(id)) {
            return id;
        }
    }
    return std::nullopt;
}

namespace {

constexpr std::string_view kEditFieldsBlock =
    "Report every edit as one element of a JSON array. Each element is an object with exactly these fields:\n"
    "- \"action_name\": a short verb naming the edit (for example \"Reorder\" or \"simplify\")\n"
    "- \"revision_description\": one or two sentences explaining the edit\n"
    "- \"revision_level\": the granularity the edit operates at (for example \"reference\" or \"sentence\")\n"
    "- \"revision_intention\": the intent behind the edit (for example \"simplify\")\n"
    "- \"original_snippet\": the exact excerpt of the draft the edit targets (an empty string for a pure insertion)\n"
    "- \"revised_snippet\": the replacement text (an empty string for a pure deletion)\n"
    "\n"
    "Reply with the JSON array only, no commentary. Reply with [] when the draft needs no edits.\n";

std::string ref_based_template_text() {
    std::string text;
    text +=
        "You are an experienced human editor. You revise drafts by proposing the minimal set of "
        "edits a careful writer would make, and you reply with a JSON array only.\n"
        "---\n"
        "Compare the draft against the reference text and produce the revision edits that make "
        "the draft consistent with the reference.\n"
        "\n"
        "{{task_hint}}\n";
    text += kEditFieldsBlock;
    text +=
        "\n"
        "### Draft\n"
        "{{draft}}\n"
        "\n"
        "### Reference\n"
        "{{reference}}\n";
    return text;
}

std::string ref_free_template_text() {
    std::string text;
    text +=
        "You are an experienced human editor. No reference text is available: you revise drafts "
        "toward the ideal version you would hold them to, without writing that ideal version "
        "out. You reply with a JSON array only.\n"
        "---\n"
        "Produce the revision edits that bring the draft to its ideal form.\n"
        "\n"
        "{{task_hint}}\n";
    text += kEditFieldsBlock;
    text +=
        "\n"
        "### Draft\n"
        "{{draft}}\n";
    return text;
}

std::string gpt_score_template_text() {
    return "You are a strict judge of writing quality. You reply with a single integer between "
           "0 and 100 and nothing else.\n"
           "---\n"
           "Rate the overall writing quality of the candidate text from 0 (unusable) to 100 "
           "(flawless). When a reference text is given, also weigh how faithful the candidate "
           "is to it.\n"
           "\n"
           "{{task_hint}}\n"
           "### Candidate\n"
           "{{draft}}\n"
           "\n"
           "### Reference\n"
           "{{reference}}\n";
}

PromptTemplate split_template(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::string system_part;
    std::string user_part;
    bool seen_divider = false;
    while (std::getline(in, line)) {
        if (!seen_divider && trim_copy(line) == "---") {
            seen_divider = true;
            continue;
        }
        (seen_divider ? user_part : system_part) += line;
        (seen_divider ? user_part : system_part) += '\n';
    }
    if (!seen_divider) {
        throw ConfigError("template " + origin + " has no '---' system/user divider");
    }
    PromptTemplate tmpl;
    tmpl.system_text = trim_copy(system_part);
    tmpl.user_text = trim_copy(user_part);
    if (tmpl.system_text.empty() || tmpl.user_text.empty()) {
        throw ConfigError("template " + origin + " has an empty system or user section");
    }
    return tmpl;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Substitutes {{name}} placeholders in a single pass; values are inserted
/// verbatim and never rescanned, so braces inside drafts are inert.
std::string render_placeholders(std::string_view text,
                                const std::map<std::string, std::string>& values,
                                TemplateId id) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        std::size_t close = text.find("}}", open + 2);
        if (close == std::string_view::npos) {
            throw ConfigError("unterminated placeholder in template " +
                              std::string(to_string(id)));
        }
        out.append(text.substr(pos, open - pos));
        std::string name(text.substr(open + 2, close - open - 2));
        auto it = values.find(name);
        if (it == values.end()) {
            throw ConfigError("unknown placeholder {{" + name + "}} in template " +
                              std::string(to_string(id)));
        }
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

PromptRequest render_request(const PromptLibrary& library, TemplateId id,
                             const std::map<std::string, std::string>& values,
                             const std::string& document_id) {
    const PromptTemplate& tmpl = library.get(id);
    PromptRequest request;
    request.template_id = id;
    request.system_text = render_placeholders(tmpl.system_text, values, id);
    request.user_text = render_placeholders(tmpl.user_text, values, id);
    request.document_id = document_id;
    request.rendered_prompt = request.system_text + "\n\n" + request.user_text;
    return request;
}

std::string hint_block(const std::optional<std::string>& task_hint) {
    if (!task_hint.has_value() || trim_copy(*task_hint).empty()) {
        return "";
    }
    return "Task context: " + *task_hint;
}

bool is_blank(const std::string& text) {
    return trim_copy(text).empty();
}

} // namespace

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary library;
    library.version_ = "v1";
    library.templates_[TemplateId::revision_ref_based] =
        split_template(ref_based_template_text(), "revision_ref_based (builtin)");
    library.templates_[TemplateId::revision_ref_free] =
        split_template(ref_free_template_text(), "revision_ref_free (builtin)");
    library.templates_[TemplateId::gpt_score] =
        split_template(gpt_score_template_text(), "gpt_score (builtin)");
    return library;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
    PromptLibrary library;
    library.version_ = trim_copy(read_file(dir / "VERSION"));
    if (library.version_.empty()) {
        throw ConfigError("template VERSION file in " + dir.string() + " is empty");
    }
    for (TemplateId id : {TemplateId::revision_ref_based, TemplateId::revision_ref_free,
                          TemplateId::gpt_score}) {
        std::filesystem::path file = dir / (std::string(to_string(id)) + ".txt");
        library.templates_[id] = split_template(read_file(file), file.string());
    }
    return library;
}

const PromptTemplate& PromptLibrary::get(TemplateId id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) {
        throw ConfigError("prompt library has no template " + std::string(to_string(id)));
    }
    return it->second;
}

PromptRequest build_revision_prompt(const PromptLibrary& library, const std::string& draft,
                                    const std::optional<std::string>& reference,
                                    const std::optional<std::string>& task_hint,
                                    const std::string& document_id) {
    if (is_blank(draft)) {
        throw ConfigError("cannot build a revision prompt for an empty draft");
    }
    std::map<std::string, std::string> values;
    values["draft"] = draft;
    values["task_hint"] = hint_block(task_hint);
    if (reference.has_value()) {
        values["reference"] = *reference;
        return render_request(library, TemplateId::revision_ref_based, values, document_id);
    }
    return render_request(library, TemplateId::revision_ref_free, values, document_id);
}

PromptRequest build_gpt_score_prompt(const PromptLibrary& library, const std::string& candidate,
                                     const std::optional<std::string>& reference,
                                     const std::optional<std::string>& task_hint,
                                     const std::string& document_id) {
    if (is_blank(candidate)) {
        throw ConfigError("cannot build a gpt-score prompt for an empty candidate");
    }
    std::map<std::string, std::string> values;
    values["draft"] = candidate;
    values["task_hint"] = hint_block(task_hint);
    values["reference"] = reference.value_or("(none)");
    return render_request(library, TemplateId::gpt_score, values, document_id);
}

PromptRequest with_corrective_suffix(const PromptRequest& request, std::string_view suffix) {
    PromptRequest corrected = request;
    corrected.user_text += "\n\n";
    corrected.user_text += suffix;
    corrected.rendered_prompt = corrected.system_text + "\n\n" + corrected.user_text;
    return corrected;
}

} // namespace revdist
