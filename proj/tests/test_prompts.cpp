#include <doctest.h>

#include <filesystem>

#include "revdist/errors.hpp"
#include "revdist/prompts.hpp"

using namespace revdist;

#ifndef REVDIST_TEMPLATES_DIR
#define REVDIST_TEMPLATES_DIR "templates"
#endif

namespace {

const char* kFieldNames[] = {"action_name",       "revision_description", "revision_level",
                             "revision_intention", "original_snippet",     "revised_snippet"};

} // namespace

TEST_CASE("reference-based prompt carries both texts and the six field names") {
    PromptLibrary library = PromptLibrary::builtin();
    PromptRequest request = build_revision_prompt(
        library, "the draft body text", std::string("the reference body text"), std::nullopt,
        "doc-1");
    CHECK(request.template_id == TemplateId::revision_ref_based);
    CHECK(request.rendered_prompt.find("the draft body text") != std::string::npos);
    CHECK(request.rendered_prompt.find("the reference body text") != std::string::npos);
    for (const char* field : kFieldNames) {
        CHECK(request.rendered_prompt.find(field) != std::string::npos);
    }
    CHECK(request.rendered_prompt.find("{{") == std::string::npos);
    CHECK(request.document_id == "doc-1");
}

TEST_CASE("reference-free prompt carries the hint and no reference block") {
    PromptLibrary library = PromptLibrary::builtin();
    PromptRequest request = build_revision_prompt(library, "a draft", std::nullopt,
                                                  std::string("academic related-work section"));
    CHECK(request.template_id == TemplateId::revision_ref_free);
    CHECK(request.rendered_prompt.find("academic related-work section") != std::string::npos);
    CHECK(request.rendered_prompt.find("### Reference") == std::string::npos);
    for (const char* field : kFieldNames) {
        CHECK(request.rendered_prompt.find(field) != std::string::npos);
    }
    CHECK(request.rendered_prompt.find("{{") == std::string::npos);
}

TEST_CASE("empty drafts are rejected") {
    PromptLibrary library = PromptLibrary::builtin();
    CHECK_THROWS_AS(build_revision_prompt(library, ""), ConfigError);
    CHECK_THROWS_AS(build_revision_prompt(library, "   \n"), ConfigError);
    CHECK_THROWS_AS(build_gpt_score_prompt(library, ""), ConfigError);
}

TEST_CASE("gpt-score prompt mentions the scale and embeds the candidate") {
    PromptLibrary library = PromptLibrary::builtin();
    PromptRequest request =
        build_gpt_score_prompt(library, "candidate paragraph", std::string("gold paragraph"));
    CHECK(request.template_id == TemplateId::gpt_score);
    CHECK(request.rendered_prompt.find("candidate paragraph") != std::string::npos);
    CHECK(request.rendered_prompt.find("gold paragraph") != std::string::npos);
    CHECK(request.rendered_prompt.find("100") != std::string::npos);

    PromptRequest no_ref = build_gpt_score_prompt(library, "candidate paragraph");
    CHECK(no_ref.rendered_prompt.find("(none)") != std::string::npos);
}

TEST_CASE("drafts containing braces render inert") {
    PromptLibrary library = PromptLibrary::builtin();
    PromptRequest request =
        build_revision_prompt(library, "code: {{not_a_placeholder}} stays", std::nullopt);
    CHECK(request.rendered_prompt.find("{{not_a_placeholder}} stays") != std::string::npos);
}

TEST_CASE("the shipped template files match the builtin library") {
    PromptLibrary builtin = PromptLibrary::builtin();
    PromptLibrary shipped = PromptLibrary::from_directory(REVDIST_TEMPLATES_DIR);
    CHECK(shipped.version() == builtin.version());
    for (TemplateId id : {TemplateId::revision_ref_based, TemplateId::revision_ref_free,
                          TemplateId::gpt_score}) {
        CHECK(shipped.get(id).system_text == builtin.get(id).system_text);
        CHECK(shipped.get(id).user_text == builtin.get(id).user_text);
    }
}

TEST_CASE("corrective suffix extends the user payload") {
    PromptLibrary library = PromptLibrary::builtin();
    PromptRequest request = build_revision_prompt(library, "a draft", std::nullopt);
    PromptRequest corrected = with_corrective_suffix(request, "Return only a JSON array.");
    CHECK(corrected.user_text.find("Return only a JSON array.") != std::string::npos);
    CHECK(corrected.rendered_prompt != request.rendered_prompt);
    CHECK(corrected.system_text == request.system_text);
}

TEST_CASE("missing template directory fails loudly") {
    CHECK_THROWS_AS(PromptLibrary::from_directory("/nonexistent/templates"), Error);
}
