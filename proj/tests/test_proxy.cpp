#include <doctest.h>

#include "revdist/backend.hpp"
#include "revdist/errors.hpp"
#include "revdist/gpt_score.hpp"
#include "revdist/proxy.hpp"

using namespace revdist;

namespace {

const char* kFourEdits =
    R"([{"action_name": "simplify", "original_snippet": "a", "revised_snippet": "b"},
        {"action_name": "Reorder", "original_snippet": "c", "revised_snippet": "d"},
        {"action_name": "compare", "original_snippet": "e", "revised_snippet": "f"},
        {"action_name": "clarify", "original_snippet": "g", "revised_snippet": "h"}])";

} // namespace

TEST_CASE("a four-element response yields four edits") {
    ScriptedBackend backend;
    backend.enqueue(kFourEdits);
    PromptLibrary library = PromptLibrary::builtin();
    GenerationResult result = generate_revision_edits(backend, library, "doc", "some draft");
    CHECK(result.edits.size() == 4);
    CHECK(count_revision_distance(result.edits) == 4);
    CHECK(result.diagnostics.parse_retries == 0);
    CHECK_FALSE(result.diagnostics.truncated);
}

TEST_CASE("prose then valid JSON succeeds through the corrective retry") {
    ScriptedBackend backend;
    backend.enqueue("Happy to help! The draft reads well overall.");
    backend.enqueue(R"([{"action_name": "clarify", "original_snippet": "x", "revised_snippet": "y"}])");
    PromptLibrary library = PromptLibrary::builtin();
    GenerationResult result = generate_revision_edits(backend, library, "doc", "some draft");
    REQUIRE(result.edits.size() == 1);
    CHECK(result.edits[0].action_name == "clarify");
    CHECK(result.diagnostics.parse_retries == 1);
    CHECK(backend.calls() == 2);
}

TEST_CASE("prose twice is a hard ParseError") {
    ScriptedBackend backend;
    backend.enqueue("Sorry, I can only describe the changes in words.");
    backend.enqueue("Still no structured output here.");
    PromptLibrary library = PromptLibrary::builtin();
    CHECK_THROWS_AS(generate_revision_edits(backend, library, "doc", "some draft"), ParseError);
    CHECK(backend.calls() == 2);
}

TEST_CASE("edit lists are capped at max_edits with a loud diagnostic") {
    std::string many = "[";
    for (int i = 0; i < 60; ++i) {
        if (i > 0) {
            many += ",";
        }
        many += R"({"action_name": "fix", "original_snippet": "s)" + std::to_string(i) +
                R"(", "revised_snippet": "t"})";
    }
    many += "]";

    ScriptedBackend backend;
    backend.enqueue(many);
    PromptLibrary library = PromptLibrary::builtin();
    GenerationOptions options;
    options.max_edits = 50;
    GenerationResult result = generate_revision_edits(backend, library, "doc", "draft", options);
    CHECK(result.edits.size() == 50);
    CHECK(result.diagnostics.truncated);
}

TEST_CASE("backend failures propagate") {
    ScriptedBackend backend;
    backend.script_failure("draft", "boom");
    PromptLibrary library = PromptLibrary::builtin();
    CHECK_THROWS_AS(generate_revision_edits(backend, library, "doc", "the draft"), BackendError);
}

TEST_CASE("gpt_score parses plain integers") {
    ScriptedBackend backend;
    backend.enqueue("87");
    PromptLibrary library = PromptLibrary::builtin();
    GptScoreResult result = run_gpt_score(backend, library, "candidate text");
    CHECK(result.score.value == doctest::Approx(87.0));
    CHECK(result.score.metric_name == "gpt_score");
    CHECK(result.score.higher_is_better);
    CHECK(result.parse_retries == 0);
}

TEST_CASE("gpt_score takes the first in-range integer") {
    ScriptedBackend backend;
    backend.enqueue("Score: 90/100.");
    PromptLibrary library = PromptLibrary::builtin();
    CHECK(run_gpt_score(backend, library, "candidate").score.value == doctest::Approx(90.0));

    ScriptedBackend backend2;
    backend2.enqueue("I'd say 150 is too high, realistically 85.");
    CHECK(run_gpt_score(backend2, library, "candidate").score.value == doctest::Approx(85.0));
}

TEST_CASE("gpt_score without any integer fails after the corrective retry") {
    ScriptedBackend backend;
    backend.enqueue("excellent");
    backend.enqueue("truly excellent");
    PromptLibrary library = PromptLibrary::builtin();
    CHECK_THROWS_AS(run_gpt_score(backend, library, "candidate"), ParseError);
    CHECK(backend.calls() == 2);
}

TEST_CASE("gpt_score recovers on the corrective retry") {
    ScriptedBackend backend;
    backend.enqueue("excellent");
    backend.enqueue("78");
    PromptLibrary library = PromptLibrary::builtin();
    GptScoreResult result = run_gpt_score(backend, library, "candidate");
    CHECK(result.score.value == doctest::Approx(78.0));
    CHECK(result.parse_retries == 1);
}
