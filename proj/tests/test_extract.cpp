#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "revdist/errors.hpp"
#include "revdist/extract.hpp"

using namespace revdist;

#ifndef REVDIST_DATA_DIR
#define REVDIST_DATA_DIR "tests/data"
#endif

namespace {

nlohmann::json load_cases() {
    std::ifstream in(std::string(REVDIST_DATA_DIR) + "/malformed_responses.json");
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return nlohmann::json::parse(buffer.str());
}

} // namespace

TEST_CASE("the malformed-response fixture suite produces the expected outcomes") {
    nlohmann::json cases = load_cases();
    REQUIRE(cases.size() == 12);
    for (const auto& item : cases) {
        CAPTURE(item.at("name").get<std::string>());
        std::string raw = item.at("raw").get<std::string>();
        std::string expect = item.at("expect").get<std::string>();
        if (expect == "parse_error") {
            CHECK_THROWS_AS(extract_structured_edits(raw), ParseError);
            continue;
        }
        ExtractionResult result = extract_structured_edits(raw);
        CHECK(result.edits.size() == item.at("count").get<std::size_t>());
        CHECK(result.dropped.size() == item.at("dropped").get<std::size_t>());
        for (const RevisionEdit& edit : result.edits) {
            CHECK(is_valid_edit(edit));
        }
    }
}

TEST_CASE("absent optional fields become empty strings") {
    ExtractionResult result = extract_structured_edits(
        R"([{"action_name": "expand", "original_snippet": "a", "revised_snippet": "ab"}])");
    REQUIRE(result.edits.size() == 1);
    CHECK(result.edits[0].revision_level.empty());
    CHECK(result.edits[0].revision_intention.empty());
    CHECK(result.edits[0].revision_description.empty());
}

TEST_CASE("action names are trimmed") {
    ExtractionResult result = extract_structured_edits(
        R"([{"action_name": "  Reorder \n", "original_snippet": "a", "revised_snippet": "b"}])");
    REQUIRE(result.edits.size() == 1);
    CHECK(result.edits[0].action_name == "Reorder");
}

TEST_CASE("a whitespace-only action name is dropped") {
    ExtractionResult result = extract_structured_edits(
        R"([{"action_name": "   ", "original_snippet": "a", "revised_snippet": "b"}])");
    CHECK(result.edits.empty());
    CHECK(result.dropped.size() == 1);
}

TEST_CASE("the first top-level array wins over a later object") {
    ExtractionResult result = extract_structured_edits(
        R"(noise [{"action_name": "clarify", "original_snippet": "x", "revised_snippet": "y"}] )"
        R"(then {"edits": [{"action_name": "other", "original_snippet": "q", "revised_snippet": "r"}]})");
    REQUIRE(result.edits.size() == 1);
    CHECK(result.edits[0].action_name == "clarify");
}

TEST_CASE("a leading object is skipped in favor of a top-level array") {
    ExtractionResult result = extract_structured_edits(
        R"({"status": "ok"} [{"action_name": "clarify", "original_snippet": "x", "revised_snippet": "y"}])");
    REQUIRE(result.edits.size() == 1);
}

TEST_CASE("fenced blocks shadow everything outside them") {
    // the array outside the fence must not be considered
    std::string raw = "```\n{\"items\": [{\"action_name\": \"inner\", \"original_snippet\": "
                      "\"a\", \"revised_snippet\": \"b\"}]}\n```\n"
                      "[{\"action_name\": \"outer\", \"original_snippet\": \"c\", "
                      "\"revised_snippet\": \"d\"}]";
    ExtractionResult result = extract_structured_edits(raw);
    REQUIRE(result.edits.size() == 1);
    CHECK(result.edits[0].action_name == "inner");
}

TEST_CASE("numeric field values are tolerated as strings") {
    ExtractionResult result = extract_structured_edits(
        R"([{"action_name": "fix", "revision_level": 2, "original_snippet": "a", "revised_snippet": "b"}])");
    REQUIRE(result.edits.size() == 1);
    CHECK(result.edits[0].revision_level == "2");
}

TEST_CASE("extracted edits always satisfy the model invariants") {
    const char* raws[] = {
        R"([{"action_name": "a", "original_snippet": "x", "revised_snippet": ""}])",
        R"([{"action_name": "b", "original_snippet": "", "revised_snippet": "y"}])",
        R"([{"action_name": "", "original_snippet": "x", "revised_snippet": "y"},
            {"action_name": "ok", "original_snippet": "x", "revised_snippet": "y"}])",
    };
    for (const char* raw : raws) {
        ExtractionResult result = extract_structured_edits(raw);
        for (const RevisionEdit& edit : result.edits) {
            CHECK(is_valid_edit(edit));
        }
    }
}
