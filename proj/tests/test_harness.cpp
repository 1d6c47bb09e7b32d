#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "revdist/backend.hpp"
#include "revdist/corpus.hpp"
#include "revdist/errors.hpp"
#include "revdist/harness.hpp"
#include "revdist/report.hpp"

using namespace revdist;

#ifndef REVDIST_DATA_DIR
#define REVDIST_DATA_DIR "tests/data"
#endif

namespace {

std::string data_path(const char* name) { return std::string(REVDIST_DATA_DIR) + "/" + name; }

std::string edit_object(const char* action) {
    return std::string(R"({"action_name": ")") + action +
           R"(", "original_snippet": "paragraph", "revised_snippet": "section"})";
}

// 100 synthetic documents whose per-document category counts average
// order 0.80, comparison 0.84, description 2.29 (distance 3.93): docs 1-80
// get one reorder, 1-84 one comparison, all get two description edits and
// docs 1-29 a third.
struct CountsFixture {
    std::vector<CorpusRecord> records;
    ScriptedBackend backend;

    CountsFixture() {
        for (int i = 0; i < 100; ++i) {
            CorpusRecord record;
            record.document_id = "syn-" + std::to_string(i);
            record.draft = "Synthetic paragraph " + std::to_string(i) + " body text.";
            record.reference = "Reference paragraph " + std::to_string(i) + " body text.";
            records.push_back(record);

            std::vector<std::string> parts;
            if (i < 80) {
                parts.push_back(edit_object("Reorder"));
            }
            if (i < 84) {
                parts.push_back(edit_object("compare"));
            }
            parts.push_back(edit_object("simplify"));
            parts.push_back(edit_object("elaborate"));
            if (i < 29) {
                parts.push_back(edit_object("rewrite"));
            }
            std::string response = "[";
            for (std::size_t p = 0; p < parts.size(); ++p) {
                response += (p ? "," : "") + parts[p];
            }
            response += "]";
            backend.script("### Draft\n" + records.back().draft, {response});
        }
    }
};

RunConfig distance_only_config(int workers = 1) {
    RunConfig config;
    config.mode = RunMode::reference_based;
    config.metrics = {"revision_distance"};
    config.worker_count = workers;
    return config;
}

RunReport report_with_means(std::optional<double> distance,
                            std::map<std::string, double> baselines) {
    RunReport report;
    report.mean_revision_distance = distance;
    report.mean_baselines = std::move(baselines);
    return report;
}

} // namespace

TEST_CASE("category means aggregate to the constructed averages") {
    CountsFixture fixture;
    PromptLibrary library = PromptLibrary::builtin();
    RunConfig config = distance_only_config(3);
    RunReport report = evaluate_corpus(fixture.records, config, fixture.backend, library);

    REQUIRE(report.documents.size() == 100);
    REQUIRE(report.mean_revision_distance.has_value());
    CHECK(*report.mean_revision_distance == doctest::Approx(3.93).epsilon(1e-12));
    CHECK(report.mean_category_counts.at(EditCategory::Order) == doctest::Approx(0.80));
    CHECK(report.mean_category_counts.at(EditCategory::Comparison) == doctest::Approx(0.84));
    CHECK(report.mean_category_counts.at(EditCategory::Description) == doctest::Approx(2.29));
    CHECK(report.mean_category_counts.at(EditCategory::Other) == doctest::Approx(0.0));

    double category_sum = 0.0;
    for (const auto& [category, mean] : report.mean_category_counts) {
        category_sum += mean;
    }
    CHECK(category_sum == doctest::Approx(*report.mean_revision_distance));
}

TEST_CASE("full-precision means keep components and total consistent") {
    // A second constructed distribution: order 0.67, comparison 0.71,
    // description 2.36. Printed per-column rounding could drift (2 decimals
    // would show 3.74), so the report keeps full precision and the parts
    // must sum to the total exactly.
    std::vector<CorpusRecord> records;
    ScriptedBackend backend;
    for (int i = 0; i < 100; ++i) {
        CorpusRecord record;
        record.document_id = "cot-" + std::to_string(i);
        record.draft = "Second paragraph " + std::to_string(i) + " body text.";
        record.reference = "Second reference " + std::to_string(i) + " body text.";
        records.push_back(record);

        std::vector<std::string> parts;
        if (i < 67) parts.push_back(edit_object("Reorder"));
        if (i < 71) parts.push_back(edit_object("compare"));
        parts.push_back(edit_object("simplify"));
        parts.push_back(edit_object("elaborate"));
        if (i < 36) parts.push_back(edit_object("rewrite"));
        std::string response = "[";
        for (std::size_t p = 0; p < parts.size(); ++p) {
            response += (p ? "," : "") + parts[p];
        }
        response += "]";
        backend.script("### Draft\n" + records.back().draft, {response});
    }

    PromptLibrary library = PromptLibrary::builtin();
    RunConfig config = distance_only_config(2);
    RunReport report = evaluate_corpus(records, config, backend, library);
    REQUIRE(report.mean_revision_distance.has_value());
    CHECK(*report.mean_revision_distance == doctest::Approx(3.74).epsilon(1e-12));
    CHECK(report.mean_category_counts.at(EditCategory::Order) == doctest::Approx(0.67));
    CHECK(report.mean_category_counts.at(EditCategory::Comparison) == doctest::Approx(0.71));
    CHECK(report.mean_category_counts.at(EditCategory::Description) == doctest::Approx(2.36));

    double sum = 0.0;
    for (const auto& [category, mean] : report.mean_category_counts) {
        sum += mean;
    }
    CHECK(sum == doctest::Approx(*report.mean_revision_distance).epsilon(1e-12));
}

TEST_CASE("an empty corpus produces a report with absent means") {
    ScriptedBackend backend;
    PromptLibrary library = PromptLibrary::builtin();
    RunConfig config = distance_only_config();
    RunReport report = evaluate_corpus({}, config, backend, library);
    CHECK(report.corpus_size == 0);
    CHECK(report.documents.empty());
    CHECK_FALSE(report.mean_revision_distance.has_value());
    CHECK(report.mean_category_counts.empty());
    CHECK(report.mean_baselines.empty());
}

TEST_CASE("document order matches corpus order under any worker count") {
    CountsFixture fixture;
    PromptLibrary library = PromptLibrary::builtin();
    for (int workers : {1, 4, 7}) {
        RunConfig config = distance_only_config(workers);
        RunReport report = evaluate_corpus(fixture.records, config, fixture.backend, library);
        REQUIRE(report.documents.size() == fixture.records.size());
        for (std::size_t i = 0; i < report.documents.size(); ++i) {
            CHECK(report.documents[i].document_id == fixture.records[i].document_id);
        }
    }
}

TEST_CASE("replay runs are bit-deterministic across worker counts") {
    std::vector<CorpusRecord> records = load_reference_corpus(data_path("ref_corpus.jsonl"));
    PromptLibrary library = PromptLibrary::builtin();

    RunConfig config;
    config.mode = RunMode::reference_based;
    config.metrics = {"revision_distance", "rouge1", "rouge2", "rougeL", "gpt_score"};

    std::vector<std::string> dumps;
    for (int workers : {1, 1, 4}) {
        config.worker_count = workers;
        ReplayBackend backend(config.backend,
                              Transcript::load(data_path("ref_transcript.jsonl")));
        RunReport report = evaluate_corpus(records, config, backend, library);
        dumps.push_back(run_report_to_json(report).dump(2));
    }
    CHECK(dumps[0] == dumps[1]);
    CHECK(dumps[0] == dumps[2]);
}

TEST_CASE("permuting the corpus leaves the means unchanged") {
    CountsFixture fixture;
    PromptLibrary library = PromptLibrary::builtin();
    RunConfig config = distance_only_config(2);
    RunReport base = evaluate_corpus(fixture.records, config, fixture.backend, library);

    std::vector<CorpusRecord> shuffled = fixture.records;
    std::mt19937 rng(5);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    RunReport permuted = evaluate_corpus(shuffled, config, fixture.backend, library);

    CHECK(*permuted.mean_revision_distance == doctest::Approx(*base.mean_revision_distance));
    for (const auto& [category, mean] : base.mean_category_counts) {
        CHECK(permuted.mean_category_counts.at(category) == doctest::Approx(mean));
    }
}

TEST_CASE("per-document failures are skipped and reported") {
    std::vector<CorpusRecord> records = {
        {"ok-1", "first draft", std::string("ref one"), std::nullopt},
        {"bad-2", "second draft", std::string("ref two"), std::nullopt},
        {"ok-3", "third draft", std::string("ref three"), std::nullopt},
    };
    ScriptedBackend backend;
    backend.script("### Draft\nfirst draft",
                   {R"([{"action_name": "clarify", "original_snippet": "first", "revised_snippet": "1st"}])"});
    backend.script_failure("### Draft\nsecond draft", "backend exploded");
    backend.script("### Draft\nthird draft", {"[]"});

    PromptLibrary library = PromptLibrary::builtin();
    RunConfig config = distance_only_config();
    RunReport report = evaluate_corpus(records, config, backend, library);

    CHECK(report.corpus_size == 3);
    CHECK(report.documents.size() == 2);
    REQUIRE(report.diagnostics.failed_documents.size() == 1);
    CHECK(report.diagnostics.failed_documents[0].document_id == "bad-2");
    CHECK(*report.mean_revision_distance == doctest::Approx(0.5));
}

TEST_CASE("fail_fast aborts the run") {
    std::vector<CorpusRecord> records = {
        {"bad-1", "alpha draft", std::string("r"), std::nullopt},
    };
    ScriptedBackend backend;
    backend.script_failure("alpha draft", "boom");
    PromptLibrary library = PromptLibrary::builtin();
    RunConfig config = distance_only_config();
    config.fail_fast = true;
    CHECK_THROWS_AS(evaluate_corpus(records, config, backend, library), BackendError);
}

TEST_CASE("configuration validation rejects impossible runs") {
    RunConfig config;
    config.metrics = {"rouge1"};
    config.mode = RunMode::reference_free;
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config.metrics = {"made_up"};
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config.mode = RunMode::reference_based;
    config.metrics = {"revision_distance"};
    config.worker_count = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config.worker_count = 1;
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("reference-based distance runs demand references") {
    std::vector<CorpusRecord> records = {{"d1", "draft", std::nullopt, std::nullopt}};
    ScriptedBackend backend;
    PromptLibrary library = PromptLibrary::builtin();
    RunConfig config = distance_only_config();
    CHECK_THROWS_AS(evaluate_corpus(records, config, backend, library), ConfigError);
}

TEST_CASE("compare_runs reproduces the reference change rates") {
    RunReport weak = report_with_means(3.20, {{"rouge1", 50.53}});
    RunReport strong = report_with_means(2.79, {{"rouge1", 51.65}});
    ComparisonReport comparison = compare_runs(weak, strong);

    const MetricComparison& distance = comparison.metrics.at("revision_distance");
    REQUIRE(distance.relative_change_percent.has_value());
    CHECK(*distance.relative_change_percent == doctest::Approx(12.8125));
    CHECK(distance.direction == ChangeDirection::improvement);
    CHECK(format_fixed(*distance.relative_change_percent, 1) == "12.8");

    const MetricComparison& rouge = comparison.metrics.at("rouge1");
    REQUIRE(rouge.relative_change_percent.has_value());
    CHECK(format_fixed(*rouge.relative_change_percent, 1) == "2.2");
    CHECK(rouge.direction == ChangeDirection::improvement);
}

TEST_CASE("compare_runs on the harder pair prints 5.3") {
    RunReport weak = report_with_means(3.94, {});
    RunReport strong = report_with_means(3.73, {});
    ComparisonReport comparison = compare_runs(weak, strong);
    const MetricComparison& distance = comparison.metrics.at("revision_distance");
    REQUIRE(distance.relative_change_percent.has_value());
    CHECK(format_fixed(*distance.relative_change_percent, 1) == "5.3");
    CHECK(distance.direction == ChangeDirection::improvement);
}

TEST_CASE("identical runs compare to zero change") {
    RunReport report = report_with_means(2.0, {{"rouge1", 50.0}});
    ComparisonReport comparison = compare_runs(report, report);
    for (const auto& [metric, entry] : comparison.metrics) {
        REQUIRE(entry.relative_change_percent.has_value());
        CHECK(*entry.relative_change_percent == doctest::Approx(0.0));
        CHECK(entry.direction == ChangeDirection::unchanged);
    }
}

TEST_CASE("a larger distance under the strong model is a decline") {
    RunReport weak = report_with_means(2.0, {{"gpt_score", 90.0}});
    RunReport strong = report_with_means(3.0, {{"gpt_score", 88.0}});
    ComparisonReport comparison = compare_runs(weak, strong);
    CHECK(comparison.metrics.at("revision_distance").direction == ChangeDirection::decline);
    CHECK(comparison.metrics.at("gpt_score").direction == ChangeDirection::decline);
}

TEST_CASE("metric-set mismatch is an error") {
    RunReport weak = report_with_means(3.0, {{"rouge1", 50.0}});
    RunReport strong = report_with_means(2.0, {});
    CHECK_THROWS_AS(compare_runs(weak, strong), ConfigError);
}

TEST_CASE("a zero weak mean yields an undefined change") {
    RunReport weak = report_with_means(0.0, {});
    RunReport strong = report_with_means(1.0, {});
    ComparisonReport comparison = compare_runs(weak, strong);
    const MetricComparison& entry = comparison.metrics.at("revision_distance");
    CHECK_FALSE(entry.relative_change_percent.has_value());
    CHECK(entry.direction == ChangeDirection::undefined);
}

namespace {

RunConfig agreement_config(TiePolicy policy = TiePolicy::count_as_disagreement) {
    RunConfig config;
    config.mode = RunMode::reference_free;
    config.metrics = {"revision_distance"};
    config.tie_policy = policy;
    return config;
}

void script_pair(ScriptedBackend& backend, const PreferencePair& pair, int chosen_edits,
                 int rejected_edits) {
    auto array = [](int n) {
        std::string out = "[";
        for (int i = 0; i < n; ++i) {
            out += std::string(i ? "," : "") +
                   R"({"action_name": "clarify", "original_snippet": "a", "revised_snippet": "b"})";
        }
        return out + "]";
    };
    backend.script("### Draft\n" + pair.chosen, {array(chosen_edits)});
    backend.script("### Draft\n" + pair.rejected, {array(rejected_edits)});
}

} // namespace

TEST_CASE("a single decisive pair gives rate 1.0") {
    std::vector<PreferencePair> pairs = {{"p1", std::nullopt, "good text", "weak text"}};
    ScriptedBackend backend;
    script_pair(backend, pairs[0], 1, 3);
    PromptLibrary library = PromptLibrary::builtin();
    AgreementReport report =
        run_preference_agreement(pairs, agreement_config(), backend, library);
    REQUIRE(report.agreement_rate.has_value());
    CHECK(*report.agreement_rate == doctest::Approx(1.0));
    CHECK(report.agreements == 1);
    CHECK(report.pairs[0].result == PairResult::agree);
}

TEST_CASE("all ties score zero under the default policy") {
    std::vector<PreferencePair> pairs = {{"p1", std::nullopt, "text a", "text b"},
                                         {"p2", std::nullopt, "text c", "text d"}};
    ScriptedBackend backend;
    script_pair(backend, pairs[0], 2, 2);
    script_pair(backend, pairs[1], 1, 1);
    PromptLibrary library = PromptLibrary::builtin();
    AgreementReport report =
        run_preference_agreement(pairs, agreement_config(), backend, library);
    REQUIRE(report.agreement_rate.has_value());
    CHECK(*report.agreement_rate == doctest::Approx(0.0));
    CHECK(report.ties == 2);
}

TEST_CASE("tie policies adjust credit and denominator") {
    std::vector<PreferencePair> pairs = {{"p1", std::nullopt, "aa", "bb"},
                                         {"p2", std::nullopt, "cc", "dd"}};
    PromptLibrary library = PromptLibrary::builtin();

    auto run_with = [&](TiePolicy policy) {
        ScriptedBackend backend;
        script_pair(backend, pairs[0], 1, 2); // agree
        script_pair(backend, pairs[1], 2, 2); // tie
        return run_preference_agreement(pairs, agreement_config(policy), backend, library);
    };

    AgreementReport strict = run_with(TiePolicy::count_as_disagreement);
    CHECK(*strict.agreement_rate == doctest::Approx(0.5));

    AgreementReport half = run_with(TiePolicy::count_as_half);
    CHECK(*half.agreement_rate == doctest::Approx(0.75));

    AgreementReport excluded = run_with(TiePolicy::exclude);
    CHECK(*excluded.agreement_rate == doctest::Approx(1.0));
}

TEST_CASE("all ties under exclude leaves the rate undefined") {
    std::vector<PreferencePair> pairs = {{"p1", std::nullopt, "aa", "bb"}};
    ScriptedBackend backend;
    script_pair(backend, pairs[0], 2, 2);
    PromptLibrary library = PromptLibrary::builtin();
    AgreementReport report =
        run_preference_agreement(pairs, agreement_config(TiePolicy::exclude), backend, library);
    CHECK_FALSE(report.agreement_rate.has_value());
    CHECK(report.ties == 1);
}

TEST_CASE("the shipped 41-pair fixture replays to 31 agreements") {
    std::vector<PreferencePair> pairs = load_preference_corpus(data_path("pref_corpus.jsonl"));
    REQUIRE(pairs.size() == 41);
    RunConfig config = agreement_config();
    config.worker_count = 4;
    ReplayBackend backend(config.backend, Transcript::load(data_path("pref_transcript.jsonl")));
    PromptLibrary library = PromptLibrary::builtin();
    AgreementReport report = run_preference_agreement(pairs, config, backend, library);
    CHECK(report.total_pairs == 41);
    CHECK(report.agreements == 31);
    CHECK(report.ties == 4);
    REQUIRE(report.agreement_rate.has_value());
    CHECK(format_fixed(*report.agreement_rate * 100.0, 1) == "75.6");
}

TEST_CASE("failed pairs leave the denominator") {
    std::vector<PreferencePair> pairs = {{"p1", std::nullopt, "one good", "one bad"},
                                         {"p2", std::nullopt, "two good", "two bad"}};
    ScriptedBackend backend;
    script_pair(backend, pairs[0], 1, 2);
    backend.script("### Draft\ntwo good", {"no json", "still none"});
    PromptLibrary library = PromptLibrary::builtin();
    AgreementReport report =
        run_preference_agreement(pairs, agreement_config(), backend, library);
    CHECK(report.total_pairs == 1);
    CHECK(report.diagnostics.failed_documents.size() == 1);
    REQUIRE(report.agreement_rate.has_value());
    CHECK(*report.agreement_rate == doctest::Approx(1.0));
}

TEST_CASE("agreement requires reference_free mode") {
    std::vector<PreferencePair> pairs = {{"p1", std::nullopt, "a", "b"}};
    ScriptedBackend backend;
    PromptLibrary library = PromptLibrary::builtin();
    RunConfig config = agreement_config();
    config.mode = RunMode::reference_based;
    CHECK_THROWS_AS(run_preference_agreement(pairs, config, backend, library), ConfigError);
}
