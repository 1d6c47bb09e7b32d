#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revdist/backend.hpp"
#include "revdist/categorize.hpp"
#include "revdist/corpus.hpp"
#include "revdist/edit_model.hpp"
#include "revdist/prompts.hpp"

namespace revdist {

enum class RunMode { reference_based, reference_free };
enum class TiePolicy { count_as_disagreement, count_as_half, exclude };

std::string_view to_string(RunMode mode);
std::string_view to_string(TiePolicy policy);
std::optional<RunMode> run_mode_from_string(std::string_view name);
std::optional<TiePolicy> tie_policy_from_string(std::string_view name);

/// Metric names accepted in RunConfig::metrics.
const std::set<std::string>& known_metrics();
/// True for metrics where smaller is better (revision_distance).
bool lower_is_better(const std::string& metric);
/// Human-readable label ("revision_distance" -> "D_Revision").
std::string metric_display_name(const std::string& metric);

inline constexpr const char* kChangeConvention = "weak-denominator";
inline constexpr const char* kReportSchema = "revdist-report/1";
inline constexpr const char* kComparisonSchema = "revdist-comparison/1";
inline constexpr const char* kAgreementSchema = "revdist-agreement/1";

struct RunConfig {
    RunMode mode = RunMode::reference_based;
    std::set<std::string> metrics = {"revision_distance"};
    BackendConfig backend;
    int worker_count = 1;
    TiePolicy tie_policy = TiePolicy::count_as_disagreement;
    std::size_t max_edits = 50;
    bool fail_fast = false;
    CategoryKeywords keywords = CategoryKeywords::defaults();
    std::optional<std::string> default_task_hint;

    /// Throws ConfigError on unknown metrics or impossible combinations
    /// (reference-free ROUGE, reference-free with neither revision_distance
    /// nor gpt_score, non-positive workers).
    void validate() const;
};

/// The slice of the configuration every report embeds so results stay
/// attributable. Worker count is deliberately not part of it: reports are
/// identical however the work was scheduled.
struct ReportContext {
    RunMode mode = RunMode::reference_based;
    std::set<std::string> metrics;
    std::string model_name;
    double temperature = 0.0;
    TiePolicy tie_policy = TiePolicy::count_as_disagreement;
    std::string template_version;
    std::size_t max_edits = 50;

    bool operator==(const ReportContext&) const = default;
};

struct RunDiagnostics {
    struct Failure {
        std::string document_id;
        std::string error;
        bool operator==(const Failure&) const = default;
    };
    std::vector<Failure> failed_documents;
    int parse_retries = 0;
    int truncated_documents = 0;
    int ungrounded_edits = 0;
    int dropped_elements = 0;

    bool operator==(const RunDiagnostics&) const = default;
};

struct RunReport {
    ReportContext context;
    std::vector<DocumentEval> documents; // corpus order, failures omitted
    std::size_t corpus_size = 0;
    std::optional<double> mean_revision_distance;
    std::map<EditCategory, double> mean_category_counts;
    std::map<std::string, double> mean_baselines;
    RunDiagnostics diagnostics;

    std::size_t evaluated_count() const { return documents.size(); }

    bool operator==(const RunReport&) const = default;
};

/// Evaluates every record with the requested metrics and aggregates the
/// means. Document order in the report matches corpus order regardless of
/// worker scheduling; per-document failures are skipped and reported unless
/// fail_fast is set.
RunReport evaluate_corpus(std::span<const CorpusRecord> records, const RunConfig& config,
                          LLMBackend& backend, const PromptLibrary& library);

enum class ChangeDirection { improvement, decline, unchanged, undefined };
std::string_view to_string(ChangeDirection direction);
std::optional<ChangeDirection> change_direction_from_string(std::string_view name);

struct MetricComparison {
    double weak_value = 0.0;
    double strong_value = 0.0;
    std::optional<double> relative_change_percent; // absent when weak == 0
    ChangeDirection direction = ChangeDirection::unchanged;

    bool operator==(const MetricComparison&) const = default;
};

struct ComparisonReport {
    std::map<std::string, MetricComparison> metrics;
    std::string convention = kChangeConvention;

    bool operator==(const ComparisonReport&) const = default;
};

/// Relative change from the weak run to the strong run, weak-denominator
/// convention for every metric. Direction is improvement when the strong
/// model moved the metric the right way. Throws ConfigError when the two
/// reports cover different metric sets.
ComparisonReport compare_runs(const RunReport& weak, const RunReport& strong);

enum class PairResult { agree, disagree, tie };
std::string_view to_string(PairResult result);
std::optional<PairResult> pair_result_from_string(std::string_view name);

struct PairOutcome {
    std::string pair_id;
    std::size_t chosen_distance = 0;
    std::size_t rejected_distance = 0;
    PairResult result = PairResult::tie;

    bool operator==(const PairOutcome&) const = default;
};

struct AgreementReport {
    ReportContext context;
    std::vector<PairOutcome> pairs; // corpus order, failures omitted
    std::size_t corpus_size = 0;
    std::size_t total_pairs = 0; // pairs that evaluated successfully
    std::size_t agreements = 0;
    std::size_t ties = 0;
    std::optional<double> agreement_rate; // absent when the denominator is 0
    RunDiagnostics diagnostics;

    bool operator==(const AgreementReport&) const = default;
};

/// Reference-free pairwise agreement: an agreement is a pair whose chosen
/// text needed strictly fewer edits than its rejected text. Ties follow the
/// configured policy; failed pairs leave the denominator.
AgreementReport run_preference_agreement(std::span<const PreferencePair> pairs,
                                         const RunConfig& config, LLMBackend& backend,
                                         const PromptLibrary& library);

} // namespace revdist
