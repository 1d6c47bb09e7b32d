#include "revdist/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "revdist/errors.hpp"

namespace revdist {

namespace {

using nlohmann::json;

json context_to_json(const ReportContext& context) {
    return json{
        {"mode", std::string(to_string(context.mode))},
        {"metrics", context.metrics},
        {"model", context.model_name},
        {"temperature", context.temperature},
        {"tie_policy", std::string(to_string(context.tie_policy))},
        {"prompt_template_version", context.template_version},
        {"max_edits", context.max_edits},
        {"relative_change_convention", kChangeConvention},
    };
}

ReportContext context_from_json(const json& data) {
    ReportContext context;
    auto mode = run_mode_from_string(data.at("mode").get<std::string>());
    if (!mode) {
        throw FormatError("unknown run mode in report config");
    }
    context.mode = *mode;
    for (const auto& metric : data.at("metrics")) {
        context.metrics.insert(metric.get<std::string>());
    }
    context.model_name = data.at("model").get<std::string>();
    context.temperature = data.at("temperature").get<double>();
    auto policy = tie_policy_from_string(data.at("tie_policy").get<std::string>());
    if (!policy) {
        throw FormatError("unknown tie policy in report config");
    }
    context.tie_policy = *policy;
    context.template_version = data.at("prompt_template_version").get<std::string>();
    context.max_edits = data.at("max_edits").get<std::size_t>();
    return context;
}

json edit_to_json(const GroundedEdit& grounded) {
    json out = {
        {"action_name", grounded.edit.action_name},
        {"revision_description", grounded.edit.revision_description},
        {"revision_level", grounded.edit.revision_level},
        {"revision_intention", grounded.edit.revision_intention},
        {"original_snippet", grounded.edit.original_snippet},
        {"revised_snippet", grounded.edit.revised_snippet},
        {"grounded", grounded.grounded},
        {"category", std::string(to_string(grounded.category))},
    };
    if (grounded.match_offset.has_value()) {
        out["match_offset"] = *grounded.match_offset;
    }
    return out;
}

GroundedEdit edit_from_json(const json& data) {
    GroundedEdit grounded;
    grounded.edit.action_name = data.at("action_name").get<std::string>();
    grounded.edit.revision_description = data.at("revision_description").get<std::string>();
    grounded.edit.revision_level = data.at("revision_level").get<std::string>();
    grounded.edit.revision_intention = data.at("revision_intention").get<std::string>();
    grounded.edit.original_snippet = data.at("original_snippet").get<std::string>();
    grounded.edit.revised_snippet = data.at("revised_snippet").get<std::string>();
    grounded.grounded = data.at("grounded").get<bool>();
    auto category = category_from_string(data.at("category").get<std::string>());
    if (!category) {
        throw FormatError("unknown edit category in report");
    }
    grounded.category = *category;
    if (data.contains("match_offset")) {
        grounded.match_offset = data.at("match_offset").get<std::size_t>();
    }
    return grounded;
}

json document_to_json(const DocumentEval& eval) {
    json edits = json::array();
    for (const GroundedEdit& edit : eval.edits) {
        edits.push_back(edit_to_json(edit));
    }
    json categories = json::object();
    for (const auto& [category, count] : eval.category_counts) {
        categories[std::string(to_string(category))] = count;
    }
    return json{
        {"document_id", eval.document_id},
        {"edits", std::move(edits)},
        {"revision_distance", eval.revision_distance},
        {"category_counts", std::move(categories)},
        {"baseline_scores", eval.baseline_scores},
    };
}

DocumentEval document_from_json(const json& data) {
    DocumentEval eval;
    eval.document_id = data.at("document_id").get<std::string>();
    for (const auto& edit : data.at("edits")) {
        eval.edits.push_back(edit_from_json(edit));
    }
    eval.revision_distance = data.at("revision_distance").get<std::size_t>();
    for (const auto& [name, count] : data.at("category_counts").items()) {
        auto category = category_from_string(name);
        if (!category) {
            throw FormatError("unknown category \"" + name + "\" in report");
        }
        eval.category_counts[*category] = count.get<std::size_t>();
    }
    if (data.contains("baseline_scores")) {
        for (const auto& [metric, value] : data.at("baseline_scores").items()) {
            eval.baseline_scores[metric] = value.get<double>();
        }
    }
    return eval;
}

json diagnostics_to_json(const RunDiagnostics& diagnostics) {
    json failures = json::array();
    for (const auto& failure : diagnostics.failed_documents) {
        failures.push_back({{"document_id", failure.document_id}, {"error", failure.error}});
    }
    return json{
        {"failed_documents", std::move(failures)},
        {"parse_retries", diagnostics.parse_retries},
        {"truncated_documents", diagnostics.truncated_documents},
        {"ungrounded_edits", diagnostics.ungrounded_edits},
        {"dropped_elements", diagnostics.dropped_elements},
    };
}

RunDiagnostics diagnostics_from_json(const json& data) {
    RunDiagnostics diagnostics;
    for (const auto& failure : data.at("failed_documents")) {
        diagnostics.failed_documents.push_back({failure.at("document_id").get<std::string>(),
                                                failure.at("error").get<std::string>()});
    }
    diagnostics.parse_retries = data.at("parse_retries").get<int>();
    diagnostics.truncated_documents = data.at("truncated_documents").get<int>();
    diagnostics.ungrounded_edits = data.at("ungrounded_edits").get<int>();
    diagnostics.dropped_elements = data.at("dropped_elements").get<int>();
    return diagnostics;
}

json optional_to_json(const std::optional<double>& value) {
    return value.has_value() ? json(*value) : json(nullptr);
}

std::optional<double> optional_from_json(const json& value) {
    if (value.is_null()) {
        return std::nullopt;
    }
    return value.get<double>();
}

void require_schema(const json& data, const char* expected) {
    if (!data.is_object() || data.value("schema", "") != expected) {
        throw FormatError(std::string("expected a \"") + expected + "\" document");
    }
}

} // namespace

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    return buffer;
}

json run_report_to_json(const RunReport& report) {
    json documents = json::array();
    for (const DocumentEval& document : report.documents) {
        documents.push_back(document_to_json(document));
    }
    json mean_categories = json::object();
    for (const auto& [category, mean] : report.mean_category_counts) {
        mean_categories[std::string(to_string(category))] = mean;
    }
    return json{
        {"schema", kReportSchema},
        {"config", context_to_json(report.context)},
        {"documents", std::move(documents)},
        {"aggregates",
         {{"document_count", report.corpus_size},
          {"evaluated_count", report.evaluated_count()},
          {"mean_revision_distance", optional_to_json(report.mean_revision_distance)},
          {"mean_category_counts", std::move(mean_categories)},
          {"mean_baselines", report.mean_baselines}}},
        {"diagnostics", diagnostics_to_json(report.diagnostics)},
    };
}

RunReport run_report_from_json(const json& data) {
    require_schema(data, kReportSchema);
    RunReport report;
    try {
        report.context = context_from_json(data.at("config"));
        for (const auto& document : data.at("documents")) {
            report.documents.push_back(document_from_json(document));
        }
        const json& aggregates = data.at("aggregates");
        report.corpus_size = aggregates.at("document_count").get<std::size_t>();
        report.mean_revision_distance =
            optional_from_json(aggregates.at("mean_revision_distance"));
        for (const auto& [name, mean] : aggregates.at("mean_category_counts").items()) {
            auto category = category_from_string(name);
            if (!category) {
                throw FormatError("unknown category \"" + name + "\" in aggregates");
            }
            report.mean_category_counts[*category] = mean.get<double>();
        }
        for (const auto& [metric, mean] : aggregates.at("mean_baselines").items()) {
            report.mean_baselines[metric] = mean.get<double>();
        }
        report.diagnostics = diagnostics_from_json(data.at("diagnostics"));
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed run report: ") + e.what());
    }
    return report;
}

json comparison_to_json(const ComparisonReport& report) {
    json metrics = json::object();
    for (const auto& [metric, entry] : report.metrics) {
        metrics[metric] = {
            {"weak_value", entry.weak_value},
            {"strong_value", entry.strong_value},
            {"relative_change_percent", optional_to_json(entry.relative_change_percent)},
            {"direction", std::string(to_string(entry.direction))},
        };
    }
    return json{
        {"schema", kComparisonSchema},
        {"convention", report.convention},
        {"metrics", std::move(metrics)},
    };
}

ComparisonReport comparison_from_json(const json& data) {
    require_schema(data, kComparisonSchema);
    ComparisonReport report;
    try {
        report.convention = data.at("convention").get<std::string>();
        for (const auto& [metric, entry] : data.at("metrics").items()) {
            MetricComparison comparison;
            comparison.weak_value = entry.at("weak_value").get<double>();
            comparison.strong_value = entry.at("strong_value").get<double>();
            comparison.relative_change_percent =
                optional_from_json(entry.at("relative_change_percent"));
            auto direction =
                change_direction_from_string(entry.at("direction").get<std::string>());
            if (!direction) {
                throw FormatError("unknown direction in comparison report");
            }
            comparison.direction = *direction;
            report.metrics[metric] = comparison;
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed comparison report: ") + e.what());
    }
    return report;
}

json agreement_to_json(const AgreementReport& report) {
    json pairs = json::array();
    for (const PairOutcome& pair : report.pairs) {
        pairs.push_back({
            {"pair_id", pair.pair_id},
            {"chosen_distance", pair.chosen_distance},
            {"rejected_distance", pair.rejected_distance},
            {"result", std::string(to_string(pair.result))},
        });
    }
    return json{
        {"schema", kAgreementSchema},
        {"config", context_to_json(report.context)},
        {"pairs", std::move(pairs)},
        {"aggregates",
         {{"pair_count", report.corpus_size},
          {"evaluated_pairs", report.total_pairs},
          {"agreements", report.agreements},
          {"ties", report.ties},
          {"agreement_rate", optional_to_json(report.agreement_rate)}}},
        {"diagnostics", diagnostics_to_json(report.diagnostics)},
    };
}

AgreementReport agreement_from_json(const json& data) {
    require_schema(data, kAgreementSchema);
    AgreementReport report;
    try {
        report.context = context_from_json(data.at("config"));
        for (const auto& pair : data.at("pairs")) {
            PairOutcome outcome;
            outcome.pair_id = pair.at("pair_id").get<std::string>();
            outcome.chosen_distance = pair.at("chosen_distance").get<std::size_t>();
            outcome.rejected_distance = pair.at("rejected_distance").get<std::size_t>();
            auto result = pair_result_from_string(pair.at("result").get<std::string>());
            if (!result) {
                throw FormatError("unknown pair result in agreement report");
            }
            outcome.result = *result;
            report.pairs.push_back(std::move(outcome));
        }
        const json& aggregates = data.at("aggregates");
        report.corpus_size = aggregates.at("pair_count").get<std::size_t>();
        report.total_pairs = aggregates.at("evaluated_pairs").get<std::size_t>();
        report.agreements = aggregates.at("agreements").get<std::size_t>();
        report.ties = aggregates.at("ties").get<std::size_t>();
        report.agreement_rate = optional_from_json(aggregates.at("agreement_rate"));
        report.diagnostics = diagnostics_from_json(data.at("diagnostics"));
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed agreement report: ") + e.what());
    }
    return report;
}

namespace {

void write_context_block(std::ostringstream& out, const ReportContext& context) {
    out << "- mode: " << to_string(context.mode) << "\n";
    out << "- model: " << context.model_name << "\n";
    out << "- temperature: " << format_fixed(context.temperature, 2) << "\n";
    out << "- prompt template version: " << context.template_version << "\n";
    out << "- tie policy: " << to_string(context.tie_policy) << "\n";
    out << "- relative change convention: " << kChangeConvention << "\n";
    out << "- metrics: ";
    bool first = true;
    for (const std::string& metric : context.metrics) {
        out << (first ? "" : ", ") << metric;
        first = false;
    }
    out << "\n";
}

void write_diagnostics_block(std::ostringstream& out, const RunDiagnostics& diagnostics,
                             const char* unit) {
    out << "## Diagnostics\n\n";
    out << "- failed " << unit << ": " << diagnostics.failed_documents.size() << "\n";
    for (const auto& failure : diagnostics.failed_documents) {
        out << "  - " << failure.document_id << ": " << failure.error << "\n";
    }
    out << "- parse retries: " << diagnostics.parse_retries << "\n";
    out << "- truncated edit lists: " << diagnostics.truncated_documents << "\n";
    out << "- ungrounded edits: " << diagnostics.ungrounded_edits << "\n";
    out << "- dropped elements: " << diagnostics.dropped_elements << "\n";
}

void write_snippet_block(std::ostringstream& out, const char* label, const std::string& text) {
    out << "**" << label << "**\n\n";
    if (text.empty()) {
        out << "*(empty)*\n\n";
        return;
    }
    out << "```\n" << text;
    if (text.back() != '\n') {
        out << "\n";
    }
    out << "```\n\n";
}

} // namespace

std::string run_report_to_markdown(const RunReport& report,
                                   const std::optional<std::string>& generated_at) {
    std::ostringstream out;
    out << "# Revision distance report\n\n";
    if (generated_at.has_value()) {
        out << "_generated at " << *generated_at << "_\n\n";
    }
    write_context_block(out, report.context);
    out << "\n";

    out << "## Documents\n\n";
    if (report.documents.empty()) {
        out << "*(no documents evaluated)*\n\n";
    }
    for (const DocumentEval& document : report.documents) {
        out << "### " << document.document_id << "\n\n";
        out << "- D_Revision: " << document.revision_distance << "\n";
        out << "- categories:";
        for (EditCategory category : kAllCategories) {
            auto it = document.category_counts.find(category);
            std::size_t count = it == document.category_counts.end() ? 0 : it->second;
            out << " " << to_string(category) << "=" << count;
        }
        out << "\n";
        for (const auto& [metric, value] : document.baseline_scores) {
            out << "- " << metric_display_name(metric) << ": " << format_fixed(value, 2)
                << "\n";
        }
        out << "\n";
        std::size_t edit_no = 0;
        for (const GroundedEdit& edit : document.edits) {
            ++edit_no;
            out << "#### Edit " << edit_no << ": " << edit.edit.action_name << " ("
                << to_string(edit.category) << (edit.grounded ? "" : ", ungrounded") << ")\n\n";
            if (!edit.edit.revision_description.empty()) {
                out << edit.edit.revision_description << "\n\n";
            }
            write_snippet_block(out, "before", edit.edit.original_snippet);
            write_snippet_block(out, "after", edit.edit.revised_snippet);
        }
    }

    out << "## Aggregates\n\n";
    out << "- documents: " << report.evaluated_count() << " evaluated of "
        << report.corpus_size << "\n";
    if (report.mean_revision_distance.has_value()) {
        out << "- mean D_Revision: " << format_fixed(*report.mean_revision_distance, 2) << "\n";
        out << "- mean category counts:";
        for (EditCategory category : kAllCategories) {
            auto it = report.mean_category_counts.find(category);
            double mean = it == report.mean_category_counts.end() ? 0.0 : it->second;
            out << " " << to_string(category) << "=" << format_fixed(mean, 2);
        }
        out << "\n";
    } else {
        out << "- mean D_Revision: (absent)\n";
    }
    for (const auto& [metric, mean] : report.mean_baselines) {
        out << "- mean " << metric_display_name(metric) << ": " << format_fixed(mean, 2)
            << "\n";
    }
    out << "\n";

    write_diagnostics_block(out, report.diagnostics, "documents");
    return out.str();
}

std::string comparison_to_markdown(const ComparisonReport& report) {
    std::ostringstream out;
    out << "# Metric comparison (weak vs strong)\n\n";
    out << "- relative change convention: " << report.convention << "\n\n";
    out << "| Metric | Weak | Strong | Direction | Change |\n";
    out << "| --- | --- | --- | --- | --- |\n";
    for (const auto& [metric, entry] : report.metrics) {
        out << "| " << metric_display_name(metric) << " | "
            << format_fixed(entry.weak_value, 2) << " | "
            << format_fixed(entry.strong_value, 2) << " | " << to_string(entry.direction)
            << " | ";
        if (entry.relative_change_percent.has_value()) {
            double change = *entry.relative_change_percent;
            out << (change >= 0.0 ? "+" : "") << format_fixed(change, 1) << "%";
        } else {
            out << "undefined";
        }
        out << " |\n";
    }
    return out.str();
}

std::string agreement_to_markdown(const AgreementReport& report) {
    std::ostringstream out;
    out << "# Preference agreement report\n\n";
    write_context_block(out, report.context);
    out << "\n## Result\n\n";
    if (report.agreement_rate.has_value()) {
        double percent = *report.agreement_rate * 100.0;
        out << "**" << report.agreements << "/" << report.total_pairs << " agree ("
            << format_fixed(percent, 1) << "%, rounded "
            << static_cast<long>(std::lround(percent)) << "%)**\n\n";
    } else {
        out << "**0/0 decidable (undefined)**\n\n";
    }
    out << "- evaluated pairs: " << report.total_pairs << " of " << report.corpus_size << "\n";
    out << "- agreements: " << report.agreements << "\n";
    out << "- ties: " << report.ties << "\n\n";
    out << "| Pair | D(chosen) | D(rejected) | Outcome |\n";
    out << "| --- | --- | --- | --- |\n";
    for (const PairOutcome& pair : report.pairs) {
        out << "| " << pair.pair_id << " | " << pair.chosen_distance << " | "
            << pair.rejected_distance << " | " << to_string(pair.result) << " |\n";
    }
    out << "\n";
    write_diagnostics_block(out, report.diagnostics, "pairs");
    return out.str();
}

} // namespace revdist
