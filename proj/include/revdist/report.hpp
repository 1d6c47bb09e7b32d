#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "revdist/harness.hpp"

namespace revdist {

/// JSON report emission and parsing. Field names are stable under the
/// "revdist-report/1" schema; emit/parse round-trips exactly.
nlohmann::json run_report_to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& data); // throws FormatError

nlohmann::json comparison_to_json(const ComparisonReport& report);
ComparisonReport comparison_from_json(const nlohmann::json& data);

nlohmann::json agreement_to_json(const AgreementReport& report);
AgreementReport agreement_from_json(const nlohmann::json& data);

/// Human-readable reports. Means print to 2 decimals, change rates to 1;
/// the numbers are the same ones the JSON carries. `generated_at` is
/// injectable so golden outputs stay byte-stable; when absent no timestamp
/// line is written.
std::string run_report_to_markdown(const RunReport& report,
                                   const std::optional<std::string>& generated_at = std::nullopt);
std::string comparison_to_markdown(const ComparisonReport& report);
std::string agreement_to_markdown(const AgreementReport& report);

/// "12.8" / "3.93" style fixed-point formatting used across reports.
std::string format_fixed(double value, int decimals);

} // namespace revdist
