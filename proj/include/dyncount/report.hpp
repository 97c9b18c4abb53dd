#pragma once

// JSON and CSV renderings of a census with its theory checks.

#include <cstdint>
#include <string>

#include "dyncount/census.hpp"
#include "dyncount/theory.hpp"

namespace dyncount {

inline constexpr int kReportSchema = 1;

/// Everything except the "run" object is a pure function of the inputs, so
/// repeated runs give byte-identical reports once "run" is removed.
nlohmann::json report_json(const CensusReport& report, const theory::VerificationResult& check,
                           const nlohmann::json& config);

/// Adds {"run": {timestamp, wall_time_ms, maps_evaluated, cache}}.
void stamp_run(nlohmann::json& report, double wall_time_ms, std::uint64_t maps_evaluated,
               const std::string& cache_status);

/// The report without its "run" object, serialized.
std::string comparable_dump(const nlohmann::json& report);

std::string csv_header();
std::string csv_row(const FamilySpec& spec, std::uint64_t total, std::uint64_t classes,
                    const theory::VerificationResult& check);

struct ReportSubject {
  FamilySpec spec;
  std::uint64_t observed = 0;
};

/// Reads the family and observed class count back out of a report.
/// Throws InvalidSpec on malformed input.
ReportSubject report_subject(const nlohmann::json& report);

}  // namespace dyncount
