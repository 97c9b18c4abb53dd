#include "dyncount/report.hpp"

#include <chrono>
#include <ctime>

#include "dyncount/error.hpp"

namespace dyncount {

nlohmann::json report_json(const CensusReport& report, const theory::VerificationResult& check,
                           const nlohmann::json& config) {
  nlohmann::json inventory = nlohmann::json::array();
  for (const auto& c : report.classes) {
    nlohmann::json e{{"digest", c.key.digest.hex()},
                     {"representative", c.representative},
                     {"map", c.representative_map},
                     {"multiplicity", c.multiplicity},
                     {"fixed_points", c.stats.fixed_point_count},
                     {"stats", c.stats.to_json()}};
    if (!c.members.empty()) e["members"] = c.members;
    inventory.push_back(std::move(e));
  }
  return {{"schema", kReportSchema},
          {"family", report.spec.to_json()},
          {"field", report.spec.field->descriptor()},
          {"total", report.total_maps},
          {"classes", report.distinct_classes},
          {"inventory", std::move(inventory)},
          {"reductions", {{"used", report.reductions_used}, {"skipped", report.reductions_skipped}}},
          {"theory", check.theory_json()},
          {"verification", {{"pass", check.overall}, {"notes", check.notes}}},
          {"config", config}};
}

void stamp_run(nlohmann::json& report, double wall_time_ms, std::uint64_t maps_evaluated,
               const std::string& cache_status) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  report["run"] = {{"timestamp", buf},
                   {"wall_time_ms", wall_time_ms},
                   {"maps_evaluated", maps_evaluated},
                   {"cache", cache_status}};
}

std::string comparable_dump(const nlohmann::json& report) {
  nlohmann::json copy = report;
  copy.erase("run");
  return copy.dump();
}

std::string csv_header() { return "p,k,q,family,params,total,classes,best_bound,exact,pass"; }

std::string csv_row(const FamilySpec& spec, std::uint64_t total, std::uint64_t classes,
                    const theory::VerificationResult& check) {
  const Field& F = *spec.field;
  return std::to_string(F.p()) + "," + std::to_string(F.k()) + "," + std::to_string(F.q()) + "," +
         std::string(to_string(spec.kind)) + "," + spec.params() + "," + std::to_string(total) + "," +
         std::to_string(classes) + "," + check.best_bound().value_or("") + "," +
         check.exact().value_or("") + "," + (check.overall ? "true" : "false");
}

ReportSubject report_subject(const nlohmann::json& report) {
  try {
    if (report.at("schema").get<int>() != kReportSchema) {
      throw Error(ErrorCode::InvalidSpec, "unsupported report schema");
    }
    const auto& fd = report.at("field");
    const FieldPtr field = Field::with_modulus(fd.at("p").get<std::uint32_t>(),
                                               fd.at("modulus").get<std::vector<std::uint32_t>>());
    return {FamilySpec::from_json(report.at("family"), field), report.at("classes").get<std::uint64_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed report: ") + e.what());
  }
}

}  // namespace dyncount
