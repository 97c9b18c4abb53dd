// dyncount: census runs, bound verification, single-component search and
// graph export from the command line.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or parameter error,
// 3 budget exhausted (a checkpoint path is printed).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dyncount/arith.hpp"
#include "dyncount/census.hpp"
#include "dyncount/report.hpp"
#include "dyncount/theory.hpp"

using namespace dyncount;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kCodeVersion = "dyncount-1.0.0";

struct FamilyArgs {
  std::uint32_t p = 0;
  std::uint32_t k = 1;
  std::string family = "linear";
  std::uint32_t d = 2;
  std::vector<std::uint64_t> exps;
  std::uint32_t n = 1;
  std::uint32_t m = 1;
  std::uint32_t alpha = 0;
  std::string model = "affine";
  std::string norm = "any";

  void attach(CLI::App* app, bool need_p = true) {
    auto* po = app->add_option("--p", p, "field characteristic");
    if (need_p) po->required();
    app->add_option("--k", k, "extension degree")->capture_default_str();
    app->add_option("--family", family,
                    "all-degree-d | sparse | linearised | linear | power | frobenius-affine | rational")
        ->capture_default_str();
    app->add_option("--d", d, "degree (all-degree-d, power)")->capture_default_str();
    app->add_option("--exps", exps, "sparse exponents, comma separated")->delimiter(',');
    app->add_option("--n", n, "linearised n or denominator degree")->capture_default_str();
    app->add_option("--m", m, "numerator degree")->capture_default_str();
    app->add_option("--alpha", alpha, "value at poles (affine model)")->capture_default_str();
    app->add_option("--model", model, "affine | projective")->capture_default_str();
    app->add_option("--norm", norm, "any | norm1 | norm!=1")->capture_default_str();
  }

  FamilySpec spec(FieldPtr field) const {
    FamilySpec s;
    s.kind = parse_family_kind(family);
    s.field = std::move(field);
    s.d = d;
    s.exponents = exps;
    s.m = m;
    s.n = n;
    s.norm = parse_norm_filter(norm);
    s.model = parse_model(model);
    s.alpha = alpha;
    Family check(s);  // validates
    return check.spec();
  }

  nlohmann::json echo() const {
    return {{"p", p},         {"k", k}, {"family", family}, {"d", d},         {"exps", exps},
            {"n", n},         {"m", m}, {"alpha", alpha},   {"model", model}, {"norm", norm}};
  }
};

struct CensusArgs {
  unsigned workers = 1;
  std::uint64_t budget = 1'000'000'000;
  std::string out;
  std::string csv;
  std::string cache;
  std::string reduce = "none";
  std::string checkpoint;
  std::string resume;
  std::uint64_t checkpoint_every = 1'000'000;
  bool verbose = false;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorCode::InvalidParameters, "cannot write " + path);
  f << text;
}

void append_csv(const std::string& path, const std::string& row) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw Error(ErrorCode::InvalidParameters, "cannot write " + path);
  if (fresh) f << csv_header() << "\n";
  f << row << "\n";
}

std::string cache_file(const std::string& dir, const FamilySpec& spec, const CensusArgs& a) {
  const nlohmann::json id{{"field", spec.field->descriptor()},
                          {"family", spec.to_json()},
                          {"reduce", a.reduce},
                          {"verbose", a.verbose},
                          {"version", kCodeVersion}};
  return (fs::path(dir) / (digest128(id.dump()).hex() + ".json")).string();
}

std::string summary_line(const nlohmann::json& report) {
  std::ostringstream os;
  os << "total=" << report.at("total") << " classes=" << report.at("classes")
     << " pass=" << report.at("verification").at("pass");
  return os.str();
}

int cmd_field(const FamilyArgs& fa) {
  const FieldPtr F = Field::make(fa.p, fa.k);
  nlohmann::json j = F->descriptor();
  j["q"] = F->q();
  j["primitive_element"] = F->primitive_element();
  if (F->q() <= 64) {
    std::vector<Elem> norm, trace;
    for (Elem x = 0; x < F->q(); ++x) {
      norm.push_back(F->norm(x));
      trace.push_back(F->trace(x));
    }
    j["norm"] = norm;
    j["trace"] = trace;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_census(const FamilyArgs& fa, const CensusArgs& ca) {
  const FamilySpec spec = fa.spec(Field::make(fa.p, fa.k));
  nlohmann::json config = fa.echo();
  config["command"] = "census";
  config["workers"] = ca.workers;
  config["budget"] = ca.budget;
  config["reduce"] = ca.reduce;
  config["verbose"] = ca.verbose;
  config["out"] = ca.out;
  config["csv"] = ca.csv;
  config["cache"] = ca.cache;

  nlohmann::json report;
  std::string cache_status = "off";
  std::optional<CensusReport> fresh;
  std::optional<theory::VerificationResult> check;
  std::string path;
  if (!ca.cache.empty()) {
    path = cache_file(ca.cache, spec, ca);
    cache_status = "miss";
    if (std::ifstream in(path); in) {
      try {
        report = nlohmann::json::parse(in);
        cache_status = "hit";
      } catch (const nlohmann::json::exception&) {
        report = nullptr;
      }
    }
  }
  double wall = 0;
  std::uint64_t evaluated = 0;
  if (cache_status != "hit") {
    CensusOptions opt;
    opt.workers = ca.workers;
    opt.reduce = parse_reduction(ca.reduce);
    opt.budget = ca.budget;
    opt.checkpoint_every = ca.checkpoint_every;
    opt.verbose = ca.verbose;
    if (!ca.checkpoint.empty()) opt.checkpoint_path = ca.checkpoint;
    if (!ca.resume.empty()) opt.resume_from = ca.resume;
    fresh = run_census(spec, opt);
    check = theory::verify(spec, fresh->distinct_classes);
    report = report_json(*fresh, *check, nullptr);
    report.erase("config");
    wall = fresh->wall_time_ms;
    evaluated = fresh->maps_evaluated;
    if (!path.empty()) {
      fs::create_directories(ca.cache);
      write_text(path, report.dump());
    }
  }
  report["config"] = config;
  stamp_run(report, wall, evaluated, cache_status);
  write_text(ca.out, report.dump(2) + "\n");
  if (!ca.csv.empty()) {
    const auto subject = report_subject(report);
    const auto v = fresh ? *check : theory::verify(subject.spec, subject.observed);
    append_csv(ca.csv, csv_row(subject.spec, report.at("total").get<std::uint64_t>(), subject.observed, v));
  }
  std::cerr << summary_line(report) << "\n";
  return report.at("verification").at("pass").get<bool>() ? 0 : 1;
}

void print_checks(const theory::VerificationResult& v, const std::string& label) {
  for (const auto& c : v.checks) {
    std::cout << label << "  " << c.prediction.source << "  " << to_string(c.prediction.kind)
              << (c.prediction.strict ? "(strict)" : "") << "  value=" << c.prediction.value_string()
              << "  observed=" << v.observed << "  "
              << (c.pass ? (*c.pass ? "PASS" : "FAIL") : "REPORT") << "\n";
  }
  for (const auto& n : v.notes) std::cout << label << "  note: " << n << "\n";
}

int cmd_verify_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidParameters, "cannot read " + path);
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed report: ") + e.what());
  }
  const auto subject = report_subject(report);
  const auto v = theory::verify(subject.spec, subject.observed);
  print_checks(v, subject.spec.params().empty() ? std::string(to_string(subject.spec.kind))
                                                : std::string(to_string(subject.spec.kind)) + "[" +
                                                      subject.spec.params() + "]");
  bool ok = v.overall;
  // The inventory must agree with the headline numbers.
  if (report.contains("inventory")) {
    std::uint64_t mult = 0;
    for (const auto& e : report.at("inventory")) mult += e.at("multiplicity").get<std::uint64_t>();
    const bool consistent = report.at("inventory").size() == subject.observed &&
                            mult == report.at("total").get<std::uint64_t>();
    std::cout << "report-consistency  " << (consistent ? "PASS" : "FAIL") << "\n";
    ok = ok && consistent;
  }
  return ok ? 0 : 1;
}

int cmd_verify_grid(const FamilyArgs& base, const std::vector<std::uint64_t>& qs,
                    const std::vector<std::uint32_t>& ds, unsigned workers) {
  bool ok = true;
  for (const auto q : qs) {
    const auto pk = arith::prime_power_split(q);
    if (!pk) throw Error(ErrorCode::InvalidParameters, std::to_string(q) + " is not a prime power");
    const FieldPtr F = Field::make(static_cast<std::uint32_t>(pk->first), pk->second);
    const bool uses_d = base.family == "all-degree-d" || base.family == "power";
    const std::vector<std::uint32_t> dlist = uses_d && !ds.empty() ? ds : std::vector<std::uint32_t>{base.d};
    for (const auto d : dlist) {
      FamilyArgs fa = base;
      fa.d = d;
      const FamilySpec spec = fa.spec(F);
      CensusOptions opt;
      opt.workers = workers;
      const auto r = run_census(spec, opt);
      const auto v = theory::verify(spec, r.distinct_classes);
      std::string label = "q=" + std::to_string(q) + " " + std::string(to_string(spec.kind));
      if (!spec.params().empty()) label += "[" + spec.params() + "]";
      print_checks(v, label);
      ok = ok && v.overall;
    }
  }
  return ok ? 0 : 1;
}

int cmd_search(std::uint64_t pmin, std::uint64_t pmax, const std::string& out) {
  const auto rows = search_single_component(pmin, pmax);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    std::cout << "p=" << r.p << "  count=" << r.a_values.size() << "  a=";
    for (std::size_t i = 0; i < r.a_values.size(); ++i) std::cout << (i ? "," : "") << r.a_values[i];
    std::cout << "\n";
    j.push_back({{"p", r.p}, {"count", r.a_values.size()}, {"a", r.a_values}});
  }
  if (!out.empty()) write_text(out, nlohmann::json{{"schema", kReportSchema}, {"rows", j}}.dump(2) + "\n");
  return 0;
}

int cmd_export(const FamilyArgs& fa, const std::vector<Elem>& coeffs, std::optional<std::uint64_t> index,
               const std::string& format, const std::string& out) {
  const FieldPtr F = Field::make(fa.p, fa.k);
  std::optional<DynMap> map;
  if (!coeffs.empty()) {
    map = PolyMap::dense(F, coeffs);
  } else {
    if (!index) throw Error(ErrorCode::InvalidParameters, "export needs --coeffs or --index");
    const Family fam(fa.spec(F));
    map = fam.member(*index);
  }
  const auto g = build_graph(*map);
  if (format == "dot") {
    write_text(out, export_dot(g));
  } else if (format == "json") {
    const nlohmann::json j{{"map", to_json(*map)},
                           {"succ", g.succ},
                           {"stats", analyze(g).to_json()},
                           {"digest", canonical_key(g).digest.hex()}};
    write_text(out, j.dump(2) + "\n");
  } else {
    throw Error(ErrorCode::InvalidParameters, "format must be dot or json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact census of dynamical systems over finite fields"};
  app.require_subcommand(1);

  FamilyArgs field_args;
  auto* field_cmd = app.add_subcommand("field", "describe F_{p^k}");
  field_cmd->add_option("--p", field_args.p, "characteristic")->required();
  field_cmd->add_option("--k", field_args.k, "extension degree")->capture_default_str();

  FamilyArgs census_fam;
  CensusArgs census_args;
  auto* census_cmd = app.add_subcommand("census", "classify a family up to dynamical equivalence");
  census_fam.attach(census_cmd);
  census_cmd->add_option("--workers", census_args.workers)->capture_default_str();
  census_cmd->add_option("--budget", census_args.budget, "max point evaluations")->capture_default_str();
  census_cmd->add_option("--out", census_args.out, "report path (default stdout)");
  census_cmd->add_option("--csv", census_args.csv, "append a summary row");
  census_cmd->add_option("--cache", census_args.cache, "cache directory");
  census_cmd->add_option("--reduce", census_args.reduce, "none | scaling | affine | frobenius | auto")
      ->capture_default_str();
  census_cmd->add_option("--checkpoint", census_args.checkpoint, "checkpoint file");
  census_cmd->add_option("--checkpoint-every", census_args.checkpoint_every)->capture_default_str();
  census_cmd->add_option("--resume", census_args.resume, "resume from checkpoint");
  census_cmd->add_flag("--verbose", census_args.verbose, "list members of every class");

  FamilyArgs verify_fam;
  std::string verify_report;
  std::vector<std::uint64_t> verify_qs;
  std::vector<std::uint32_t> verify_ds;
  unsigned verify_workers = 1;
  auto* verify_cmd = app.add_subcommand("verify", "check counts against the closed forms and bounds");
  verify_fam.attach(verify_cmd, false);
  verify_cmd->add_option("--report", verify_report, "census report JSON");
  verify_cmd->add_option("--q", verify_qs, "field sizes, comma separated")->delimiter(',');
  verify_cmd->add_option("--ds", verify_ds, "degrees for all-degree-d / power, comma separated")->delimiter(',');
  verify_cmd->add_option("--workers", verify_workers)->capture_default_str();

  std::uint64_t pmin = 2, pmax = 50;
  std::string search_out;
  auto* search_cmd = app.add_subcommand("search-connected", "primes p with X^2+a connected on F_p");
  search_cmd->add_option("--pmin", pmin)->capture_default_str();
  search_cmd->add_option("--pmax", pmax)->capture_default_str();
  search_cmd->add_option("--out", search_out, "JSON table path");

  FamilyArgs export_fam;
  std::vector<Elem> export_coeffs;
  std::uint64_t export_index = 0;
  std::string export_format = "dot", export_out;
  auto* export_cmd = app.add_subcommand("export", "functional graph of one map as DOT or JSON");
  export_fam.attach(export_cmd);
  export_cmd->add_option("--coeffs", export_coeffs, "dense polynomial, low degree first")->delimiter(',');
  auto* index_opt = export_cmd->add_option("--index", export_index, "family member index");
  export_cmd->add_option("--format", export_format, "dot | json")->capture_default_str();
  export_cmd->add_option("--out", export_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*field_cmd) return cmd_field(field_args);
    if (*census_cmd) return cmd_census(census_fam, census_args);
    if (*verify_cmd) {
      if (!verify_report.empty()) return cmd_verify_report(verify_report);
      if (verify_qs.empty()) throw Error(ErrorCode::InvalidParameters, "verify needs --report or --q");
      return cmd_verify_grid(verify_fam, verify_qs, verify_ds, verify_workers);
    }
    if (*search_cmd) return cmd_search(pmin, pmax, search_out);
    if (*export_cmd) {
      std::optional<std::uint64_t> idx;
      if (index_opt->count() > 0) idx = export_index;
      return cmd_export(export_fam, export_coeffs, idx, export_format, export_out);
    }
  } catch (const BudgetExceededError& e) {
    std::cerr << "error: " << e.what() << "\ncheckpoint: " << e.checkpoint_path() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
