// Command-line front end: verification suites, hierarchy evolution and
// operator reports. Exit codes: 0 all checks pass, 1 a check failed,
// 2 configuration error, 3 numerical failure (blow-up, non-invertible data).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "laxtower/checks.hpp"
#include "laxtower/errors.hpp"
#include "laxtower/hierarchy.hpp"
#include "laxtower/operators.hpp"

namespace fs = std::filesystem;
using namespace laxtower;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Output {
  std::string out;            ///< explicit file, "-" for stdout
  std::string format = "csv";  ///< csv | text

  /// Explicit --out, else $LAXTOWER_OUTPUT_DIR/<stem>.<ext>, else stdout.
  std::optional<fs::path> resolve(const std::string& stem) const {
    if (out == "-") return std::nullopt;
    if (!out.empty()) return fs::path(out);
    if (const char* dir = std::getenv("LAXTOWER_OUTPUT_DIR"); dir && *dir) {
      fs::create_directories(dir);
      return fs::path(dir) / (stem + (format == "csv" ? ".csv" : ".json"));
    }
    return std::nullopt;
  }
};

/// Writes to the resolved file or to stdout.
class Sink {
 public:
  explicit Sink(const std::optional<fs::path>& path) {
    if (path) {
      if (path->has_parent_path()) fs::create_directories(path->parent_path());
      file_.open(*path);
      if (!file_) throw ConfigError("cannot open " + path->string());
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_rows(const std::vector<CheckRow>& rows, const Output& o, const std::string& stem,
                const json& manifest) {
  Sink sink(o.resolve(stem));
  std::ostream& os = sink.os();
  if (o.format == "csv") {
    os << "check_id,anchor,params,defect,tol,pass\n";
    for (const CheckRow& r : rows) {
      fmt::print(os, "{},{},{},{:.6e},{:.1e},{}\n", r.check_id, csv_field(r.anchor), csv_field(r.params),
                 r.defect, r.tol, r.pass ? 1 : 0);
    }
  } else {
    json doc = manifest;
    doc["checks"] = json::array();
    for (const CheckRow& r : rows) {
      doc["checks"].push_back({{"check_id", r.check_id},
                               {"anchor", r.anchor},
                               {"params", r.params},
                               {"defect", r.defect},
                               {"tol", r.tol},
                               {"bound", r.lower_bound ? "lower" : "upper"},
                               {"pass", r.pass}});
    }
    doc["all_pass"] = all_pass(rows);
    os << doc.dump(2) << '\n';
  }
}

int finish(const std::vector<CheckRow>& rows) {
  int failed = 0;
  for (const CheckRow& r : rows) failed += !r.pass;
  if (failed) fmt::print(stderr, "{} of {} checks failed\n", failed, rows.size());
  return failed ? kExitFail : 0;
}

void add_output_options(CLI::App* cmd, Output& o) {
  cmd->add_option("--out", o.out, "Output file ('-' for stdout); default from LAXTOWER_OUTPUT_DIR");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "text"}));
}

// ---- evolve ----

struct EvolveArgs {
  std::string hierarchy = "benny";
  int flow = 2;
  double T = 0.5;
  double dt = 1e-3;
  int modes = 32;
  std::string init;
  int truncation = -8;
  int sample_every = 0;
  double tol = 1e-8;
};

int run_evolve(const EvolveArgs& a, const Output& o) {
  const HierarchySpec h = HierarchySpec::get(parse_hierarchy(a.hierarchy), a.truncation);
  std::string init = a.init;
  if (init.empty()) init = h.name == HierarchyName::dtoda ? "u0=0.1*cos;u1=1" : "u0=0.1*sin;um1=1";
  EvolveOptions opt;
  opt.flow = a.flow;
  opt.T = a.T;
  opt.dt = a.dt;
  opt.modes = a.modes;
  opt.sample_every = a.sample_every;
  if (a.flow < 1 || a.T <= 0 || a.dt <= 0 || a.modes < 1 || a.sample_every < 0) {
    throw ConfigError("flow, T, dt and modes must be positive");
  }
  const Trajectory tr = evolve(h, parse_initial_data(h, init), opt);

  const auto fields = h.field_names();
  const auto cas = casimir_names(h);
  const std::string stem = fmt::format("evolve_{}_m{}", a.hierarchy, a.flow);
  const auto main_path = o.resolve(stem);

  json manifest = {{"command", "evolve"},     {"hierarchy", a.hierarchy}, {"flow", a.flow},
                   {"T", a.T},                {"dt", a.dt},               {"modes", a.modes},
                   {"init", init},            {"truncation", h.truncation},
                   {"sample_every", a.sample_every}, {"fields", fields}, {"casimirs", cas},
                   {"steps", tr.steps},       {"max_trace_drift", tr.max_trace_drift},
                   {"max_casimir_drift", tr.max_casimir_drift}, {"max_dropped", tr.max_dropped},
                   {"tol", a.tol}};
  if (h.name == HierarchyName::dtoda) manifest["min_u1"] = tr.min_u1;

  {
    Sink sink(main_path);
    std::ostream& os = sink.os();
    if (o.format == "csv") {
      os << "time";
      for (std::size_t k = 1; k <= tr.samples.front().traces.size(); ++k) os << ",tr" << k;
      for (const auto& c : cas) os << ',' << csv_field(c);
      os << '\n';
      for (const FieldSnapshot& s : tr.samples) {
        fmt::print(os, "{:.10g}", s.time);
        for (double v : s.traces) fmt::print(os, ",{:.17g}", v);
        for (double v : s.casimirs) fmt::print(os, ",{:.17g}", v);
        os << '\n';
      }
    } else {
      json doc = manifest;
      doc["samples"] = json::array();
      for (const FieldSnapshot& s : tr.samples) {
        doc["samples"].push_back({{"time", s.time}, {"traces", s.traces}, {"casimirs", s.casimirs}});
      }
      os << doc.dump(2) << '\n';
    }
  }
  if (main_path) {
    // grid samples and the run manifest next to the main report
    fs::path grid = *main_path, man = *main_path;
    grid.replace_extension(".fields.csv");
    man.replace_extension(".manifest.json");
    std::ofstream g(grid);
    g << "time,x";
    for (const auto& f : fields) g << ',' << f;
    g << '\n';
    const int n = 4 * a.modes + 1;
    for (const FieldSnapshot& s : tr.samples) {
      std::vector<std::vector<double>> v;
      for (const auto& f : s.fields) v.push_back(f.sample(n));
      for (int j = 0; j < n; ++j) {
        fmt::print(g, "{:.10g},{:.10g}", s.time, static_cast<double>(j) / n);
        for (const auto& col : v) fmt::print(g, ",{:.17g}", col[j]);
        g << '\n';
      }
    }
    std::ofstream(man) << manifest.dump(2) << '\n';
  }
  const bool ok = tr.max_trace_drift < a.tol && tr.max_casimir_drift < a.tol;
  if (!ok) {
    fmt::print(stderr, "conservation drift above {:.1e}: traces {:.3e}, casimirs {:.3e}\n", a.tol,
               tr.max_trace_drift, tr.max_casimir_drift);
  }
  return ok ? 0 : kExitFail;
}

// ---- operators ----

void print_operator(std::ostream& os, const HydroOperator& B) {
  fmt::print(os, "{}  fields ({})\n", B.name, fmt::join(B.fields, ", "));
  for (const char* part : {"g", "b"}) {
    const PolyMatrix& m = part[0] == 'g' ? B.g : B.b;
    for (int i = 0; i < B.dim(); ++i) {
      fmt::print(os, "  {}[{}] =", part, i);
      for (int j = 0; j < B.dim(); ++j) fmt::print(os, "  [{}]", m[i][j].str(B.fields));
      os << '\n';
    }
  }
  for (const NonlocalTerm& t : B.tail) {
    std::vector<std::string> l, r;
    for (const Poly& p : t.left) l.push_back(p.str(B.fields));
    for (const Poly& p : t.right) r.push_back(p.str(B.fields));
    fmt::print(os, "  tail: ({}) D^-1 ( ({}) . xi )\n", fmt::join(l, ", "), fmt::join(r, ", "));
  }
}

int run_operators(const std::string& family_name, const std::string& check, std::uint64_t seed, int probes,
                  int modes, const Output& o) {
  const HierarchyName family = parse_hierarchy(family_name);
  if (family != HierarchyName::benny && family != HierarchyName::dtoda) {
    throw ConfigError("explicit operators exist for benny and dtoda only");
  }
  const json manifest = {{"command", "operators"}, {"family", family_name}, {"check", check},
                         {"seed", seed},           {"probes", probes},     {"modes", modes}};
  std::vector<CheckRow> rows;
  if (check == "print") {
    Sink sink(o.resolve("operators_" + family_name));
    const int top = family == HierarchyName::benny ? 1 : 2;
    for (int n = -1; n <= top; ++n) print_operator(sink.os(), builtin_operator(family, n));
    for (int n : family == HierarchyName::benny ? std::vector<int>{0, 1} : std::vector<int>{2}) {
      const HydroOperator c = extended_operator_table(family, n);
      print_operator(sink.os(), c);
      for (const TableDifference& e :
           transcription_errata(extended_operator_table(family, n, Transcription::printed), c)) {
        fmt::print(sink.os(), "  typeset {}[{}][{}]: '{}' -> '{}'\n", e.part, e.row, e.col, e.printed,
                   e.corrected);
      }
    }
    return 0;
  }
  if (check == "recursion") {
    rows = recursion_checks(family, seed, probes);
  } else {
    SuiteOptions opt;
    opt.seed = seed;
    opt.probes = probes;
    opt.modes = modes;
    const std::string fam(to_string(family));
    for (CheckRow& r : run_suite(check == "structure" ? "operators" : "diagnostics", opt)) {
      if (r.params.find(fam) != std::string::npos) rows.push_back(std::move(r));
    }
  }
  write_rows(rows, o, "operators_" + family_name + "_" + check, manifest);
  return finish(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compatible Poisson brackets on Laurent series: checks, flows and operators"};
  app.require_subcommand(1);

  Output out;
  std::uint64_t seed = 1;
  int probes = 20;
  int modes = 16;

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite = "all";
  SuiteOptions sopt;
  std::vector<std::string> rmatrices;
  verify->add_option("--suite", suite, "Suite name or 'all'")->capture_default_str();
  verify->add_option("--rmatrix", rmatrices, "Restrict to these r-matrices");
  verify->add_option("--deg-min", sopt.deg_min)->capture_default_str();
  verify->add_option("--deg-max", sopt.deg_max)->capture_default_str();

  auto* evolve_cmd = app.add_subcommand("evolve", "Integrate a Lax flow and track conserved quantities");
  EvolveArgs ea;
  evolve_cmd->add_option("--hierarchy", ea.hierarchy)->capture_default_str();
  evolve_cmd->add_option("--flow", ea.flow)->capture_default_str();
  evolve_cmd->add_option("--T", ea.T)->capture_default_str();
  evolve_cmd->add_option("--dt", ea.dt)->capture_default_str();
  evolve_cmd->add_option("--modes", ea.modes)->capture_default_str();
  evolve_cmd->add_option("--init", ea.init, "e.g. \"u0=0.1*sin;um1=1\"");
  evolve_cmd->add_option("--truncation", ea.truncation, "Lowest degree kept for infinite tails")
      ->capture_default_str();
  evolve_cmd->add_option("--sample-every", ea.sample_every, "Record every k-th step (0: ends only)")
      ->capture_default_str();
  evolve_cmd->add_option("--tol", ea.tol, "Drift tolerance for the exit code")->capture_default_str();
  add_output_options(evolve_cmd, out);

  auto* reduce = app.add_subcommand("reduce", "Generated operators and Dirac reduction");
  std::string family = "benny";
  int n = 0;
  reduce->add_option("--family", family)->capture_default_str();
  reduce->add_option("--n", n)->capture_default_str();

  auto* ops = app.add_subcommand("operators", "Closed-form operators: recursion, structure, diagnostics");
  std::string check = "recursion";
  ops->add_option("--family", family)->capture_default_str();
  ops->add_option("--check", check)
      ->check(CLI::IsMember({"recursion", "structure", "diagnostics", "print"}))
      ->capture_default_str();

  for (auto* cmd : {verify, reduce, ops}) {
    cmd->add_option("--seed", seed)->capture_default_str();
    cmd->add_option("--probes", probes)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--modes", modes)->check(CLI::PositiveNumber)->capture_default_str();
    add_output_options(cmd, out);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*verify) {
      sopt.seed = seed;
      sopt.probes = probes;
      sopt.modes = modes;
      if (!rmatrices.empty()) {
        sopt.specs.clear();
        for (const auto& r : rmatrices) sopt.specs.push_back(parse_rmatrix(r));
      }
      std::vector<CheckRow> rows;
      const std::vector<std::string> names = suite == "all" ? suite_names() : std::vector{suite};
      for (const auto& s : names) {
        auto r = run_suite(s, sopt);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      const json manifest = {{"command", "verify"}, {"suite", suite},   {"seed", seed},
                             {"probes", probes},    {"modes", modes},   {"deg_min", sopt.deg_min},
                             {"deg_max", sopt.deg_max}};
      write_rows(rows, out, "verify_" + suite, manifest);
      return finish(rows);
    }
    if (*evolve_cmd) return run_evolve(ea, out);
    if (*reduce) {
      const auto rows = reduction_checks(parse_hierarchy(family), n, modes, seed, probes, true);
      const json manifest = {{"command", "reduce"}, {"family", family}, {"n", n},
                             {"seed", seed},        {"probes", probes}, {"modes", modes}};
      write_rows(rows, out, fmt::format("reduce_{}_n{}", family, n), manifest);
      return finish(rows);
    }
    if (*ops) return run_operators(family, check, seed, probes, modes, out);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const UnknownOperator& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kExitNumeric;
  }
  return 0;
}
