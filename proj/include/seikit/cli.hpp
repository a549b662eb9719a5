#pragma once

// Command-line front end: check / theorem / solve / corpus. `run` is the whole
// program minus process plumbing so tests can drive it in-process.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seikit/report.hpp"

namespace sei::cli {

inline constexpr std::string_view kVersion = "0.1.0";

inline std::string fmt(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

inline std::string fmt(std::span<const double> x) { return sei::detail::format_point(x); }

inline std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// A constant arithmetic expression such as "-1/3" or "sqrt(2)".
inline double parse_scalar(std::string_view text) {
  const Expression e = parse(text, 0);
  return e.value(std::span<const double>{});
}

inline Point parse_coords(std::string_view text) {
  Point out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_scalar(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// "S|T|ALPHA|LAMBDA" with comma-separated coordinates, e.g. "-1/2,-1/4|-1/3,-1/9|0|0.5".
inline ExplicitTuple parse_tuple(std::string_view text) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t bar = text.find('|', start);
    fields.push_back(text.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (fields.size() != 4) throw Error("tuple '" + std::string(text) + "' must have the form S|T|ALPHA|LAMBDA");
  return {parse_coords(fields[0]), parse_coords(fields[1]), parse_scalar(fields[2]), parse_scalar(fields[3])};
}

inline std::vector<double> parse_list(std::string_view text) { return parse_coords(text); }

// ---------------------------------------------------------------------------
// Shared dispatch (used by both the subcommands and the corpus runner)

struct TheoremArgs {
  SamplePlan plan;
  CheckOptions options;
  std::vector<Scenario> with;  // extra scenarios for linear / sup
  std::vector<double> weights;
  std::string g;
  std::string premise = "SSEP";
  std::vector<double> levels;
  std::size_t offsets = 3;
};

inline std::string normalize_tag(std::string_view text) {
  std::string norm;
  for (char c : text) norm += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return norm;
}

inline CheckReport run_check(const Scenario& sc, std::string_view property, const SamplePlan& plan,
                             const CheckOptions& opt, std::optional<double> level, std::size_t offsets) {
  const std::string tag = normalize_tag(property);
  if (tag == "LEVEL_SET_SEI" || tag == "LEVEL_SET") {
    if (!level) throw Error("property LEVEL_SET_SEI needs --level R");
    return check_level_set_sei(sc, *level, plan, opt);
  }
  if (tag == "EPIGRAPH_GINVEX" || tag == "EPIGRAPH") return check_epigraph_ginvex(sc, plan, offsets, opt);
  const auto kind = parse_property(property);
  if (!kind) throw Error("unknown property '" + std::string(property) + "'");
  return check_property(sc, *kind, plan, opt);
}

inline PropertyKind premise_kind(std::string_view text) {
  const auto k = parse_property(text);
  if (!k || (*k != PropertyKind::Ssep && *k != PropertyKind::Sqsep))
    throw Error("premise must be SSEP or SQSEP, got '" + std::string(text) + "'");
  return *k;
}

inline TheoremVerdict run_theorem(const Scenario& sc, std::string_view id, const TheoremArgs& a) {
  std::vector<Scenario> parts{sc};
  parts.insert(parts.end(), a.with.begin(), a.with.end());
  if (id == "alpha-contraction") return validate_alpha_contraction(sc, a.plan, a.options, premise_kind(a.premise));
  if (id == "linear") {
    std::vector<double> w = a.weights;
    if (w.empty()) w.assign(parts.size(), 1.0);
    return validate_linear(parts, w, a.plan, a.options);
  }
  if (id == "sup") return validate_sup(parts, a.plan, a.options);
  if (id == "compose") {
    if (a.g.empty()) throw Error("theorem compose needs --g EXPR (a function of x1)");
    return validate_compose(sc, parse(a.g, 1), a.plan, a.options);
  }
  if (id == "bridge") return validate_sep_ssep_bridge(sc, a.plan, a.options);
  if (id == "spsep") return validate_ssep_implies_spsep(sc, a.plan, a.options);
  if (id == "sqsep") return validate_ssep_implies_sqsep(sc, a.plan, a.options);
  if (id == "quasi-bridge") return validate_quasi_bridge(sc, a.plan, a.options);
  if (id == "level-set") return validate_level_sets(sc, a.plan, a.levels, a.options);
  if (id == "epigraph") return validate_epigraph(sc, a.plan, a.offsets, a.options);
  if (id == "feasible-sei") return validate_feasible_set_sei(sc, a.plan, a.options, premise_kind(a.premise));
  throw Error("unknown theorem id '" + std::string(id) + "'");
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Holds: return 0;
    case Verdict::Violated: return 1;
    case Verdict::Inapplicable: return 2;
  }
  return 3;
}

inline int exit_code(OptStatus s) {
  switch (s) {
    case OptStatus::OptimalCandidate: return 0;
    case OptStatus::Infeasible: return 1;
    case OptStatus::BudgetExhausted: return 2;
  }
  return 3;
}

// ---------------------------------------------------------------------------
// Human-readable summaries

inline void print_check(std::ostream& out, const CheckReport& r, const std::string& indent = "",
                        const std::string& lead = "") {
  out << indent << lead << r.property << ": " << to_string(r.verdict) << "\n";
  if (r.witness) {
    const auto& w = *r.witness;
    out << indent << "  witness #" << w.tuple.index << " [" << to_string(w.tuple.origin) << "] s=" << fmt(w.tuple.s)
        << " t=" << fmt(w.tuple.t) << " alpha=" << fmt(w.tuple.alpha) << " lambda=" << fmt(w.tuple.lambda) << "\n";
    out << indent << "  lhs=" << fmt(w.lhs) << " rhs=" << fmt(w.rhs) << " margin=" << fmt(w.margin)
        << (w.strict ? " (strict, needs margin < " : " (allowed ") << fmt(w.allowed) << ")";
    if (w.offsets) out << " offsets=(" << fmt((*w.offsets)[0]) << ", " << fmt((*w.offsets)[1]) << ")";
    out << "\n";
  }
  out << indent << "  tuples: " << r.samples_tested << " tested, " << r.vacuous << " vacuous, " << r.skipped.total()
      << " skipped, " << r.violations << " violations\n";
  for (const auto& n : r.notes) out << indent << "  note: " << n << "\n";
}

inline void print_theorem(std::ostream& out, const TheoremVerdict& v, const std::string& indent = "") {
  out << indent << "theorem " << v.id << ": " << (v.consistent ? "consistent" : "INCONSISTENT") << "\n";
  for (const auto& h : v.hypotheses) print_check(out, h, indent + "  ", "premise ");
  if (v.conclusion) print_check(out, *v.conclusion, indent + "  ", "conclusion ");
  for (const auto& n : v.notes) out << indent << "  note: " << n << "\n";
  for (const auto& p : v.parts) print_theorem(out, p, indent + "  ");
}

inline void print_solve(std::ostream& out, const OptResult& r, const std::string& label) {
  out << label << ": " << to_string(r.status) << "\n";
  if (r.status != OptStatus::Infeasible)
    out << "  value=" << fmt(r.value) << " point=" << fmt(r.point) << " residual=" << fmt(r.constraint_residual)
        << " (start " << r.best_start << ")\n";
  out << "  starts: " << r.starts.size() << ", converged feasible: " << r.starts_converged << "\n";
}

// ---------------------------------------------------------------------------
// Corpus

struct CorpusRow {
  std::string file;
  std::string check;
  std::string expected;
  std::string actual;
  bool pass = false;
  std::string detail;
  json report;
};

inline SamplePlan plan_from_json(const json& j) {
  SamplePlan p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error("plan must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "grid") p.grid_per_dim = v.get<std::size_t>();
    else if (key == "alpha_grid") p.alpha_grid = v.get<std::size_t>();
    else if (key == "lambda_grid") p.lambda_grid = v.get<std::size_t>();
    else if (key == "random") p.random_tuples = v.get<std::size_t>();
    else if (key == "seed") p.seed = v.get<std::uint64_t>();
    else if (key == "rejection_cap") p.rejection_cap = v.get<std::size_t>();
    else if (key == "tuples") {
      for (const auto& t : v) {
        if (t.is_string()) {
          p.explicit_tuples.push_back(parse_tuple(t.get<std::string>()));
          continue;
        }
        auto coords = [](const json& a) {
          Point x;
          for (const auto& c : a) x.push_back(c.is_string() ? parse_scalar(c.get<std::string>()) : c.get<double>());
          return x;
        };
        auto scalar = [](const json& c) { return c.is_string() ? parse_scalar(c.get<std::string>()) : c.get<double>(); };
        p.explicit_tuples.push_back({coords(t.at("s")), coords(t.at("t")), scalar(t.at("alpha")), scalar(t.at("lambda"))});
      }
    } else {
      throw Error("unknown plan field '" + key + "'");
    }
  }
  return p;
}

inline double json_scalar(const json& c) { return c.is_string() ? parse_scalar(c.get<std::string>()) : c.get<double>(); }

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool close(std::span<const double> a, const json& b, double tol) {
  if (!b.is_array() || b.size() != a.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!close(a[i], json_scalar(b[i]), tol)) return false;
  return true;
}

/// Compares a check report with an expectation block; returns mismatch text (empty when matching).
inline std::string compare_check(const CheckReport& r, const json& expect) {
  std::string out;
  if (auto it = expect.find("verdict"); it != expect.end()) {
    if (!parse_verdict(it->get<std::string>())) return "unknown expected verdict '" + it->get<std::string>() + "'";
    if (*parse_verdict(it->get<std::string>()) != r.verdict) return "verdict differs";
  }
  const double value_tol = expect.value("value_tol", 1e-9);
  if (auto it = expect.find("witness"); it != expect.end()) {
    if (!r.witness) return "expected a witness, none reported";
    const auto& w = *r.witness;
    const auto& e = *it;
    if ((e.contains("s") && !close(w.tuple.s, e["s"], 1e-12)) || (e.contains("t") && !close(w.tuple.t, e["t"], 1e-12)) ||
        (e.contains("alpha") && !close(w.tuple.alpha, json_scalar(e["alpha"]), 1e-12)) ||
        (e.contains("lambda") && !close(w.tuple.lambda, json_scalar(e["lambda"]), 1e-12)))
      out += "witness tuple differs (got s=" + fmt(w.tuple.s) + " t=" + fmt(w.tuple.t) + " alpha=" + fmt(w.tuple.alpha) +
             " lambda=" + fmt(w.tuple.lambda) + "); ";
  }
  if (auto it = expect.find("lhs"); it != expect.end()) {
    if (!r.witness || !close(r.witness->lhs, json_scalar(*it), value_tol))
      out += "lhs differs (got " + (r.witness ? fmt(r.witness->lhs) : std::string("none")) + "); ";
  }
  if (auto it = expect.find("rhs"); it != expect.end()) {
    if (!r.witness || !close(r.witness->rhs, json_scalar(*it), value_tol))
      out += "rhs differs (got " + (r.witness ? fmt(r.witness->rhs) : std::string("none")) + "); ";
  }
  return out;
}

inline std::vector<CorpusRow> run_corpus_file(const std::filesystem::path& dir, const std::filesystem::path& file) {
  std::vector<CorpusRow> rows;
  const std::string name = file.filename().string();
  auto error_row = [&](const std::string& check, const std::string& what) {
    CorpusRow row;
    row.file = name;
    row.check = check;
    row.expected = "-";
    row.actual = "error";
    row.detail = what;
    return row;
  };
  std::filesystem::path sidecar = file;
  sidecar.replace_extension(".expect.json");
  Scenario sc;
  json expect_doc;
  try {
    sc = load_scenario_file(file.string());
    sc.name = name;
    if (!std::filesystem::exists(sidecar)) return {error_row("-", "missing sidecar " + sidecar.filename().string())};
    std::ifstream in(sidecar);
    expect_doc = json::parse(in);
  } catch (const std::exception& e) {
    return {error_row("-", e.what())};
  }
  const json checks = expect_doc.value("checks", json::array());
  for (const auto& entry : checks) {
    const bool is_theorem = entry.contains("theorem");
    std::string label;
    try {
      label = is_theorem ? "theorem " + entry.at("theorem").get<std::string>() : entry.at("property").get<std::string>();
      if (entry.contains("level")) label += " r=" + fmt(json_scalar(entry["level"]));
      if (entry.contains("g")) label += " g=" + entry["g"].get<std::string>();
      const SamplePlan plan = plan_from_json(entry.value("plan", json()));
      CheckOptions opt;
      if (entry.contains("tol")) opt.tol = entry["tol"].get<double>();
      if (entry.contains("grad_tol")) opt.grad_tol = entry["grad_tol"].get<double>();
      const json expect = entry.value("expect", json::object());
      CorpusRow row;
      row.file = name;
      row.check = label;
      if (is_theorem) {
        TheoremArgs a;
        a.plan = plan;
        a.options = opt;
        for (const auto& w : entry.value("with", json::array())) {
          Scenario extra = load_scenario_file((dir / w.get<std::string>()).string());
          a.with.push_back(std::move(extra));
        }
        for (const auto& w : entry.value("weights", json::array())) a.weights.push_back(json_scalar(w));
        a.g = entry.value("g", std::string());
        a.premise = entry.value("premise", std::string("SSEP"));
        for (const auto& r : entry.value("levels", json::array())) a.levels.push_back(json_scalar(r));
        a.offsets = entry.value("offsets", std::size_t{3});
        const auto v = run_theorem(sc, entry["theorem"].get<std::string>(), a);
        const bool want = expect.value("consistent", true);
        row.expected = want ? "consistent" : "inconsistent";
        row.actual = v.consistent ? "consistent" : "inconsistent";
        row.pass = want == v.consistent;
        if (auto it = expect.find("conclusion"); it != expect.end() && v.conclusion) {
          if (const auto want_c = parse_verdict(it->get<std::string>()); !want_c || *want_c != v.conclusion->verdict) {
            row.pass = false;
            row.detail = "conclusion verdict " + std::string(to_string(v.conclusion->verdict));
          }
        }
        row.report = to_json(v);
      } else {
        std::optional<double> level;
        if (entry.contains("level")) level = json_scalar(entry["level"]);
        const auto r = run_check(sc, entry["property"].get<std::string>(), plan, opt, level, entry.value("offsets", std::size_t{3}));
        row.expected = expect.value("verdict", std::string("-"));
        row.actual = std::string(to_string(r.verdict));
        row.detail = compare_check(r, expect);
        row.pass = row.detail.empty();
        row.report = to_json(r);
      }
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      rows.push_back(error_row(label.empty() ? "?" : label, e.what()));
    }
  }
  return rows;
}

inline std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("corpus directory '" + dir.string() + "' not found");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string n = e.path().filename().string();
    const bool sidecar = n.size() > 12 && n.ends_with(".expect.json");
    if (e.is_regular_file() && n.ends_with(".json") && !sidecar) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Runs every scenario in parallel; rows come back ordered by filename.
inline std::vector<CorpusRow> run_corpus(const std::filesystem::path& dir) {
  const auto files = corpus_files(dir);
  std::vector<std::future<std::vector<CorpusRow>>> jobs;
  for (const auto& f : files) jobs.push_back(std::async(std::launch::async, run_corpus_file, dir, f));
  std::vector<CorpusRow> rows;
  for (auto& j : jobs) {
    auto part = j.get();
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

inline void print_table(std::ostream& out, const std::vector<CorpusRow>& rows) {
  std::size_t wf = 4, wc = 5, we = 8, wa = 6;
  for (const auto& r : rows) {
    wf = std::max(wf, r.file.size());
    wc = std::max(wc, r.check.size());
    we = std::max(we, r.expected.size());
    wa = std::max(wa, r.actual.size());
  }
  auto line = [&](const std::string& f, const std::string& c, const std::string& e, const std::string& a,
                  const std::string& res, const std::string& d) {
    out << std::left << std::setw(static_cast<int>(wf)) << f << "  " << std::setw(static_cast<int>(wc)) << c << "  "
        << std::setw(static_cast<int>(we)) << e << "  " << std::setw(static_cast<int>(wa)) << a << "  " << res;
    if (!d.empty()) out << "  " << d;
    out << "\n";
  };
  line("FILE", "CHECK", "EXPECTED", "ACTUAL", "RESULT", "");
  for (const auto& r : rows) line(r.file, r.check, r.expected, r.actual, r.pass ? "pass" : "FAIL", r.detail);
  const auto passed = static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.pass; }));
  out << passed << "/" << rows.size() << " passed\n";
}

// ---------------------------------------------------------------------------
// Entry point

struct PlanFlags {
  std::size_t grid = 9;
  std::size_t alpha_grid = 5;
  std::size_t lambda_grid = 5;
  std::size_t random = 10000;
  std::size_t rejection_cap = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> tuples;

  SamplePlan plan() const {
    SamplePlan p;
    p.grid_per_dim = grid;
    p.alpha_grid = alpha_grid;
    p.lambda_grid = lambda_grid;
    p.random_tuples = random;
    p.rejection_cap = rejection_cap;
    p.seed = seed;
    for (const auto& t : tuples) p.explicit_tuples.push_back(parse_tuple(t));
    return p;
  }
};

inline void add_plan_flags(CLI::App* sub, PlanFlags& f) {
  sub->add_option("--grid", f.grid, "grid points per dimension")->capture_default_str();
  sub->add_option("--alpha-grid", f.alpha_grid, "alpha grid size on [0,1]")->capture_default_str();
  sub->add_option("--lambda-grid", f.lambda_grid, "lambda grid size on [0,1]")->capture_default_str();
  sub->add_option("--rand", f.random, "random tuples after the grid")->capture_default_str();
  sub->add_option("--rejection-cap", f.rejection_cap, "rejection attempts per random point")->capture_default_str();
  sub->add_option("--seed", f.seed, "random seed")->capture_default_str();
  sub->add_option("--tuple", f.tuples, "explicit tuple S|T|ALPHA|LAMBDA (repeatable; replaces grid and random)");
}

inline void add_tol_flags(CLI::App* sub, CheckOptions& o) {
  sub->add_option("--tol", o.tol, "inequality tolerance")->capture_default_str();
  sub->add_option("--strict-margin", o.strict_margin, "margin required by strict variants")->capture_default_str();
  sub->add_option("--grad-tol", o.grad_tol, "relative slack on gradient terms")->capture_default_str();
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampled verification of semi strongly E-preinvexity and related properties", "seikit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string scenario_path, report_path, property, theorem_id, g_text, premise = "SSEP", weights_text, corpus_dir;
  std::vector<std::string> with_paths;
  std::vector<double> levels;
  std::size_t offsets = 3;
  PlanFlags plan_flags;
  CheckOptions options;
  SolverConfig solver;
  std::optional<double> alpha;

  auto* check = app.add_subcommand("check", "check one property on a scenario");
  check->add_option("--scenario", scenario_path, "scenario file")->required();
  check->add_option("--property", property, "property tag (SSEP, SSEC, ..., LEVEL_SET_SEI, EPIGRAPH_GINVEX)")->required();
  check->add_option("--level", levels, "level r for LEVEL_SET_SEI");
  check->add_option("--offsets", offsets, "epigraph value-offset count")->capture_default_str();
  check->add_option("--report", report_path, "write the machine report here");
  add_plan_flags(check, plan_flags);
  add_tol_flags(check, options);

  auto* theorem = app.add_subcommand("theorem", "validate a theorem as a sampled implication");
  theorem->add_option("--scenario", scenario_path, "scenario file")->required();
  theorem->add_option("--id", theorem_id, "alpha-contraction|linear|sup|compose|bridge|spsep|sqsep|quasi-bridge|level-set|epigraph|feasible-sei")
      ->required();
  theorem->add_option("--with", with_paths, "additional scenario for linear / sup (repeatable)");
  theorem->add_option("--weights", weights_text, "comma-separated weights for linear");
  theorem->add_option("--g", g_text, "outer function of x1 for compose");
  theorem->add_option("--premise", premise, "SSEP or SQSEP (alpha-contraction, feasible-sei)")->capture_default_str();
  theorem->add_option("--level", levels, "level r for level-set (repeatable)");
  theorem->add_option("--offsets", offsets, "epigraph value-offset count")->capture_default_str();
  theorem->add_option("--report", report_path, "write the machine report here");
  add_plan_flags(theorem, plan_flags);
  add_tol_flags(theorem, options);

  auto* solve = app.add_subcommand("solve", "minimize h subject to the constraints");
  solve->add_option("--scenario", scenario_path, "scenario file")->required();
  solve->add_option("--alpha", alpha, "solve the pulled-back problem at this alpha");
  solve->add_option("--starts", solver.starts, "number of starts")->capture_default_str();
  solve->add_option("--max-evals", solver.max_evals_per_start, "evaluation budget per start")->capture_default_str();
  solve->add_option("--report", report_path, "write the machine report here");
  add_plan_flags(solve, plan_flags);
  add_tol_flags(solve, options);

  auto* corpus = app.add_subcommand("corpus", "run a directory of scenarios against their .expect.json sidecars");
  corpus->add_option("dir", corpus_dir, "corpus directory")->required();
  corpus->add_option("--report", report_path, "write the machine report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 3;
  }

  json manifest = {{"argv", args}, {"version", std::string(kVersion)}, {"timestamp", timestamp()}};
  json doc;
  int code = 3;
  auto emit = [&]() {
    doc["exit_code"] = code;
    if (report_path.empty()) return;
    std::ofstream f(report_path);
    if (!f) {
      err << "error: cannot write report '" << report_path << "'\n";
      code = 3;
      return;
    }
    f << doc.dump(2) << "\n";
  };

  try {
    const SamplePlan plan = plan_flags.plan();
    solver.seed = plan.seed;
    json config = {{"plan", to_json(plan)}, {"options", to_json(options)}};

    if (check->parsed()) {
      manifest["command"] = "check";
      manifest["scenario_path"] = scenario_path;
      config["property"] = property;
      if (!levels.empty()) config["level"] = levels.front();
      config["offsets"] = offsets;
      manifest["config"] = config;
      doc["manifest"] = manifest;
      const Scenario sc = load_scenario_file(scenario_path);
      const auto rep = run_check(sc, property, plan, options,
                                 levels.empty() ? std::nullopt : std::optional<double>(levels.front()), offsets);
      code = exit_code(rep.verdict);
      out << sc.name << "\n";
      print_check(out, rep);
      doc["report"] = to_json(rep);
    } else if (theorem->parsed()) {
      manifest["command"] = "theorem";
      manifest["scenario_path"] = scenario_path;
      config["id"] = theorem_id;
      config["with"] = with_paths;
      config["weights"] = weights_text;
      config["g"] = g_text;
      config["premise"] = premise;
      config["levels"] = levels;
      config["offsets"] = offsets;
      manifest["config"] = config;
      doc["manifest"] = manifest;
      const Scenario sc = load_scenario_file(scenario_path);
      TheoremArgs a;
      a.plan = plan;
      a.options = options;
      for (const auto& p : with_paths) a.with.push_back(load_scenario_file(p));
      if (!weights_text.empty()) a.weights = parse_list(weights_text);
      a.g = g_text;
      a.premise = premise;
      a.levels = levels;
      a.offsets = offsets;
      const auto v = run_theorem(sc, theorem_id, a);
      code = v.consistent ? 0 : 1;
      out << sc.name << "\n";
      print_theorem(out, v);
      doc["report"] = to_json(v);
    } else if (solve->parsed()) {
      manifest["command"] = "solve";
      manifest["scenario_path"] = scenario_path;
      config["solver"] = to_json(solver);
      if (alpha) config["alpha"] = *alpha;
      manifest["config"] = config;
      doc["manifest"] = manifest;
      const Scenario sc = load_scenario_file(scenario_path);
      out << sc.name << "\n";
      if (alpha) {
        const auto r = solve_p_alpha(sc, *alpha, solver, plan, options);
        code = exit_code(r.t_star.status);
        print_solve(out, r.t_star, "P_alpha (alpha=" + fmt(*alpha) + ")");
        out << "  mapped point " << fmt(r.mapped) << " value " << fmt(r.mapped_value) << " (direct minimum "
            << fmt(r.direct.value) << ")" << (r.consistent ? "" : "  INCONSISTENT") << "\n";
        for (const auto& n : r.notes) out << "  note: " << n << "\n";
        doc["report"] = to_json(r);
      } else {
        const auto r = solve_p(sc, solver);
        code = exit_code(r.status);
        print_solve(out, r, "P");
        doc["report"] = to_json(r);
        if (r.status == OptStatus::OptimalCandidate) {
          try {
            const auto lg = check_local_global_uniqueness(sc, solver, plan, options);
            out << "  local = global: " << (lg.local_equals_global ? "yes" : "no") << ", clusters: " << lg.clusters
                << ", uniqueness: "
                << (lg.unique ? (*lg.unique ? "unique" : "not unique") : std::string("not applicable")) << "\n";
            doc["local_global"] = to_json(lg);
          } catch (const Error& e) {
            out << "  local = global: skipped (" << e.what() << ")\n";
            doc["local_global"] = {{"skipped", e.what()}};
          }
          const auto est = estimate_optimal_set(sc, solver, plan, options);
          out << "  optimal set sample: " << est.x_opt_sample.size() << " points, SEI "
              << to_string(est.sei_report.verdict) << (est.asserted ? "" : " (not asserted)") << "\n";
          doc["optimal_set"] = to_json(est);
        }
      }
    } else if (corpus->parsed()) {
      manifest["command"] = "corpus";
      manifest["corpus_dir"] = corpus_dir;
      manifest["config"] = json::object();
      doc["manifest"] = manifest;
      const auto rows = run_corpus(corpus_dir);
      print_table(out, rows);
      json jrows = json::array();
      std::size_t passed = 0;
      for (const auto& r : rows) {
        passed += r.pass;
        jrows.push_back({{"file", r.file},
                         {"check", r.check},
                         {"expected", r.expected},
                         {"actual", r.actual},
                         {"pass", r.pass},
                         {"detail", r.detail},
                         {"report", r.report}});
      }
      doc["rows"] = jrows;
      doc["passed"] = passed;
      doc["failed"] = rows.size() - passed;
      code = passed == rows.size() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    if (!doc.contains("manifest")) doc["manifest"] = manifest;
    doc["error"] = e.what();
    code = 3;
  }
  emit();
  return code;
}

}  // namespace sei::cli
