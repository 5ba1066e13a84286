#include "qcsolve/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "qcsolve/engine.hpp"
#include "qcsolve/error.hpp"
#include "qcsolve/eval.hpp"

namespace qcsolve::cli {

namespace {

using json = nlohmann::ordered_json;
using engine::Answer;
using engine::Verdict;

struct CliConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  bool containment = false, subsumption = false, equivalence = false;
  std::string data_path;
  std::string solver;
  double timeout_s = 10.0;
  size_t branch_cap = normalize::kDefaultBranchCap;
  bool json = false;
  bool timings = false;
  std::string smt_dump, fol_dump, normalized_dump;
  std::string witness_out;
  uint64_t seed = 42;
  int pairs = 50;
  int datasets = 20;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

syntax::Query load_query(const std::string& path) { return syntax::parse_query(read_file(path)); }

json binding_json(const eval::Mapping& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[syntax::to_string(k)] = rdf::to_string(v);
  return j;
}

std::string witness_text(const backend::Witness& w) {
  std::string text = "# binding:";
  for (const auto& [k, v] : w.binding) text += " " + syntax::to_string(k) + "=" + rdf::to_string(v);
  return text + "\n" + rdf::to_nquads(w.dataset);
}

// Collects the scripts and formulas the engine produces for the dump flags.
struct Dumps {
  std::string smt, fol;
};

engine::Config engine_config(const CliConfig& c, Dumps& dumps) {
  engine::Config ec;
  if (!c.solver.empty()) ec.solver.command = backend::split_command(c.solver);
  ec.solver.timeout = std::chrono::milliseconds(static_cast<long long>(c.timeout_s * 1000));
  ec.branch_cap = c.branch_cap;
  if (!c.smt_dump.empty()) {
    ec.on_script = [&dumps](const std::string& label, const backend::SmtScript& s) {
      dumps.smt += "; " + label + "\n" + s.text + "\n";
    };
  }
  if (!c.fol_dump.empty()) {
    ec.on_formula = [&dumps](const std::string& label, const fol::Formula& f,
                             const fol::Signature& sig) {
      dumps.fol += label + ": " + fol::to_string(f, sig) + "\n";
    };
  }
  return ec;
}

void write_dumps(const CliConfig& c, const Dumps& dumps) {
  if (!c.smt_dump.empty()) write_file(c.smt_dump, dumps.smt);
  if (!c.fol_dump.empty()) write_file(c.fol_dump, dumps.fol);
}

std::string verdict_name(Answer a, bool sat) {
  if (!sat) return engine::to_string(a);
  switch (a) {
    case Answer::Holds:
      return "Satisfiable";
    case Answer::DoesNotHold:
      return "Unsatisfiable";
    case Answer::Unknown:
      break;
  }
  return "Unknown";
}

int exit_code(Answer a) {
  switch (a) {
    case Answer::Holds:
      return kHolds;
    case Answer::DoesNotHold:
      return kDoesNotHold;
    case Answer::Unknown:
      break;
  }
  return kUnknown;
}

int report_verdict(const CliConfig& c, const std::string& op, const Verdict& v, double elapsed_ms,
                   std::ostream& out) {
  bool sat = op == "satisfiability";
  std::optional<std::string> witness_path;
  if (!c.witness_out.empty() && v.witness) {
    write_file(c.witness_out, witness_text(*v.witness));
    witness_path = c.witness_out;
  }
  if (c.json) {
    json j;
    j["check"] = op;
    j["verdict"] = verdict_name(v.answer, sat);
    j["reason"] = engine::to_string(v.reason);
    if (!v.direction.empty()) j["direction"] = v.direction;
    if (v.failing_branch >= 0) j["failing_branch"] = v.failing_branch;
    json branches = json::array();
    for (const auto& b : v.branches) {
      json jb;
      jb["index"] = b.index;
      jb["answer"] = engine::to_string(b.answer);
      jb["reason"] = engine::to_string(b.reason);
      jb["compatible"] = b.compatible;
      jb["matched"] = b.matched ? json(*b.matched) : json(nullptr);
      jb["solver_calls"] = b.solver_calls;
      branches.push_back(jb);
    }
    j["branches"] = branches;
    j["witness_path"] = witness_path ? json(*witness_path) : json(nullptr);
    if (v.witness) j["binding"] = binding_json(v.witness->binding);
    json t;
    t["solver_calls"] = v.solver_calls;
    t["witness_failures"] = v.witness_failures;
    if (c.timings) t["elapsed_ms"] = elapsed_ms;
    j["timings"] = t;
    out << j.dump(2) << "\n";
  } else {
    out << verdict_name(v.answer, sat) << " (" << engine::to_string(v.reason) << ")\n";
    if (!v.direction.empty()) out << "direction: " << v.direction << "\n";
    for (const auto& b : v.branches) {
      out << "  branch " << b.index << ": " << engine::to_string(b.answer) << " ("
          << engine::to_string(b.reason) << ")";
      if (b.matched) out << ", matched " << *b.matched;
      out << ", " << b.solver_calls << " solver call(s)\n";
    }
    if (v.witness) {
      out << "witness binding: " << eval::to_string(v.witness->binding) << "\n";
      if (witness_path) {
        out << "witness written to " << *witness_path << "\n";
      } else {
        out << rdf::to_nquads(v.witness->dataset);
      }
    }
    if (v.witness_failures > 0) out << "rejected witnesses: " << v.witness_failures << "\n";
    if (c.timings) out << "elapsed: " << elapsed_ms << " ms\n";
  }
  return exit_code(v.answer);
}

int run_check(const CliConfig& c, std::ostream& out) {
  Dumps dumps;
  auto ec = engine_config(c, dumps);
  auto start = std::chrono::steady_clock::now();
  Verdict v;
  std::string op;
  if (c.subcommand == "sat") {
    op = "satisfiability";
    v = engine::check_satisfiability(load_query(c.inputs.at(0)), ec);
  } else {
    auto q1 = load_query(c.inputs.at(0));
    auto q2 = load_query(c.inputs.at(1));
    if (c.subsumption) {
      op = "subsumption";
      v = engine::check_subsumption(q1, q2, ec);
    } else if (c.equivalence) {
      op = "equivalence";
      v = engine::check_equivalence(q1, q2, ec);
    } else {
      op = "containment";
      v = engine::check_containment(q1, q2, ec);
    }
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  write_dumps(c, dumps);
  return report_verdict(c, op, v, ms, out);
}

int run_eval(const CliConfig& c, std::ostream& out) {
  auto q = load_query(c.inputs.at(0));
  auto d = rdf::parse_nquads(read_file(c.data_path));
  auto result = eval::eval_query(q, d);
  if (c.json) {
    json sols = json::array();
    for (const auto& m : result) sols.push_back(binding_json(m));
    json j;
    j["solutions"] = sols;
    j["count"] = result.size();
    out << j.dump(2) << "\n";
  } else {
    for (const auto& m : result) out << eval::to_string(m) << "\n";
    out << result.size() << " solution(s)\n";
  }
  return kHolds;
}

int run_normalize(const CliConfig& c, std::ostream& out) {
  normalize::FreshNamer namer;
  auto n = normalize::normalize_query(load_query(c.inputs.at(0)), namer, c.branch_cap);
  std::string text = syntax::to_string(n.to_query());
  if (!c.normalized_dump.empty()) write_file(c.normalized_dump, text + "\n");
  if (c.json) {
    json j;
    j["query"] = text;
    j["branches"] = n.branches.size();
    j["projection_free"] = n.projection_free();
    out << j.dump(2) << "\n";
  } else {
    out << text << "\n";
  }
  return kHolds;
}

int run_difftest(const CliConfig& c, std::ostream& out) {
  Dumps dumps;
  auto ec = engine_config(c, dumps);
  auto start = std::chrono::steady_clock::now();
  auto rep = engine::differential_check(c.seed, c.pairs, c.datasets, ec);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  write_dumps(c, dumps);
  if (c.json) {
    json j;
    j["seed"] = c.seed;
    j["pairs"] = rep.pairs;
    j["datasets"] = c.datasets;
    j["holds"] = rep.holds;
    j["does_not_hold"] = rep.does_not_hold;
    j["unknown"] = rep.unknown;
    j["rejected"] = rep.rejected;
    j["refuted"] = rep.refuted;
    j["witness_failures"] = rep.witness_failures;
    j["violations"] = rep.violations;
    if (c.timings) j["timings"] = {{"elapsed_ms", ms}};
    out << j.dump(2) << "\n";
  } else {
    out << "pairs " << rep.pairs << ": holds " << rep.holds << ", does not hold " << rep.does_not_hold
        << ", unknown " << rep.unknown << ", rejected " << rep.rejected << "\n";
    out << "refuted " << rep.refuted << ", witness failures " << rep.witness_failures << "\n";
    for (const auto& v : rep.violations) out << "  " << v << "\n";
    if (c.timings) out << "elapsed: " << ms << " ms\n";
  }
  return rep.ok() ? kHolds : kDoesNotHold;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app("Decides containment, subsumption, equivalence and satisfiability of SPARQL queries.",
               "qcsolve");
  app.require_subcommand(1);
  app.add_flag("--json", c.json, "Machine-readable output");
  app.add_option("--solver", c.solver, "Solver command line (default: $QCSOLVE_SOLVER or 'z3 -in')");
  app.add_option("--timeout", c.timeout_s, "Seconds per solver call")->capture_default_str();
  app.add_option("--branch-cap", c.branch_cap, "Maximum union branches after normalization")
      ->capture_default_str();
  app.add_option("--smt-dump", c.smt_dump, "Write every SMT-LIB script to this file");
  app.add_option("--dump-fol", c.fol_dump, "Write every checked formula to this file");
  app.add_option("--witness-out", c.witness_out, "Write the witness dataset (N-Quads) here");
  app.add_flag("--timings", c.timings, "Include wall-clock times in the output");

  auto* check = app.add_subcommand("check", "Compare two queries");
  auto* modes = check->add_option_group("mode");
  modes->add_flag("--containment", c.containment);
  modes->add_flag("--subsumption", c.subsumption);
  modes->add_flag("--equivalence", c.equivalence);
  modes->require_option(1);
  check->add_option("queries", c.inputs, "Q1.rq Q2.rq")->required()->expected(2)->check(CLI::ExistingFile);

  auto* sat = app.add_subcommand("sat", "Decide satisfiability of a query");
  sat->add_option("query", c.inputs, "Q.rq")->required()->expected(1)->check(CLI::ExistingFile);

  auto* ev = app.add_subcommand("eval", "Evaluate a query over an N-Quads dataset");
  ev->add_option("query", c.inputs, "Q.rq")->required()->expected(1)->check(CLI::ExistingFile);
  ev->add_option("--data", c.data_path, "D.nq")->required()->check(CLI::ExistingFile);

  auto* norm = app.add_subcommand("normalize", "Print the normalized query");
  norm->add_option("query", c.inputs, "Q.rq")->required()->expected(1)->check(CLI::ExistingFile);
  norm->add_option("--dump-normalized", c.normalized_dump, "Also write the result to this file");

  auto* diff = app.add_subcommand("difftest", "Differential test against the evaluator");
  diff->add_option("--seed", c.seed)->capture_default_str();
  diff->add_option("--pairs", c.pairs)->capture_default_str()->check(CLI::NonNegativeNumber);
  diff->add_option("--datasets", c.datasets)->capture_default_str()->check(CLI::NonNegativeNumber);

  for (auto* sub : {check, sat, ev, norm, diff}) sub->fallthrough();

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kHolds;
  } catch (const CLI::ParseError& e) {
    err << "qcsolve: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kError;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (c.subcommand == "check" || c.subcommand == "sat") return run_check(c, out);
    if (c.subcommand == "eval") return run_eval(c, out);
    if (c.subcommand == "normalize") return run_normalize(c, out);
    return run_difftest(c, out);
  } catch (const Error& e) {
    err << "qcsolve: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "qcsolve: " << e.what() << "\n";
  }
  return kError;
}

}  // namespace qcsolve::cli
