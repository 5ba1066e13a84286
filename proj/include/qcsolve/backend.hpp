#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcsolve/eval.hpp"
#include "qcsolve/fol.hpp"
#include "qcsolve/rdf.hpp"
#include "qcsolve/syntax.hpp"

namespace qcsolve::backend {

inline constexpr std::string_view kWitnessIriPrefix = "urn:qcsolve:witness:";

struct SmtScript {
  std::string text;
  // SMT name of every signature constant, by index.
  std::vector<std::string> constants;
  // FOL variables replaced by Skolem constants, with the constant's name.
  std::map<std::string, std::string> skolems;
};

// Encodes "is f valid?" as a satisfiability query: the background theory
// (distinct constants, err guards, isLiteral and datatype axioms) followed by
// (assert (not f)). Leading universal binders of f, or the existential
// binders under a leading negation, become Skolem constants so that the model
// reports their values. Interns the datatype IRIs of literal constants when
// the formula uses datatype.
SmtScript emit_smtlib(const fol::Formula& f, fol::Signature& sig);

struct SolverConfig {
  std::vector<std::string> command = {"z3", "-in"};
  std::chrono::milliseconds timeout{10000};
};

// Default command, overridden by the QCSOLVE_SOLVER environment variable.
SolverConfig default_solver_config();
std::vector<std::string> split_command(const std::string& cmd);

// Parsed s-expression.
struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_atom = true;
};

std::vector<Sexp> parse_sexps(std::string_view text);

// A finite model as printed by get-model: universe elements of sort U and
// function definitions that can be evaluated on them.
class Model {
 public:
  static std::optional<Model> from_sexp(const Sexp& model);

  const std::vector<std::string>& universe() const { return universe_; }
  // Element denoted by a 0-ary symbol, if the model defines it.
  std::optional<std::string> constant(const std::string& name) const;
  // Truth value of a predicate; undefined predicates are false everywhere.
  bool holds(const std::string& pred, const std::vector<std::string>& args) const;
  // Value of a unary function; nullopt when undefined.
  std::optional<std::string> apply(const std::string& fn,
                                   const std::vector<std::string>& args) const;

 private:
  struct Value {
    bool is_bool = false;
    bool b = false;
    std::string elem;
  };
  struct Fun {
    std::vector<std::string> params;
    Sexp body;
  };
  using Env = std::map<std::string, Value>;

  Value eval(const Sexp& e, const Env& env, int depth) const;
  Value call(const std::string& name, const std::vector<Value>& args, int depth) const;

  std::vector<std::string> universe_;
  std::map<std::string, Fun> funs_;
};

enum class Status { Sat, Unsat, Unknown };
std::string to_string(Status s);

struct SolverResult {
  Status status = Status::Unknown;
  std::optional<Model> model;
  SmtScript script;
  std::string output;  // raw solver output
};

// Runs the solver on emit_smtlib(f). Unsat means f is valid. A timeout gives
// Unknown. Throws SolverNotFound and SolverProtocolError.
SolverResult check_validity(const fol::Formula& f, fol::Signature& sig,
                            const SolverConfig& cfg);
// Runs an already emitted script.
SolverResult run_script(const SmtScript& script, const SolverConfig& cfg);

enum class WitnessMode { Satisfiability, Containment, Subsumption };

struct Witness {
  rdf::Dataset dataset;
  eval::Mapping binding;
  bool validated = false;
  std::string note;  // why validation failed, if it did
};

// Builds a dataset from a model of the negated formula and checks it with the
// evaluator against the original queries. `rv1` are the variables whose
// Skolem constants give the binding.
Witness extract_witness(const SolverResult& res, const fol::Signature& sig,
                        const std::vector<syntax::Term>& rv1, const syntax::Query& q1,
                        const syntax::Query* q2, WitnessMode mode);

// Evaluator-only part of extract_witness, usable on any candidate.
bool validate_witness(Witness& w, const syntax::Query& q1, const syntax::Query* q2,
                      WitnessMode mode);

}  // namespace qcsolve::backend
