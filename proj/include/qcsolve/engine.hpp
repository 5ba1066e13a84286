#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcsolve/backend.hpp"
#include "qcsolve/normalize.hpp"
#include "qcsolve/syntax.hpp"

namespace qcsolve::engine {

// For satisfiability, Holds means "satisfiable".
enum class Answer { Holds, DoesNotHold, Unknown };

enum class Reason {
  ThetaValid,       // the (branch of the) first query is unsatisfiable
  ThetaInvalid,     // satisfiable, with a witness
  SimPlusPsiValid,  // relevant variables match and Ψ is valid
  SimFailed,        // no branch of the second query has matching variables
  PsiInvalid,       // matching branches exist but Ψ has a countermodel
  SolverUnknown,
  BranchFailure,    // one of several branches of the first query failed
};

std::string to_string(Answer a);
std::string to_string(Reason r);

struct BranchLog {
  int index = 0;
  Answer answer = Answer::Unknown;
  Reason reason = Reason::SolverUnknown;
  // Second-query branches whose relevant variables match, and the one whose
  // Ψ was valid (-1: only the disjunction over all of them was valid).
  std::vector<int> compatible;
  std::optional<int> matched;
  int solver_calls = 0;
};

struct Verdict {
  Answer answer = Answer::Unknown;
  Reason reason = Reason::SolverUnknown;
  int failing_branch = -1;
  std::optional<backend::Witness> witness;
  std::vector<BranchLog> branches;
  int solver_calls = 0;
  // Witnesses the evaluator rejected; each one turned a verdict into Unknown.
  int witness_failures = 0;
  // Equivalence only: which direction decided the verdict ("forward" or
  // "backward").
  std::string direction;
};

struct Config {
  backend::SolverConfig solver = backend::default_solver_config();
  size_t branch_cap = normalize::kDefaultBranchCap;
  // Called with a label and every script before it is sent to the solver.
  std::function<void(const std::string&, const backend::SmtScript&)> on_script;
  // Called with a label and every formula that is checked.
  std::function<void(const std::string&, const fol::Formula&, const fol::Signature&)> on_formula;
};

// When q2 is not projection-free after normalization, containment returns
// only a validated DoesNotHold and otherwise throws ProjectionInSuperQuery.
// Normalization errors propagate.
Verdict check_containment(const syntax::Query& q1, const syntax::Query& q2, const Config& cfg);
Verdict check_subsumption(const syntax::Query& q1, const syntax::Query& q2, const Config& cfg);
Verdict check_equivalence(const syntax::Query& q1, const syntax::Query& q2, const Config& cfg);
Verdict check_satisfiability(const syntax::Query& q1, const Config& cfg);

// Random pairs from a small conjunctive grammar.
struct QueryPair {
  syntax::Query q1, q2;
  bool subsumption = false;
};
std::vector<QueryPair> generate_pairs(uint64_t seed, int n_pairs);
std::vector<rdf::Dataset> generate_datasets(uint64_t seed, int n_datasets);

struct DiffReport {
  int pairs = 0;
  int holds = 0;
  int does_not_hold = 0;
  int unknown = 0;
  int rejected = 0;          // inputs the engine refused (e.g. not well-designed)
  int refuted = 0;           // Holds verdicts contradicted by the evaluator
  int witness_failures = 0;  // DoesNotHold witnesses the evaluator rejected
  std::vector<std::string> violations;
  bool ok() const { return refuted == 0 && witness_failures == 0; }
};

DiffReport differential_check(uint64_t seed, int n_pairs, int n_datasets, const Config& cfg);

}  // namespace qcsolve::engine
