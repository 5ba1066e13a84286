#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qcsolve/rdf.hpp"
#include "qcsolve/syntax.hpp"

namespace qcsolve::fol {

// Constants of the theory: one per IRI/literal of the queries, plus err at
// index 0. Shared by both queries of a check.
class Signature {
 public:
  Signature();

  int intern(const rdf::RdfTerm& t);
  std::optional<int> find(const rdf::RdfTerm& t) const;
  static constexpr int err() { return 0; }
  const rdf::RdfTerm& value(int c) const { return values_.at(c); }
  size_t size() const { return values_.size(); }

  bool uses_datatype() const { return uses_datatype_; }
  void mark_datatype_used() { uses_datatype_ = true; }

 private:
  std::vector<rdf::RdfTerm> values_;
  std::map<rdf::RdfTerm, int> index_;
  bool uses_datatype_ = false;
};

struct FolTerm;
using TermPtr = std::shared_ptr<const FolTerm>;

struct FolTerm {
  enum class Kind { Var, Const, Datatype };
  Kind kind = Kind::Var;
  std::string var;
  int constant = -1;
  TermPtr arg;
};

TermPtr var_term(std::string name);
TermPtr const_term(int c);
TermPtr datatype_term(TermPtr arg);

enum class Pred { BetaD, BetaN, IsLiteral, Eq };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Atom, Not, And, Or, Implies, Exists, Forall, Bottom, Top };
  Kind kind = Kind::Atom;
  Pred pred = Pred::Eq;
  std::vector<TermPtr> args;
  std::vector<FormulaPtr> children;
  std::vector<std::string> vars;  // quantifiers
};

FormulaPtr atom(Pred p, std::vector<TermPtr> args);
FormulaPtr negation(FormulaPtr f);
// Nested conjunctions/disjunctions are flattened; a single child is returned
// as is; an empty And is Top and an empty Or is Bottom.
FormulaPtr conjunction(std::vector<FormulaPtr> fs);
FormulaPtr disjunction(std::vector<FormulaPtr> fs);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
// Quantifiers over no variables return the body unchanged.
FormulaPtr exists(std::vector<std::string> vars, FormulaPtr body);
FormulaPtr forall(std::vector<std::string> vars, FormulaPtr body);
FormulaPtr bottom();
FormulaPtr top();

using VarNames = std::set<std::string>;

VarNames free_vars(const Formula& f);
VarNames free_vars(const FolTerm& t);

// σt on variables and blank nodes: "?x" and "_:b" keep their namespaces apart.
std::string var_name(const syntax::Term& t);
VarNames var_names(const syntax::VarSet& vs);

struct ActiveGraphCtx {
  enum class Kind { DefaultOfGlobal, MergedFrom, EmptyDefault, Named };
  Kind kind = Kind::DefaultOfGlobal;
  std::vector<int> graphs;  // MergedFrom: from IRIs; Named: the one graph
};

// What the query's own from/from named clauses say about its dataset.
struct QueryContext {
  bool explicit_dataset = false;  // the query has from or from named clauses
  std::vector<int> named;         // I_n
};

QueryContext query_context(const std::vector<std::string>& from,
                           const std::vector<std::string>& from_named,
                           Signature& sig);
ActiveGraphCtx cx_default(const std::vector<std::string>& from,
                          const std::vector<std::string>& from_named,
                          Signature& sig);

TermPtr sigma_term(const syntax::Term& t, Signature& sig);
TermPtr sigma_expr(const syntax::Expression& e, const syntax::VarSet& bound,
                   Signature& sig);
FormulaPtr sigma_cond(const syntax::Condition& r, const syntax::VarSet& bound,
                      Signature& sig);
// Translation of a conjunctive pattern. Throws UnsupportedShape on union,
// optional and subquery nodes, and on graph operators when the query has no
// dataset clauses.
FormulaPtr sigma_pattern(const syntax::Pattern& gp, const ActiveGraphCtx& ctx,
                         const QueryContext& qc, Signature& sig);

// var(qpat) ∩ dv.
VarNames relevant_vars(const syntax::Pattern& branch, const syntax::VarSet& dv);

// ∃ov̄ σ with ov̄ = free_vars(σ) \ v̄.
FormulaPtr phi(const FormulaPtr& sigma, const VarNames& v);
// ¬∃r̄v Φ with the two existential prefixes fused.
FormulaPtr theta(const FormulaPtr& phi1, const VarNames& rv1);
// ∀r̄v1 (Φ1 ⇒ ⋁ Φ2ʲ).
FormulaPtr psi(const FormulaPtr& phi1, const VarNames& rv1,
               const std::vector<FormulaPtr>& phi2);

enum class Mode { Containment, Subsumption };
bool tilde(const VarNames& rv1, const VarNames& rv2, Mode mode);

// Query-level conveniences for queries whose pattern is already conjunctive.
struct ConjunctiveForm {
  FormulaPtr sigma;
  VarNames rv;
  FormulaPtr phi;
};
ConjunctiveForm conjunctive_form(const syntax::Query& q, Signature& sig);
ConjunctiveForm conjunctive_form(const syntax::PatternPtr& branch,
                                 const std::vector<syntax::Term>& dv,
                                 const std::vector<std::string>& from,
                                 const std::vector<std::string>& from_named,
                                 Signature& sig);

// Equality up to renaming of variables (a bijection) and reordering of
// conjuncts/disjuncts. Quantifier prefixes are compared as sets.
bool alpha_equivalent(const Formula& a, const Formula& b);

std::string to_string(const FolTerm& t, const Signature& sig);
std::string to_string(const Formula& f, const Signature& sig);

}  // namespace qcsolve::fol
