#pragma once

#include <array>
#include <compare>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qcsolve::syntax {

inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfNs =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kXsdString =
    "http://www.w3.org/2001/XMLSchema#string";
// Namespace used for `:local` names when no empty prefix is declared.
inline constexpr std::string_view kDefaultBase = "urn:default:";
// Generated variables start with this; the parser refuses it in user input.
inline constexpr std::string_view kReservedPrefix = "__f";

enum class TermKind { Variable, BlankNode, Iri, Literal };

// A query-side term. Variables and blank nodes store their name without the
// `?` / `_:` sigil; `kind` keeps the two namespaces apart.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string lexical;
  std::optional<std::string> datatype;  // literals only

  static Term var(std::string name);
  static Term blank(std::string label);
  static Term iri(std::string iri);
  static Term literal(std::string lexical,
                      std::optional<std::string> datatype = std::nullopt);

  bool is_var_like() const {
    return kind == TermKind::Variable || kind == TermKind::BlankNode;
  }
  bool is_constant() const { return !is_var_like(); }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

using VarSet = std::set<Term>;

struct Expression;
struct Condition;
struct Pattern;
struct Query;
using ExprPtr = std::shared_ptr<const Expression>;
using CondPtr = std::shared_ptr<const Condition>;
using PatternPtr = std::shared_ptr<const Pattern>;
using QueryPtr = std::shared_ptr<const Query>;

struct Expression {
  enum class Kind { Term, Datatype };
  Kind kind = Kind::Term;
  syntax::Term term;  // Kind::Term
  ExprPtr arg;        // Kind::Datatype
};

struct Condition {
  enum class Kind { Eq, Not, And, Or, Paren, IsLiteral };
  Kind kind = Kind::Eq;
  ExprPtr lhs, rhs;     // Eq uses both, IsLiteral uses lhs
  CondPtr left, right;  // Not/Paren use left
};

struct Pattern {
  enum class Kind {
    Triple,
    Join,
    Union,
    Minus,
    Diff,
    Optional,
    Filter,
    Group,
    SubQuery,
    GraphVar,
    GraphIri
  };
  Kind kind = Kind::Triple;
  std::array<Term, 3> triple;
  PatternPtr left, right;  // unary nodes use left
  CondPtr cond;            // Filter
  QueryPtr query;          // SubQuery
  Term graph;              // GraphVar / GraphIri
};

struct Query {
  std::optional<std::vector<Term>> select;  // nullopt is `select *`
  std::vector<std::string> from;
  std::vector<std::string> from_named;
  PatternPtr pattern;

  bool is_star() const { return !select.has_value(); }
  // The effective distinguished variables, duplicates removed.
  std::vector<Term> distinguished() const;
  VarSet distinguished_set() const;
};

// Factories.
ExprPtr term_expr(Term t);
ExprPtr datatype_expr(ExprPtr e);
CondPtr eq(ExprPtr a, ExprPtr b);
CondPtr negate(CondPtr c);
CondPtr conj(CondPtr a, CondPtr b);
CondPtr disj(CondPtr a, CondPtr b);
CondPtr paren(CondPtr c);
CondPtr is_literal(ExprPtr e);

PatternPtr triple(Term s, Term p, Term o);
PatternPtr join(PatternPtr a, PatternPtr b);
PatternPtr union_of(PatternPtr a, PatternPtr b);
PatternPtr minus(PatternPtr a, PatternPtr b);
PatternPtr diff(PatternPtr a, PatternPtr b);
PatternPtr optional(PatternPtr a, PatternPtr b);
PatternPtr filter(PatternPtr a, CondPtr r);
PatternPtr group(PatternPtr a);
PatternPtr subquery(Query q);
PatternPtr graph_var(Term var, PatternPtr a);
PatternPtr graph_iri(Term iri, PatternPtr a);

// Deep structural equality.
bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const CondPtr& a, const CondPtr& b);
bool equal(const PatternPtr& a, const PatternPtr& b);
bool equal(const Query& a, const Query& b);

VarSet vars_of(const Term& t);
VarSet vars_of(const Expression& e);
VarSet vars_of(const Condition& c);
VarSet vars_of(const Pattern& p);

// Every variable or blank node occurring anywhere in the pattern, including
// filter conditions and right operands of minus/diff. Subqueries contribute
// only their distinguished variables.
VarSet all_vars(const Pattern& p);

bool contains_kind(const Pattern& p, Pattern::Kind k);

// var(qpat) ⊆ dv.
bool is_projection_free(const Query& q);

struct ParseOptions {
  bool allow_reserved_names = false;
};

Query parse_query(std::string_view text, const ParseOptions& opts = {});

std::string to_string(const Term& t);
std::string to_string(const Expression& e);
std::string to_string(const Condition& c);
// Body text of a group graph pattern, without the enclosing braces.
std::string to_string(const Pattern& p);
std::string to_string(const Query& q);

}  // namespace qcsolve::syntax
