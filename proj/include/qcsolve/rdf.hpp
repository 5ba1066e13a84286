#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qcsolve/syntax.hpp"

namespace qcsolve::rdf {

enum class TermKind { Iri, BlankNode, Literal, Err };

struct RdfTerm {
  TermKind kind = TermKind::Iri;
  std::string lexical;
  std::optional<std::string> datatype;

  static RdfTerm iri(std::string iri);
  static RdfTerm blank(std::string label);
  static RdfTerm literal(std::string lexical,
                         std::optional<std::string> datatype = std::nullopt);
  static RdfTerm err();

  bool is_err() const { return kind == TermKind::Err; }
  bool is_literal() const { return kind == TermKind::Literal; }

  auto operator<=>(const RdfTerm&) const = default;
  bool operator==(const RdfTerm&) const = default;
};

// Converts a query constant (IRI or literal) to a data term.
RdfTerm from_syntax(const syntax::Term& t);

struct Triple {
  RdfTerm s, p, o;
  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

class Graph {
 public:
  using const_iterator = std::set<Triple>::const_iterator;

  // Throws IllFormedTriple for err components, literal subjects or non-IRI
  // predicates.
  void insert(Triple t);
  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }
  const std::set<Triple>& triples() const { return triples_; }

  bool operator==(const Graph&) const = default;

 private:
  std::set<Triple> triples_;
};

struct Dataset {
  Graph default_graph;
  std::map<std::string, Graph> named;

  bool operator==(const Dataset&) const = default;
};

const Graph& empty_graph();
const Graph& df(const Dataset& d);
std::set<std::string> names(const Dataset& d);
const Graph& gr(const Dataset& d, const std::string& iri);
Graph merge(const std::vector<const Graph*>& graphs);

Dataset query_dataset(const syntax::Query& q, const Dataset& global);

// Datatype IRI of a literal; xsd:string for plain literals.
RdfTerm dt(const RdfTerm& l);

std::string to_string(const RdfTerm& t);
std::string to_string(const Triple& t);

Dataset parse_nquads(std::string_view text);
std::string to_nquads(const Dataset& d);

}  // namespace qcsolve::rdf
