#pragma once

#include <map>
#include <set>

#include "qcsolve/rdf.hpp"
#include "qcsolve/syntax.hpp"

namespace qcsolve::eval {

// Partial map from variables and blank nodes to RDF terms.
using Mapping = std::map<syntax::Term, rdf::RdfTerm>;
using MappingSet = std::set<Mapping>;

enum class Combine { Union, Join, Diff, Minus, LeftOuterJoin };

bool compatible(const Mapping& m1, const Mapping& m2);
MappingSet combine(const MappingSet& a, const MappingSet& b, Combine kind);
MappingSet project(const MappingSet& omega, const syntax::VarSet& vars);
// True iff m2 agrees with m1 on dom(m1).
bool extends(const Mapping& m2, const Mapping& m1);

rdf::RdfTerm value_of(const syntax::Term& t, const Mapping& m);
rdf::RdfTerm value_of(const syntax::Expression& e, const Mapping& m);
bool cond_holds(const syntax::Condition& r, const Mapping& m);

MappingSet eval_pattern(const syntax::Pattern& gp, const rdf::Dataset& d,
                        const rdf::Graph& active);
MappingSet eval_query(const syntax::Query& q, const rdf::Dataset& global);

std::string to_string(const Mapping& m);

}  // namespace qcsolve::eval
