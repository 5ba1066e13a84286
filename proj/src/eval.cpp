#include "qcsolve/eval.hpp"

namespace qcsolve::eval {

using syntax::Condition;
using syntax::Expression;
using syntax::Pattern;
using syntax::Term;

bool compatible(const Mapping& m1, const Mapping& m2) {
  const Mapping& small = m1.size() <= m2.size() ? m1 : m2;
  const Mapping& large = m1.size() <= m2.size() ? m2 : m1;
  for (const auto& [k, v] : small) {
    auto it = large.find(k);
    if (it != large.end() && it->second != v) return false;
  }
  return true;
}

bool extends(const Mapping& m2, const Mapping& m1) {
  for (const auto& [k, v] : m1) {
    auto it = m2.find(k);
    if (it == m2.end() || it->second != v) return false;
  }
  return true;
}

namespace {

bool disjoint_domains(const Mapping& m1, const Mapping& m2) {
  for (const auto& [k, v] : m1) {
    if (m2.count(k)) return false;
  }
  return true;
}

MappingSet join_sets(const MappingSet& a, const MappingSet& b) {
  MappingSet out;
  for (const auto& m1 : a) {
    for (const auto& m2 : b) {
      if (!compatible(m1, m2)) continue;
      Mapping m = m1;
      m.insert(m2.begin(), m2.end());
      out.insert(std::move(m));
    }
  }
  return out;
}

MappingSet diff_sets(const MappingSet& a, const MappingSet& b) {
  MappingSet out;
  for (const auto& m1 : a) {
    bool keep = true;
    for (const auto& m2 : b) {
      if (compatible(m1, m2)) {
        keep = false;
        break;
      }
    }
    if (keep) out.insert(m1);
  }
  return out;
}

MappingSet minus_sets(const MappingSet& a, const MappingSet& b) {
  MappingSet out;
  for (const auto& m1 : a) {
    bool keep = true;
    for (const auto& m2 : b) {
      if (compatible(m1, m2) && !disjoint_domains(m1, m2)) {
        keep = false;
        break;
      }
    }
    if (keep) out.insert(m1);
  }
  return out;
}

// Unifies one triple pattern position with a data term.
bool bind(const Term& pos, const rdf::RdfTerm& value, Mapping& m) {
  if (!pos.is_var_like()) return rdf::from_syntax(pos) == value;
  auto [it, inserted] = m.emplace(pos, value);
  return inserted || it->second == value;
}

MappingSet match_triple(const Pattern& tp, const rdf::Graph& g) {
  MappingSet out;
  for (const auto& t : g) {
    Mapping m;
    if (bind(tp.triple[0], t.s, m) && bind(tp.triple[1], t.p, m) &&
        bind(tp.triple[2], t.o, m))
      out.insert(std::move(m));
  }
  return out;
}

}  // namespace

MappingSet combine(const MappingSet& a, const MappingSet& b, Combine kind) {
  switch (kind) {
    case Combine::Union: {
      MappingSet out = a;
      out.insert(b.begin(), b.end());
      return out;
    }
    case Combine::Join:
      return join_sets(a, b);
    case Combine::Diff:
      return diff_sets(a, b);
    case Combine::Minus:
      return minus_sets(a, b);
    case Combine::LeftOuterJoin: {
      MappingSet out = join_sets(a, b);
      auto d = diff_sets(a, b);
      out.insert(d.begin(), d.end());
      return out;
    }
  }
  return {};
}

MappingSet project(const MappingSet& omega, const syntax::VarSet& vars) {
  MappingSet out;
  for (const auto& m : omega) {
    Mapping r;
    for (const auto& [k, v] : m) {
      if (vars.count(k)) r.emplace(k, v);
    }
    out.insert(std::move(r));
  }
  return out;
}

rdf::RdfTerm value_of(const Term& t, const Mapping& m) {
  if (!t.is_var_like()) return rdf::from_syntax(t);
  auto it = m.find(t);
  return it == m.end() ? rdf::RdfTerm::err() : it->second;
}

rdf::RdfTerm value_of(const Expression& e, const Mapping& m) {
  if (e.kind == Expression::Kind::Term) return value_of(e.term, m);
  rdf::RdfTerm v = value_of(*e.arg, m);
  if (!v.is_literal()) return rdf::RdfTerm::err();
  return rdf::dt(v);
}

bool cond_holds(const Condition& r, const Mapping& m) {
  using K = Condition::Kind;
  switch (r.kind) {
    case K::Eq: {
      auto a = value_of(*r.lhs, m);
      auto b = value_of(*r.rhs, m);
      return !a.is_err() && !b.is_err() && a == b;
    }
    case K::Not:
      return !cond_holds(*r.left, m);
    case K::And:
      return cond_holds(*r.left, m) && cond_holds(*r.right, m);
    case K::Or:
      return cond_holds(*r.left, m) || cond_holds(*r.right, m);
    case K::Paren:
      return cond_holds(*r.left, m);
    case K::IsLiteral:
      return value_of(*r.lhs, m).is_literal();
  }
  return false;
}

MappingSet eval_pattern(const Pattern& gp, const rdf::Dataset& d,
                        const rdf::Graph& active) {
  using K = Pattern::Kind;
  switch (gp.kind) {
    case K::Triple:
      return match_triple(gp, active);
    case K::Join:
      return join_sets(eval_pattern(*gp.left, d, active),
                       eval_pattern(*gp.right, d, active));
    case K::Union:
      return combine(eval_pattern(*gp.left, d, active),
                     eval_pattern(*gp.right, d, active), Combine::Union);
    case K::Minus:
      return minus_sets(eval_pattern(*gp.left, d, active),
                        eval_pattern(*gp.right, d, active));
    case K::Diff:
      return diff_sets(eval_pattern(*gp.left, d, active),
                       eval_pattern(*gp.right, d, active));
    case K::Optional:
      return combine(eval_pattern(*gp.left, d, active),
                     eval_pattern(*gp.right, d, active),
                     Combine::LeftOuterJoin);
    case K::Filter: {
      MappingSet out;
      for (auto& m : eval_pattern(*gp.left, d, active)) {
        if (cond_holds(*gp.cond, m)) out.insert(m);
      }
      return out;
    }
    case K::Group:
      return eval_pattern(*gp.left, d, active);
    case K::SubQuery:
      return eval_query(*gp.query, d);
    case K::GraphVar: {
      MappingSet out;
      for (const auto& i : rdf::names(d)) {
        Mapping bound{{gp.graph, rdf::RdfTerm::iri(i)}};
        auto part = join_sets(eval_pattern(*gp.left, d, rdf::gr(d, i)), {bound});
        out.insert(part.begin(), part.end());
      }
      return out;
    }
    case K::GraphIri:
      return eval_pattern(*gp.left, d, rdf::gr(d, gp.graph.lexical));
  }
  return {};
}

MappingSet eval_query(const syntax::Query& q, const rdf::Dataset& global) {
  rdf::Dataset d = rdf::query_dataset(q, global);
  return project(eval_pattern(*q.pattern, d, rdf::df(d)), q.distinguished_set());
}

std::string to_string(const Mapping& m) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : m) {
    if (!first) out += ", ";
    first = false;
    out += syntax::to_string(k) + " -> " + rdf::to_string(v);
  }
  return out + "}";
}

}  // namespace qcsolve::eval
