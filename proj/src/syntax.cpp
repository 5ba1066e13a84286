#include "qcsolve/syntax.hpp"

#include <algorithm>

namespace qcsolve::syntax {

Term Term::var(std::string name) {
  return Term{TermKind::Variable, std::move(name), std::nullopt};
}
Term Term::blank(std::string label) {
  return Term{TermKind::BlankNode, std::move(label), std::nullopt};
}
Term Term::iri(std::string iri) {
  return Term{TermKind::Iri, std::move(iri), std::nullopt};
}
Term Term::literal(std::string lexical, std::optional<std::string> datatype) {
  return Term{TermKind::Literal, std::move(lexical), std::move(datatype)};
}

std::vector<Term> Query::distinguished() const {
  std::vector<Term> out;
  if (select) {
    for (const auto& v : *select) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
  }
  for (const auto& v : vars_of(*pattern)) {
    if (v.kind == TermKind::Variable) out.push_back(v);
  }
  return out;
}

VarSet Query::distinguished_set() const {
  auto dv = distinguished();
  return VarSet(dv.begin(), dv.end());
}

ExprPtr term_expr(Term t) {
  auto e = std::make_shared<Expression>();
  e->kind = Expression::Kind::Term;
  e->term = std::move(t);
  return e;
}

ExprPtr datatype_expr(ExprPtr arg) {
  auto e = std::make_shared<Expression>();
  e->kind = Expression::Kind::Datatype;
  e->arg = std::move(arg);
  return e;
}

namespace {

CondPtr make_cond(Condition::Kind k, ExprPtr lhs, ExprPtr rhs, CondPtr l,
                  CondPtr r) {
  auto c = std::make_shared<Condition>();
  c->kind = k;
  c->lhs = std::move(lhs);
  c->rhs = std::move(rhs);
  c->left = std::move(l);
  c->right = std::move(r);
  return c;
}

PatternPtr make_pattern(Pattern::Kind k, PatternPtr l, PatternPtr r) {
  auto p = std::make_shared<Pattern>();
  p->kind = k;
  p->left = std::move(l);
  p->right = std::move(r);
  return p;
}

}  // namespace

CondPtr eq(ExprPtr a, ExprPtr b) {
  return make_cond(Condition::Kind::Eq, std::move(a), std::move(b), nullptr,
                   nullptr);
}
CondPtr negate(CondPtr c) {
  return make_cond(Condition::Kind::Not, nullptr, nullptr, std::move(c),
                   nullptr);
}
CondPtr conj(CondPtr a, CondPtr b) {
  return make_cond(Condition::Kind::And, nullptr, nullptr, std::move(a),
                   std::move(b));
}
CondPtr disj(CondPtr a, CondPtr b) {
  return make_cond(Condition::Kind::Or, nullptr, nullptr, std::move(a),
                   std::move(b));
}
CondPtr paren(CondPtr c) {
  return make_cond(Condition::Kind::Paren, nullptr, nullptr, std::move(c),
                   nullptr);
}
CondPtr is_literal(ExprPtr e) {
  return make_cond(Condition::Kind::IsLiteral, std::move(e), nullptr, nullptr,
                   nullptr);
}

PatternPtr triple(Term s, Term p, Term o) {
  auto t = std::make_shared<Pattern>();
  t->kind = Pattern::Kind::Triple;
  t->triple = {std::move(s), std::move(p), std::move(o)};
  return t;
}
PatternPtr join(PatternPtr a, PatternPtr b) {
  return make_pattern(Pattern::Kind::Join, std::move(a), std::move(b));
}
PatternPtr union_of(PatternPtr a, PatternPtr b) {
  return make_pattern(Pattern::Kind::Union, std::move(a), std::move(b));
}
PatternPtr minus(PatternPtr a, PatternPtr b) {
  return make_pattern(Pattern::Kind::Minus, std::move(a), std::move(b));
}
PatternPtr diff(PatternPtr a, PatternPtr b) {
  return make_pattern(Pattern::Kind::Diff, std::move(a), std::move(b));
}
PatternPtr optional(PatternPtr a, PatternPtr b) {
  return make_pattern(Pattern::Kind::Optional, std::move(a), std::move(b));
}
PatternPtr filter(PatternPtr a, CondPtr r) {
  auto p = make_pattern(Pattern::Kind::Filter, std::move(a), nullptr);
  std::const_pointer_cast<Pattern>(p)->cond = std::move(r);
  return p;
}
PatternPtr group(PatternPtr a) {
  return make_pattern(Pattern::Kind::Group, std::move(a), nullptr);
}
PatternPtr subquery(Query q) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::SubQuery;
  p->query = std::make_shared<const Query>(std::move(q));
  return p;
}
PatternPtr graph_var(Term var, PatternPtr a) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::GraphVar;
  p->graph = std::move(var);
  p->left = std::move(a);
  return p;
}
PatternPtr graph_iri(Term iri, PatternPtr a) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::GraphIri;
  p->graph = std::move(iri);
  p->left = std::move(a);
  return p;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->kind == Expression::Kind::Term) return a->term == b->term;
  return equal(a->arg, b->arg);
}

bool equal(const CondPtr& a, const CondPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs) &&
         equal(a->left, b->left) && equal(a->right, b->right);
}

bool equal(const PatternPtr& a, const PatternPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Pattern::Kind::Triple:
      return a->triple == b->triple;
    case Pattern::Kind::Filter:
      return equal(a->left, b->left) && equal(a->cond, b->cond);
    case Pattern::Kind::SubQuery:
      return equal(*a->query, *b->query);
    case Pattern::Kind::GraphVar:
    case Pattern::Kind::GraphIri:
      return a->graph == b->graph && equal(a->left, b->left);
    default:
      return equal(a->left, b->left) && equal(a->right, b->right);
  }
}

bool equal(const Query& a, const Query& b) {
  return a.select == b.select && a.from == b.from &&
         a.from_named == b.from_named && equal(a.pattern, b.pattern);
}

VarSet vars_of(const Term& t) {
  if (t.is_var_like()) return {t};
  return {};
}

VarSet vars_of(const Expression& e) {
  if (e.kind == Expression::Kind::Term) return vars_of(e.term);
  return vars_of(*e.arg);
}

VarSet vars_of(const Condition& c) {
  VarSet out;
  auto add = [&out](const VarSet& s) { out.insert(s.begin(), s.end()); };
  if (c.lhs) add(vars_of(*c.lhs));
  if (c.rhs) add(vars_of(*c.rhs));
  if (c.left) add(vars_of(*c.left));
  if (c.right) add(vars_of(*c.right));
  return out;
}

VarSet vars_of(const Pattern& p) {
  using K = Pattern::Kind;
  switch (p.kind) {
    case K::Triple: {
      VarSet out;
      for (const auto& t : p.triple) {
        if (t.is_var_like()) out.insert(t);
      }
      return out;
    }
    case K::Join:
    case K::Union:
    case K::Optional: {
      auto out = vars_of(*p.left);
      auto r = vars_of(*p.right);
      out.insert(r.begin(), r.end());
      return out;
    }
    case K::Minus:
    case K::Diff:
    case K::Filter:
    case K::Group:
    case K::GraphIri:
      return vars_of(*p.left);
    case K::SubQuery:
      return p.query->distinguished_set();
    case K::GraphVar: {
      auto out = vars_of(*p.left);
      out.insert(p.graph);
      return out;
    }
  }
  return {};
}

VarSet all_vars(const Pattern& p) {
  using K = Pattern::Kind;
  switch (p.kind) {
    case K::Triple:
    case K::SubQuery:
      return vars_of(p);
    case K::Filter: {
      auto out = all_vars(*p.left);
      auto c = vars_of(*p.cond);
      out.insert(c.begin(), c.end());
      return out;
    }
    case K::GraphVar: {
      auto out = all_vars(*p.left);
      out.insert(p.graph);
      return out;
    }
    case K::Group:
    case K::GraphIri:
      return all_vars(*p.left);
    default: {
      auto out = all_vars(*p.left);
      auto r = all_vars(*p.right);
      out.insert(r.begin(), r.end());
      return out;
    }
  }
}

bool contains_kind(const Pattern& p, Pattern::Kind k) {
  if (p.kind == k) return true;
  if (p.left && contains_kind(*p.left, k)) return true;
  if (p.right && contains_kind(*p.right, k)) return true;
  return false;
}

bool is_projection_free(const Query& q) {
  auto dv = q.distinguished_set();
  for (const auto& v : vars_of(*q.pattern)) {
    if (!dv.count(v)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

std::string escape_literal(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string cond_operand(const Condition& c) {
  if (c.kind == Condition::Kind::And || c.kind == Condition::Kind::Or) {
    return "(" + to_string(c) + ")";
  }
  return to_string(c);
}

// A pattern printed so that it folds as a single element of a group body.
std::string atom(const Pattern& p) {
  using K = Pattern::Kind;
  switch (p.kind) {
    case K::Triple:
    case K::Union:
    case K::Group:
    case K::SubQuery:
    case K::GraphVar:
    case K::GraphIri:
      return to_string(p);
    default:
      return "{ " + to_string(p) + " }";
  }
}

}  // namespace

std::string to_string(const Term& t) {
  switch (t.kind) {
    case TermKind::Variable:
      return "?" + t.lexical;
    case TermKind::BlankNode:
      return "_:" + t.lexical;
    case TermKind::Iri:
      return "<" + t.lexical + ">";
    case TermKind::Literal: {
      std::string out = "\"" + escape_literal(t.lexical) + "\"";
      if (t.datatype) out += "^^<" + *t.datatype + ">";
      return out;
    }
  }
  return {};
}

std::string to_string(const Expression& e) {
  if (e.kind == Expression::Kind::Term) return to_string(e.term);
  return "datatype(" + to_string(*e.arg) + ")";
}

std::string to_string(const Condition& c) {
  using K = Condition::Kind;
  switch (c.kind) {
    case K::Eq:
      return to_string(*c.lhs) + " = " + to_string(*c.rhs);
    case K::Not: {
      auto k = c.left->kind;
      if (k == K::And || k == K::Or) return "!(" + to_string(*c.left) + ")";
      return "!" + to_string(*c.left);
    }
    case K::And:
      return cond_operand(*c.left) + " && " + cond_operand(*c.right);
    case K::Or:
      return cond_operand(*c.left) + " || " + cond_operand(*c.right);
    case K::Paren:
      return "(" + to_string(*c.left) + ")";
    case K::IsLiteral:
      return "isliteral(" + to_string(*c.lhs) + ")";
  }
  return {};
}

std::string to_string(const Pattern& p) {
  using K = Pattern::Kind;
  switch (p.kind) {
    case K::Triple:
      return to_string(p.triple[0]) + " " + to_string(p.triple[1]) + " " +
             to_string(p.triple[2]) + " .";
    case K::Join:
      return to_string(*p.left) + " " + atom(*p.right);
    case K::Union:
      return "{ " + to_string(*p.left) + " } union { " + to_string(*p.right) +
             " }";
    case K::Minus:
      return to_string(*p.left) + " minus { " + to_string(*p.right) + " }";
    case K::Diff:
      return to_string(*p.left) + " diff { " + to_string(*p.right) + " }";
    case K::Optional:
      return to_string(*p.left) + " optional { " + to_string(*p.right) + " }";
    case K::Filter:
      return to_string(*p.left) + " filter (" + to_string(*p.cond) + ")";
    case K::Group:
      return "{ " + to_string(*p.left) + " }";
    case K::SubQuery:
      return "{ " + to_string(*p.query) + " }";
    case K::GraphVar:
    case K::GraphIri:
      return "graph " + to_string(p.graph) + " { " + to_string(*p.left) + " }";
  }
  return {};
}

std::string to_string(const Query& q) {
  std::string out = "select";
  if (q.select) {
    for (const auto& v : *q.select) out += " " + to_string(v);
  } else {
    out += " *";
  }
  for (const auto& f : q.from) out += " from <" + f + ">";
  for (const auto& f : q.from_named) out += " from named <" + f + ">";
  out += " { " + to_string(*q.pattern) + " }";
  return out;
}

}  // namespace qcsolve::syntax
