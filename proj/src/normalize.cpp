#include "qcsolve/normalize.hpp"

#include <map>

#include "qcsolve/error.hpp"

namespace qcsolve::normalize {

using syntax::CondPtr;
using syntax::Condition;
using syntax::ExprPtr;
using syntax::Expression;
using syntax::Pattern;
using syntax::PatternPtr;
using syntax::Query;
using syntax::Term;
using syntax::VarSet;
using K = Pattern::Kind;

syntax::Term FreshNamer::fresh() {
  return Term::var(std::string(syntax::kReservedPrefix) + std::to_string(next_++));
}

namespace {

VarSet unite(VarSet a, const VarSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

bool intersects(const VarSet& a, const VarSet& b) {
  for (const auto& v : a) {
    if (b.count(v)) return true;
  }
  return false;
}

// `outer` holds the variables occurring outside p, not counting sibling
// union branches (those never share solutions with p).
bool well_designed(const Pattern& p, const VarSet& outer) {
  switch (p.kind) {
    case K::Triple:
      return true;
    case K::Union:
      return well_designed(*p.left, outer) && well_designed(*p.right, outer);
    case K::Optional:
    case K::Minus:
    case K::Diff: {
      auto l = syntax::all_vars(*p.left);
      auto r = syntax::all_vars(*p.right);
      VarSet local;
      for (const auto& v : r) {
        if (!l.count(v)) local.insert(v);
      }
      if (intersects(local, outer)) return false;
      return well_designed(*p.left, unite(outer, r)) &&
             well_designed(*p.right, unite(outer, l));
    }
    case K::Join:
      return well_designed(*p.left, unite(outer, syntax::all_vars(*p.right))) &&
             well_designed(*p.right, unite(outer, syntax::all_vars(*p.left)));
    case K::Filter:
      return well_designed(*p.left, unite(outer, syntax::vars_of(*p.cond)));
    case K::Group:
    case K::GraphIri:
      return well_designed(*p.left, outer);
    case K::GraphVar:
      return well_designed(*p.left, unite(outer, {p.graph}));
    case K::SubQuery: {
      VarSet visible;
      for (const auto& v : p.query->distinguished()) {
        if (outer.count(v)) visible.insert(v);
      }
      return well_designed(*p.query->pattern, visible);
    }
  }
  return true;
}

PatternPtr rebuild(const Pattern& p, PatternPtr l, PatternPtr r) {
  auto out = std::make_shared<Pattern>(p);
  out->left = std::move(l);
  out->right = std::move(r);
  return out;
}

PatternPtr drop_optional(const PatternPtr& p) {
  switch (p->kind) {
    case K::Triple:
      return p;
    case K::SubQuery: {
      Query q = *p->query;
      q.pattern = drop_optional(q.pattern);
      return syntax::subquery(std::move(q));
    }
    case K::Optional: {
      auto l = drop_optional(p->left);
      auto r = drop_optional(p->right);
      return syntax::union_of(syntax::join(l, r), syntax::diff(l, r));
    }
    default:
      return rebuild(*p, drop_optional(p->left),
                     p->right ? drop_optional(p->right) : nullptr);
  }
}

ExprPtr unbound_expr() {
  return syntax::datatype_expr(
      syntax::term_expr(Term::iri(std::string(kUnboundIri))));
}

ExprPtr bind_expr(const ExprPtr& e, const VarSet& bound) {
  if (e->kind == Expression::Kind::Datatype) {
    auto arg = bind_expr(e->arg, bound);
    return arg == e->arg ? e : syntax::datatype_expr(arg);
  }
  if (e->term.is_var_like() && !bound.count(e->term)) return unbound_expr();
  return e;
}

CondPtr bind_cond(const CondPtr& c, const VarSet& bound) {
  auto out = std::make_shared<Condition>(*c);
  if (c->lhs) out->lhs = bind_expr(c->lhs, bound);
  if (c->rhs) out->rhs = bind_expr(c->rhs, bound);
  if (c->left) out->left = bind_cond(c->left, bound);
  if (c->right) out->right = bind_cond(c->right, bound);
  return out;
}

using Branches = std::vector<PatternPtr>;

void check_cap(const Branches& b, size_t cap) {
  if (b.size() > cap) {
    throw BlowupLimitExceeded("union normal form exceeds " + std::to_string(cap) +
                              " branches");
  }
}

Branches snf(const PatternPtr& p, size_t cap) {
  Branches out;
  switch (p->kind) {
    case K::Triple:
    case K::SubQuery:
      return {p};
    case K::Optional:
      throw UnsupportedShape("optional must be eliminated before union expansion");
    case K::Union: {
      out = snf(p->left, cap);
      auto r = snf(p->right, cap);
      out.insert(out.end(), r.begin(), r.end());
      break;
    }
    case K::Join: {
      auto l = snf(p->left, cap);
      auto r = snf(p->right, cap);
      if (l.size() * r.size() > cap) {
        throw BlowupLimitExceeded("union normal form exceeds " +
                                  std::to_string(cap) + " branches");
      }
      for (const auto& a : l) {
        for (const auto& b : r) out.push_back(syntax::join(a, b));
      }
      break;
    }
    case K::Minus:
    case K::Diff: {
      auto r = snf(p->right, cap);
      for (const auto& a : snf(p->left, cap)) {
        PatternPtr acc = a;
        for (const auto& b : r) {
          acc = p->kind == K::Minus ? syntax::minus(acc, b) : syntax::diff(acc, b);
        }
        out.push_back(acc);
      }
      break;
    }
    case K::Filter:
      for (const auto& a : snf(p->left, cap)) {
        out.push_back(syntax::filter(a, bind_cond(p->cond, syntax::vars_of(*a))));
      }
      break;
    case K::Group:
      for (const auto& a : snf(p->left, cap)) out.push_back(syntax::group(a));
      break;
    case K::GraphVar:
      for (const auto& a : snf(p->left, cap)) out.push_back(syntax::graph_var(p->graph, a));
      break;
    case K::GraphIri:
      for (const auto& a : snf(p->left, cap)) out.push_back(syntax::graph_iri(p->graph, a));
      break;
  }
  check_cap(out, cap);
  return out;
}

void reject_enclosed_subquery(const Pattern& p) {
  if (syntax::contains_kind(p, K::SubQuery)) {
    throw UnsupportedShape(
        "subqueries under graph, minus or diff cannot be eliminated");
  }
}

PatternPtr fnf(const PatternPtr& p) {
  switch (p->kind) {
    case K::Triple:
      return p;
    case K::SubQuery: {
      Query q = *p->query;
      q.pattern = fnf(q.pattern);
      return syntax::subquery(std::move(q));
    }
    case K::Group:
      return fnf(p->left);
    case K::Join: {
      auto l = fnf(p->left);
      auto r = fnf(p->right);
      CondPtr rl, rr;
      if (l->kind == K::Filter) {
        rl = l->cond;
        l = l->left;
      }
      if (r->kind == K::Filter) {
        rr = r->cond;
        r = r->left;
      }
      auto core = syntax::join(l, r);
      if (rl && rr) return syntax::filter(core, syntax::conj(rl, rr));
      if (rl || rr) return syntax::filter(core, rl ? rl : rr);
      return core;
    }
    case K::Filter: {
      auto l = fnf(p->left);
      if (l->kind == K::Filter) {
        return syntax::filter(l->left, syntax::conj(p->cond, l->cond));
      }
      return syntax::filter(l, p->cond);
    }
    case K::Minus:
    case K::Diff:
      reject_enclosed_subquery(*p->left);
      reject_enclosed_subquery(*p->right);
      return rebuild(*p, fnf(p->left), fnf(p->right));
    case K::GraphVar:
    case K::GraphIri:
      reject_enclosed_subquery(*p->left);
      return rebuild(*p, fnf(p->left), nullptr);
    case K::Union:
    case K::Optional:
      throw UnsupportedShape("filter normal form needs a union-free, optional-free pattern");
  }
  return p;
}

using Renaming = std::map<Term, Term>;

Term rename_term(const Term& t, const Renaming& r) {
  auto it = r.find(t);
  return it == r.end() ? t : it->second;
}

ExprPtr rename_expr(const ExprPtr& e, const Renaming& r) {
  if (e->kind == Expression::Kind::Datatype)
    return syntax::datatype_expr(rename_expr(e->arg, r));
  return syntax::term_expr(rename_term(e->term, r));
}

CondPtr rename_cond(const CondPtr& c, const Renaming& r) {
  auto out = std::make_shared<Condition>(*c);
  if (c->lhs) out->lhs = rename_expr(c->lhs, r);
  if (c->rhs) out->rhs = rename_expr(c->rhs, r);
  if (c->left) out->left = rename_cond(c->left, r);
  if (c->right) out->right = rename_cond(c->right, r);
  return out;
}

Query rename_visible(const Query& q, const Renaming& r);

PatternPtr rename_pattern(const PatternPtr& p, const Renaming& r) {
  switch (p->kind) {
    case K::Triple:
      return syntax::triple(rename_term(p->triple[0], r), rename_term(p->triple[1], r),
                            rename_term(p->triple[2], r));
    case K::Filter:
      return syntax::filter(rename_pattern(p->left, r), rename_cond(p->cond, r));
    case K::SubQuery:
      return syntax::subquery(rename_visible(*p->query, r));
    case K::GraphVar:
      return syntax::graph_var(rename_term(p->graph, r), rename_pattern(p->left, r));
    default:
      return rebuild(*p, rename_pattern(p->left, r),
                     p->right ? rename_pattern(p->right, r) : nullptr);
  }
}

// Renames a subquery as seen from outside: only its distinguished variables
// are visible, everything else is scoped to the subquery.
Query rename_visible(const Query& q, const Renaming& r) {
  Renaming visible;
  for (const auto& v : q.distinguished()) {
    auto it = r.find(v);
    if (it != r.end()) visible.insert(*it);
  }
  Query out = q;
  if (visible.empty()) return out;
  if (out.select) {
    for (auto& v : *out.select) v = rename_term(v, visible);
  }
  out.pattern = rename_pattern(q.pattern, visible);
  return out;
}

PatternPtr drop_subqueries(const PatternPtr& p, bool enclosed, FreshNamer& namer) {
  switch (p->kind) {
    case K::Triple:
      return p;
    case K::SubQuery: {
      if (enclosed) {
        throw UnsupportedShape(
            "subqueries under graph, minus or diff cannot be eliminated");
      }
      Query inner = eliminate_subqueries(*p->query, namer);
      return syntax::group(rename_nondistinguished(inner, namer).pattern);
    }
    case K::Minus:
    case K::Diff:
    case K::GraphVar:
    case K::GraphIri:
      enclosed = true;
      [[fallthrough]];
    default:
      return rebuild(*p, drop_subqueries(p->left, enclosed, namer),
                     p->right ? drop_subqueries(p->right, enclosed, namer) : nullptr);
  }
}

}  // namespace

bool is_well_designed(const Pattern& gp) { return well_designed(gp, {}); }

PatternPtr eliminate_optional(const PatternPtr& gp) {
  if (!is_well_designed(*gp)) {
    throw NotWellDesigned("pattern is not well-designed: " + syntax::to_string(*gp));
  }
  return drop_optional(gp);
}

std::vector<PatternPtr> to_simple_normal_form(const PatternPtr& gp, size_t cap) {
  return snf(gp, cap);
}

PatternPtr to_filter_normal_form(const PatternPtr& gp) { return fnf(gp); }

Query rename_nondistinguished(const Query& q, FreshNamer& namer) {
  auto dv = q.distinguished_set();
  Renaming r;
  for (const auto& v : syntax::all_vars(*q.pattern)) {
    if (!dv.count(v)) r.emplace(v, namer.fresh());
  }
  if (r.empty()) return q;
  Query out = q;
  out.select = q.distinguished();
  out.pattern = rename_pattern(q.pattern, r);
  return out;
}

Query eliminate_subqueries(const Query& q, FreshNamer& namer) {
  if (!syntax::contains_kind(*q.pattern, K::SubQuery)) return q;
  Query out = q;
  out.select = q.distinguished();
  out.pattern = drop_subqueries(q.pattern, false, namer);
  return out;
}

bool NormalizedQuery::projection_free() const {
  auto dvs = dv_set();
  for (const auto& b : branches) {
    for (const auto& v : syntax::vars_of(*b)) {
      if (!dvs.count(v)) return false;
    }
  }
  return true;
}

Query NormalizedQuery::to_query() const {
  Query q;
  q.select = dv;
  q.from = from;
  q.from_named = from_named;
  for (const auto& b : branches) q.pattern = q.pattern ? syntax::union_of(q.pattern, b) : b;
  return q;
}

NormalizedQuery normalize_query(const Query& q, FreshNamer& namer, size_t cap) {
  NormalizedQuery out;
  out.dv = q.distinguished();
  out.from = q.from;
  out.from_named = q.from_named;
  Query flat = eliminate_subqueries(q, namer);
  auto opt_free = eliminate_optional(flat.pattern);
  for (const auto& b : to_simple_normal_form(opt_free, cap)) {
    out.branches.push_back(to_filter_normal_form(b));
  }
  return out;
}

}  // namespace qcsolve::normalize
