#include "qcsolve/fol.hpp"

#include <algorithm>
#include <functional>

#include "qcsolve/error.hpp"

namespace qcsolve::fol {

using syntax::Pattern;
using K = Pattern::Kind;
using FK = Formula::Kind;

Signature::Signature() {
  values_.push_back(rdf::RdfTerm::err());
  index_.emplace(rdf::RdfTerm::err(), 0);
}

int Signature::intern(const rdf::RdfTerm& t) {
  auto [it, inserted] = index_.emplace(t, static_cast<int>(values_.size()));
  if (inserted) values_.push_back(t);
  return it->second;
}

std::optional<int> Signature::find(const rdf::RdfTerm& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TermPtr var_term(std::string name) {
  auto t = std::make_shared<FolTerm>();
  t->kind = FolTerm::Kind::Var;
  t->var = std::move(name);
  return t;
}

TermPtr const_term(int c) {
  auto t = std::make_shared<FolTerm>();
  t->kind = FolTerm::Kind::Const;
  t->constant = c;
  return t;
}

TermPtr datatype_term(TermPtr arg) {
  auto t = std::make_shared<FolTerm>();
  t->kind = FolTerm::Kind::Datatype;
  t->arg = std::move(arg);
  return t;
}

namespace {

FormulaPtr make(FK k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

FormulaPtr nary(FK k, std::vector<FormulaPtr> fs) {
  std::vector<FormulaPtr> flat;
  for (auto& f : fs) {
    if (f->kind == k) {
      flat.insert(flat.end(), f->children.begin(), f->children.end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty()) return make(k == FK::And ? FK::Top : FK::Bottom);
  if (flat.size() == 1) return flat.front();
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->children = std::move(flat);
  return f;
}

FormulaPtr quantifier(FK k, std::vector<std::string> vars, FormulaPtr body) {
  if (vars.empty()) return body;
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->vars = std::move(vars);
  f->children = {std::move(body)};
  return f;
}

}  // namespace

FormulaPtr atom(Pred p, std::vector<TermPtr> args) {
  auto f = std::make_shared<Formula>();
  f->kind = FK::Atom;
  f->pred = p;
  f->args = std::move(args);
  return f;
}

FormulaPtr negation(FormulaPtr g) {
  auto f = make(FK::Not);
  std::const_pointer_cast<Formula>(f)->children = {std::move(g)};
  return f;
}

FormulaPtr conjunction(std::vector<FormulaPtr> fs) { return nary(FK::And, std::move(fs)); }
FormulaPtr disjunction(std::vector<FormulaPtr> fs) { return nary(FK::Or, std::move(fs)); }

FormulaPtr implies(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = FK::Implies;
  f->children = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr exists(std::vector<std::string> vars, FormulaPtr body) {
  return quantifier(FK::Exists, std::move(vars), std::move(body));
}
FormulaPtr forall(std::vector<std::string> vars, FormulaPtr body) {
  return quantifier(FK::Forall, std::move(vars), std::move(body));
}
FormulaPtr bottom() { return make(FK::Bottom); }
FormulaPtr top() { return make(FK::Top); }

VarNames free_vars(const FolTerm& t) {
  switch (t.kind) {
    case FolTerm::Kind::Var:
      return {t.var};
    case FolTerm::Kind::Const:
      return {};
    case FolTerm::Kind::Datatype:
      return free_vars(*t.arg);
  }
  return {};
}

VarNames free_vars(const Formula& f) {
  VarNames out;
  if (f.kind == FK::Atom) {
    for (const auto& a : f.args) {
      auto v = free_vars(*a);
      out.insert(v.begin(), v.end());
    }
    return out;
  }
  for (const auto& c : f.children) {
    auto v = free_vars(*c);
    out.insert(v.begin(), v.end());
  }
  if (f.kind == FK::Exists || f.kind == FK::Forall) {
    for (const auto& v : f.vars) out.erase(v);
  }
  return out;
}

std::string var_name(const syntax::Term& t) {
  return t.kind == syntax::TermKind::BlankNode ? "_:" + t.lexical : "?" + t.lexical;
}

VarNames var_names(const syntax::VarSet& vs) {
  VarNames out;
  for (const auto& v : vs) out.insert(var_name(v));
  return out;
}

QueryContext query_context(const std::vector<std::string>& from,
                           const std::vector<std::string>& from_named, Signature& sig) {
  QueryContext qc;
  qc.explicit_dataset = !from.empty() || !from_named.empty();
  for (const auto& i : from_named) {
    int c = sig.intern(rdf::RdfTerm::iri(i));
    if (std::find(qc.named.begin(), qc.named.end(), c) == qc.named.end())
      qc.named.push_back(c);
  }
  return qc;
}

ActiveGraphCtx cx_default(const std::vector<std::string>& from,
                          const std::vector<std::string>& from_named, Signature& sig) {
  ActiveGraphCtx ctx;
  if (from.empty() && from_named.empty()) {
    ctx.kind = ActiveGraphCtx::Kind::DefaultOfGlobal;
  } else if (!from.empty()) {
    ctx.kind = ActiveGraphCtx::Kind::MergedFrom;
    for (const auto& i : from) {
      int c = sig.intern(rdf::RdfTerm::iri(i));
      if (std::find(ctx.graphs.begin(), ctx.graphs.end(), c) == ctx.graphs.end())
        ctx.graphs.push_back(c);
    }
  } else {
    ctx.kind = ActiveGraphCtx::Kind::EmptyDefault;
  }
  return ctx;
}

TermPtr sigma_term(const syntax::Term& t, Signature& sig) {
  if (t.is_var_like()) return var_term(var_name(t));
  return const_term(sig.intern(rdf::from_syntax(t)));
}

TermPtr sigma_expr(const syntax::Expression& e, const syntax::VarSet& bound,
                   Signature& sig) {
  if (e.kind == syntax::Expression::Kind::Datatype) {
    sig.mark_datatype_used();
    return datatype_term(sigma_expr(*e.arg, bound, sig));
  }
  if (e.term.is_var_like() && !bound.count(e.term)) return const_term(Signature::err());
  return sigma_term(e.term, sig);
}

namespace {

// Terms that may denote err: function applications and err itself.
bool may_be_err(const FolTerm& t) {
  return t.kind == FolTerm::Kind::Datatype ||
         (t.kind == FolTerm::Kind::Const && t.constant == Signature::err());
}

}  // namespace

FormulaPtr sigma_cond(const syntax::Condition& r, const syntax::VarSet& bound,
                      Signature& sig) {
  using CK = syntax::Condition::Kind;
  switch (r.kind) {
    case CK::Eq: {
      auto a = sigma_expr(*r.lhs, bound, sig);
      auto b = sigma_expr(*r.rhs, bound, sig);
      auto e = atom(Pred::Eq, {a, b});
      // Both sides must differ from err; since they are equal, guarding one
      // side that can denote err is enough.
      const TermPtr& g = may_be_err(*a) ? a : b;
      if (!may_be_err(*g)) return e;
      return conjunction({e, negation(atom(Pred::Eq, {g, const_term(Signature::err())}))});
    }
    case CK::Not:
      return negation(sigma_cond(*r.left, bound, sig));
    case CK::And:
      return conjunction({sigma_cond(*r.left, bound, sig), sigma_cond(*r.right, bound, sig)});
    case CK::Or:
      return disjunction({sigma_cond(*r.left, bound, sig), sigma_cond(*r.right, bound, sig)});
    case CK::Paren:
      return sigma_cond(*r.left, bound, sig);
    case CK::IsLiteral:
      return atom(Pred::IsLiteral, {sigma_expr(*r.lhs, bound, sig)});
  }
  return bottom();
}

namespace {

std::vector<std::string> minus_vars(const VarNames& a, const VarNames& b) {
  std::vector<std::string> out;
  for (const auto& v : a) {
    if (!b.count(v)) out.push_back(v);
  }
  return out;
}

FormulaPtr negated_part(const FormulaPtr& s1, const FormulaPtr& s2) {
  auto xs = minus_vars(free_vars(*s2), free_vars(*s1));
  return conjunction({s1, forall(xs, negation(s2))});
}

void require_dataset(const QueryContext& qc) {
  if (!qc.explicit_dataset) {
    throw UnsupportedShape(
        "graph patterns need from or from named clauses to fix the named graphs");
  }
}

}  // namespace

FormulaPtr sigma_pattern(const Pattern& gp, const ActiveGraphCtx& ctx,
                         const QueryContext& qc, Signature& sig) {
  switch (gp.kind) {
    case K::Triple: {
      std::vector<TermPtr> args = {sigma_term(gp.triple[0], sig), sigma_term(gp.triple[1], sig),
                                   sigma_term(gp.triple[2], sig)};
      switch (ctx.kind) {
        case ActiveGraphCtx::Kind::DefaultOfGlobal:
          return atom(Pred::BetaD, args);
        case ActiveGraphCtx::Kind::EmptyDefault:
          return bottom();
        case ActiveGraphCtx::Kind::MergedFrom:
        case ActiveGraphCtx::Kind::Named: {
          std::vector<FormulaPtr> alts;
          for (int g : ctx.graphs) {
            auto a = args;
            a.push_back(const_term(g));
            alts.push_back(atom(Pred::BetaN, a));
          }
          return disjunction(alts);
        }
      }
      return bottom();
    }
    case K::Join:
      return conjunction({sigma_pattern(*gp.left, ctx, qc, sig),
                          sigma_pattern(*gp.right, ctx, qc, sig)});
    case K::Filter:
      return conjunction({sigma_pattern(*gp.left, ctx, qc, sig),
                          sigma_cond(*gp.cond, syntax::vars_of(*gp.left), sig)});
    case K::Group:
      return sigma_pattern(*gp.left, ctx, qc, sig);
    case K::Minus: {
      auto s1 = sigma_pattern(*gp.left, ctx, qc, sig);
      auto l = syntax::vars_of(*gp.left);
      bool disjoint = true;
      for (const auto& v : syntax::vars_of(*gp.right)) {
        if (l.count(v)) disjoint = false;
      }
      if (disjoint) return s1;
      return negated_part(s1, sigma_pattern(*gp.right, ctx, qc, sig));
    }
    case K::Diff:
      return negated_part(sigma_pattern(*gp.left, ctx, qc, sig),
                          sigma_pattern(*gp.right, ctx, qc, sig));
    case K::GraphVar: {
      require_dataset(qc);
      std::vector<FormulaPtr> alts;
      auto x = sigma_term(gp.graph, sig);
      for (int i : qc.named) {
        ActiveGraphCtx named{ActiveGraphCtx::Kind::Named, {i}};
        alts.push_back(conjunction(
            {sigma_pattern(*gp.left, named, qc, sig), atom(Pred::Eq, {x, const_term(i)})}));
      }
      return disjunction(alts);
    }
    case K::GraphIri: {
      require_dataset(qc);
      int i = sig.intern(rdf::RdfTerm::iri(gp.graph.lexical));
      if (std::find(qc.named.begin(), qc.named.end(), i) == qc.named.end()) return bottom();
      ActiveGraphCtx named{ActiveGraphCtx::Kind::Named, {i}};
      return sigma_pattern(*gp.left, named, qc, sig);
    }
    case K::Union:
    case K::Optional:
    case K::SubQuery:
      throw UnsupportedShape("only conjunctive patterns translate to formulas");
  }
  return bottom();
}

VarNames relevant_vars(const Pattern& branch, const syntax::VarSet& dv) {
  VarNames out;
  for (const auto& v : syntax::vars_of(branch)) {
    if (dv.count(v)) out.insert(var_name(v));
  }
  return out;
}

FormulaPtr phi(const FormulaPtr& sigma, const VarNames& v) {
  return exists(minus_vars(free_vars(*sigma), v), sigma);
}

FormulaPtr theta(const FormulaPtr& phi1, const VarNames& rv1) {
  std::vector<std::string> vars(rv1.begin(), rv1.end());
  FormulaPtr body = phi1;
  if (phi1->kind == FK::Exists) {
    vars.insert(vars.end(), phi1->vars.begin(), phi1->vars.end());
    body = phi1->children.front();
  }
  return negation(exists(vars, body));
}

FormulaPtr psi(const FormulaPtr& phi1, const VarNames& rv1,
               const std::vector<FormulaPtr>& phi2) {
  return forall({rv1.begin(), rv1.end()}, implies(phi1, disjunction(phi2)));
}

bool tilde(const VarNames& rv1, const VarNames& rv2, Mode mode) {
  if (mode == Mode::Containment) return rv1 == rv2;
  return std::includes(rv2.begin(), rv2.end(), rv1.begin(), rv1.end());
}

ConjunctiveForm conjunctive_form(const syntax::PatternPtr& branch,
                                 const std::vector<syntax::Term>& dv,
                                 const std::vector<std::string>& from,
                                 const std::vector<std::string>& from_named,
                                 Signature& sig) {
  ConjunctiveForm out;
  auto qc = query_context(from, from_named, sig);
  auto ctx = cx_default(from, from_named, sig);
  out.sigma = sigma_pattern(*branch, ctx, qc, sig);
  out.rv = relevant_vars(*branch, syntax::VarSet(dv.begin(), dv.end()));
  out.phi = phi(out.sigma, out.rv);
  return out;
}

ConjunctiveForm conjunctive_form(const syntax::Query& q, Signature& sig) {
  return conjunctive_form(q.pattern, q.distinguished(), q.from, q.from_named, sig);
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace {

FormulaPtr flatten_quantifiers(const FormulaPtr& f) {
  if (f->kind == FK::Atom || f->kind == FK::Bottom || f->kind == FK::Top) return f;
  std::vector<FormulaPtr> kids;
  for (const auto& c : f->children) kids.push_back(flatten_quantifiers(c));
  if ((f->kind == FK::Exists || f->kind == FK::Forall) && kids.front()->kind == f->kind) {
    auto vars = f->vars;
    vars.insert(vars.end(), kids.front()->vars.begin(), kids.front()->vars.end());
    return quantifier(f->kind, vars, kids.front()->children.front());
  }
  auto out = std::make_shared<Formula>(*f);
  out->children = std::move(kids);
  return out;
}

struct Bijection {
  std::map<std::string, std::string> fwd, bwd;

  bool link(const std::string& a, const std::string& b) {
    auto f = fwd.find(a);
    auto r = bwd.find(b);
    if (f != fwd.end() || r != bwd.end()) {
      return f != fwd.end() && r != bwd.end() && f->second == b && r->second == a;
    }
    fwd[a] = b;
    bwd[b] = a;
    return true;
  }
};

bool term_equiv(const FolTerm& a, const FolTerm& b, Bijection& m) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FolTerm::Kind::Var:
      return m.link(a.var, b.var);
    case FolTerm::Kind::Const:
      return a.constant == b.constant;
    case FolTerm::Kind::Datatype:
      return term_equiv(*a.arg, *b.arg, m);
  }
  return false;
}

bool equiv(const Formula& a, const Formula& b, Bijection& m);

bool match_children(const std::vector<FormulaPtr>& as, const std::vector<FormulaPtr>& bs,
                    std::vector<bool>& used, size_t i, Bijection& m) {
  if (i == as.size()) {
    return true;
  }
  for (size_t j = 0; j < bs.size(); ++j) {
    if (used[j]) continue;
    Bijection trial = m;
    if (!equiv(*as[i], *bs[j], trial)) continue;
    used[j] = true;
    if (match_children(as, bs, used, i + 1, trial)) {
      m = trial;
      return true;
    }
    used[j] = false;
  }
  return false;
}

bool equiv(const Formula& a, const Formula& b, Bijection& m) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FK::Bottom:
    case FK::Top:
      return true;
    case FK::Atom: {
      if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
      if (a.pred == Pred::Eq) {
        Bijection trial = m;
        if (term_equiv(*a.args[0], *b.args[0], trial) &&
            term_equiv(*a.args[1], *b.args[1], trial)) {
          m = trial;
          return true;
        }
        return term_equiv(*a.args[0], *b.args[1], m) && term_equiv(*a.args[1], *b.args[0], m);
      }
      for (size_t i = 0; i < a.args.size(); ++i) {
        if (!term_equiv(*a.args[i], *b.args[i], m)) return false;
      }
      return true;
    }
    case FK::And:
    case FK::Or: {
      if (a.children.size() != b.children.size()) return false;
      std::vector<bool> used(b.children.size(), false);
      return match_children(a.children, b.children, used, 0, m);
    }
    case FK::Exists:
    case FK::Forall: {
      if (std::set<std::string>(a.vars.begin(), a.vars.end()).size() !=
          std::set<std::string>(b.vars.begin(), b.vars.end()).size())
        return false;
      if (!equiv(*a.children.front(), *b.children.front(), m)) return false;
      // Bound variables must correspond to bound variables.
      std::set<std::string> bvars(b.vars.begin(), b.vars.end());
      for (const auto& v : a.vars) {
        auto it = m.fwd.find(v);
        if (it != m.fwd.end() && !bvars.count(it->second)) return false;
      }
      return true;
    }
    case FK::Not:
    case FK::Implies:
      for (size_t i = 0; i < a.children.size(); ++i) {
        if (!equiv(*a.children[i], *b.children[i], m)) return false;
      }
      return true;
  }
  return false;
}

}  // namespace

bool alpha_equivalent(const Formula& a, const Formula& b) {
  Bijection m;
  auto fa = flatten_quantifiers(std::make_shared<Formula>(a));
  auto fb = flatten_quantifiers(std::make_shared<Formula>(b));
  return equiv(*fa, *fb, m);
}

// ---------------------------------------------------------------------------
// Printer

std::string to_string(const FolTerm& t, const Signature& sig) {
  switch (t.kind) {
    case FolTerm::Kind::Var:
      return t.var;
    case FolTerm::Kind::Const:
      return t.constant == Signature::err() ? "err" : rdf::to_string(sig.value(t.constant));
    case FolTerm::Kind::Datatype:
      return "(datatype " + to_string(*t.arg, sig) + ")";
  }
  return {};
}

std::string to_string(const Formula& f, const Signature& sig) {
  auto join_children = [&](const char* op) {
    std::string out = std::string("(") + op;
    for (const auto& c : f.children) out += " " + to_string(*c, sig);
    return out + ")";
  };
  switch (f.kind) {
    case FK::Atom: {
      static const char* names[] = {"betaD", "betaN", "isLiteral", "="};
      std::string out = std::string("(") + names[static_cast<int>(f.pred)];
      for (const auto& a : f.args) out += " " + to_string(*a, sig);
      return out + ")";
    }
    case FK::Not:
      return join_children("not");
    case FK::And:
      return join_children("and");
    case FK::Or:
      return join_children("or");
    case FK::Implies:
      return join_children("=>");
    case FK::Exists:
    case FK::Forall: {
      std::string out = f.kind == FK::Exists ? "(exists (" : "(forall (";
      for (size_t i = 0; i < f.vars.size(); ++i) out += (i ? " " : "") + f.vars[i];
      return out + ") " + to_string(*f.children.front(), sig) + ")";
    }
    case FK::Bottom:
      return "false";
    case FK::Top:
      return "true";
  }
  return {};
}

}  // namespace qcsolve::fol
