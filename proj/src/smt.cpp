#include <sstream>

#include "qcsolve/backend.hpp"

namespace qcsolve::backend {

using fol::Formula;
using fol::FolTerm;
using FK = Formula::Kind;

namespace {

using Subst = std::map<std::string, std::string>;

std::string bound_symbol(const std::string& var) { return "|" + var + "|"; }

class Printer {
 public:
  Printer(const std::vector<std::string>& consts, std::ostream& out)
      : consts_(consts), out_(out) {}

  void term(const FolTerm& t, const Subst& s) {
    switch (t.kind) {
      case FolTerm::Kind::Var: {
        auto it = s.find(t.var);
        out_ << (it == s.end() ? bound_symbol(t.var) : it->second);
        return;
      }
      case FolTerm::Kind::Const:
        out_ << consts_.at(t.constant);
        return;
      case FolTerm::Kind::Datatype:
        out_ << "(datatype ";
        term(*t.arg, s);
        out_ << ")";
        return;
    }
  }

  void formula(const Formula& f, const Subst& s) {
    switch (f.kind) {
      case FK::Atom: {
        static const char* names[] = {"betaD", "betaN", "isLiteral", "="};
        out_ << "(" << names[static_cast<int>(f.pred)];
        for (const auto& a : f.args) {
          out_ << " ";
          term(*a, s);
        }
        out_ << ")";
        return;
      }
      case FK::Not:
        nary("not", f, s);
        return;
      case FK::And:
        nary("and", f, s);
        return;
      case FK::Or:
        nary("or", f, s);
        return;
      case FK::Implies:
        nary("=>", f, s);
        return;
      case FK::Exists:
      case FK::Forall: {
        Subst inner = s;
        out_ << (f.kind == FK::Exists ? "(exists (" : "(forall (");
        for (size_t i = 0; i < f.vars.size(); ++i) {
          inner.erase(f.vars[i]);
          out_ << (i ? " " : "") << "(" << bound_symbol(f.vars[i]) << " U)";
        }
        out_ << ") ";
        formula(*f.children.front(), inner);
        out_ << ")";
        return;
      }
      case FK::Bottom:
        out_ << "false";
        return;
      case FK::Top:
        out_ << "true";
        return;
    }
  }

 private:
  void nary(const char* op, const Formula& f, const Subst& s) {
    out_ << "(" << op;
    for (const auto& c : f.children) {
      out_ << " ";
      formula(*c, s);
    }
    out_ << ")";
  }

  const std::vector<std::string>& consts_;
  std::ostream& out_;
};

std::string comment_safe(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

SmtScript emit_smtlib(const Formula& f, fol::Signature& sig) {
  if (sig.uses_datatype()) {
    for (size_t c = 1; c < sig.size(); ++c) {
      if (sig.value(static_cast<int>(c)).is_literal()) sig.intern(rdf::dt(sig.value(static_cast<int>(c))));
    }
  }

  SmtScript script;
  std::ostringstream out;
  out << "(set-option :produce-models true)\n(declare-sort U 0)\n";
  for (size_t c = 0; c < sig.size(); ++c) {
    script.constants.push_back("c" + std::to_string(c));
    out << "(declare-fun c" << c << " () U) ; "
        << (c == 0 ? std::string("err") : comment_safe(rdf::to_string(sig.value(static_cast<int>(c)))))
        << "\n";
  }
  if (sig.size() > 1) {
    out << "(assert (distinct";
    for (const auto& c : script.constants) out << " " << c;
    out << "))\n";
  }
  const std::string& err = script.constants[0];
  out << "(declare-fun betaD (U U U) Bool)\n"
      << "(declare-fun betaN (U U U U) Bool)\n"
      << "(declare-fun isLiteral (U) Bool)\n";
  // Stored triples never mention err, and subjects, predicates and graph
  // names are never literals.
  out << "(assert (forall ((s U) (p U) (o U)) (=> (betaD s p o) (and (not (= s " << err
      << ")) (not (= p " << err << ")) (not (= o " << err
      << ")) (not (isLiteral s)) (not (isLiteral p))))))\n";
  out << "(assert (forall ((s U) (p U) (o U) (g U)) (=> (betaN s p o g) (and (not (= s "
      << err << ")) (not (= p " << err << ")) (not (= o " << err << ")) (not (= g " << err
      << ")) (not (isLiteral s)) (not (isLiteral p)) (not (isLiteral g))))))\n";
  for (size_t c = 0; c < sig.size(); ++c) {
    bool lit = sig.value(static_cast<int>(c)).is_literal();
    out << "(assert " << (lit ? "" : "(not ") << "(isLiteral c" << c << ")"
        << (lit ? "" : ")") << ")\n";
  }
  if (sig.uses_datatype()) {
    out << "(declare-fun datatype (U) U)\n";
    out << "(assert (forall ((x U)) (ite (isLiteral x) (and (not (= (datatype x) " << err
        << ")) (not (isLiteral (datatype x)))) (= (datatype x) " << err << "))))\n";
    for (size_t c = 1; c < sig.size(); ++c) {
      const auto& v = sig.value(static_cast<int>(c));
      if (!v.is_literal()) continue;
      auto d = sig.find(rdf::dt(v));
      out << "(assert (= (datatype c" << c << ") c" << *d << "))\n";
    }
  }

  // Skolemize the outermost block of the negated formula.
  const Formula* body = &f;
  bool negate_body = true;
  std::vector<std::string> skolem_vars;
  if (f.kind == FK::Forall) {
    skolem_vars = f.vars;
    body = f.children.front().get();
  } else if (f.kind == FK::Not) {
    negate_body = false;
    body = f.children.front().get();
    if (body->kind == FK::Exists) {
      skolem_vars = body->vars;
      body = body->children.front().get();
    }
  }
  Subst subst;
  for (const auto& v : skolem_vars) {
    if (subst.count(v)) continue;
    std::string name = "sk" + std::to_string(subst.size());
    subst[v] = name;
    script.skolems[v] = name;
    out << "(declare-fun " << name << " () U) ; " << comment_safe(v) << "\n";
  }
  out << "(assert ";
  if (negate_body) out << "(not ";
  Printer(script.constants, out).formula(*body, subst);
  if (negate_body) out << ")";
  out << ")\n(check-sat)\n(get-model)\n";
  script.text = out.str();
  return script;
}

}  // namespace qcsolve::backend
