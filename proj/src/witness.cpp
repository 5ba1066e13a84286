#include <set>

#include "qcsolve/backend.hpp"

namespace qcsolve::backend {

namespace {

// Fresh literal lexical forms must not clash with literals of the queries.
std::string fresh_lexical(int n, const fol::Signature& sig) {
  std::string base = "__w" + std::to_string(n);
  std::string lex = base;
  for (int k = 0;; ++k) {
    bool clash = false;
    for (size_t c = 1; c < sig.size() && !clash; ++c) {
      const auto& v = sig.value(static_cast<int>(c));
      clash = v.is_literal() && v.lexical == lex;
    }
    if (!clash) return lex;
    lex = base + "_" + std::to_string(k);
  }
}

}  // namespace

bool validate_witness(Witness& w, const syntax::Query& q1, const syntax::Query* q2,
                      WitnessMode mode) {
  w.validated = false;
  auto r1 = eval::eval_query(q1, w.dataset);
  if (!r1.count(w.binding)) {
    w.note = "binding is not a solution of the first query";
    return false;
  }
  if (q2 && mode != WitnessMode::Satisfiability) {
    auto r2 = eval::eval_query(*q2, w.dataset);
    if (mode == WitnessMode::Containment && r2.count(w.binding)) {
      w.note = "binding is also a solution of the second query";
      return false;
    }
    if (mode == WitnessMode::Subsumption) {
      for (const auto& m : r2) {
        if (eval::extends(m, w.binding)) {
          w.note = "a solution of the second query extends the binding";
          return false;
        }
      }
    }
  }
  w.note.clear();
  w.validated = true;
  return true;
}

Witness extract_witness(const SolverResult& res, const fol::Signature& sig,
                        const std::vector<syntax::Term>& rv1, const syntax::Query& q1,
                        const syntax::Query* q2, WitnessMode mode) {
  Witness w;
  if (res.status != Status::Sat || !res.model) {
    w.note = "model incomplete";
    return w;
  }
  const Model& m = *res.model;

  // Universe: declared elements plus anything a constant denotes.
  std::vector<std::string> universe = m.universe();
  std::set<std::string> seen(universe.begin(), universe.end());
  std::map<std::string, rdf::RdfTerm> theta;
  for (size_t c = 0; c < res.script.constants.size() && c < sig.size(); ++c) {
    auto e = m.constant(res.script.constants[c]);
    if (!e) continue;
    if (seen.insert(*e).second) universe.push_back(*e);
    theta.emplace(*e, c == 0 ? rdf::RdfTerm::err() : sig.value(static_cast<int>(c)));
  }
  if (universe.empty()) {
    w.note = "model incomplete";
    return w;
  }

  // Remaining elements: IRIs first so that datatype values can refer to them.
  int fresh = 0;
  std::vector<std::string> literals;
  for (const auto& e : universe) {
    if (theta.count(e)) continue;
    if (m.holds("isLiteral", {e})) {
      literals.push_back(e);
    } else {
      theta.emplace(e, rdf::RdfTerm::iri(std::string(kWitnessIriPrefix) + "e" + std::to_string(fresh++)));
    }
  }
  int lit_n = 0;
  for (const auto& e : literals) {
    std::optional<std::string> type;
    if (auto d = m.apply("datatype", {e})) {
      auto it = theta.find(*d);
      if (it != theta.end() && it->second.kind == rdf::TermKind::Iri &&
          it->second.lexical != syntax::kXsdString) {
        type = it->second.lexical;
      }
    }
    theta.emplace(e, rdf::RdfTerm::literal(fresh_lexical(lit_n++, sig), type));
  }

  auto usable_node = [&](const std::string& e) {
    const auto& t = theta.at(e);
    return !t.is_err() && !t.is_literal();
  };
  for (const auto& s : universe) {
    if (!usable_node(s)) continue;
    for (const auto& p : universe) {
      if (!usable_node(p)) continue;
      for (const auto& o : universe) {
        if (theta.at(o).is_err()) continue;
        if (m.holds("betaD", {s, p, o})) {
          w.dataset.default_graph.insert({theta.at(s), theta.at(p), theta.at(o)});
        }
        for (const auto& g : universe) {
          if (!usable_node(g)) continue;
          if (m.holds("betaN", {s, p, o, g})) {
            w.dataset.named[theta.at(g).lexical].insert({theta.at(s), theta.at(p), theta.at(o)});
          }
        }
      }
    }
  }

  for (const auto& v : rv1) {
    auto sk = res.script.skolems.find(fol::var_name(v));
    if (sk == res.script.skolems.end()) {
      w.note = "no value for " + fol::var_name(v);
      return w;
    }
    auto e = m.constant(sk->second);
    if (!e || !theta.count(*e)) {
      w.note = "no value for " + fol::var_name(v);
      return w;
    }
    w.binding[v] = theta.at(*e);
  }
  validate_witness(w, q1, q2, mode);
  return w;
}

}  // namespace qcsolve::backend
