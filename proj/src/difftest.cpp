#include <algorithm>
#include <array>
#include <cctype>
#include <random>

#include "qcsolve/engine.hpp"
#include "qcsolve/error.hpp"
#include "qcsolve/eval.hpp"

namespace qcsolve::engine {

namespace {

class Rand {
 public:
  explicit Rand(uint64_t seed) : gen_(seed) {}
  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(gen_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(static_cast<int>(v.size()))];
  }

 private:
  std::mt19937_64 gen_;
};

const std::vector<std::string> kNodes = {":a", ":b"};
const std::vector<std::string> kPreds = {":p", ":q"};
const std::vector<std::string> kLiterals = {"\"x\"", "\"y\"", "\"z\""};

using TripleText = std::array<std::string, 3>;

// A query of the generated grammar: a chain of triples, at most one filter
// on the chain, and at most one union or optional.
struct Shape {
  std::vector<TripleText> chain;
  std::string filter;
  enum class Extra { None, Union, Optional } extra = Extra::None;
  std::vector<TripleText> other;  // union branch, or the optional triple
  std::vector<std::string> select;

  std::vector<std::string> chain_vars() const {
    std::vector<std::string> out;
    for (const auto& t : chain) {
      for (const auto& x : t) {
        if (x[0] == '?' && std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
      }
    }
    return out;
  }

  std::string text() const {
    auto triples = [](const std::vector<TripleText>& ts) {
      std::string s;
      for (const auto& t : ts) s += t[0] + " " + t[1] + " " + t[2] + " . ";
      return s;
    };
    std::string body = triples(chain);
    if (!filter.empty()) body += "filter (" + filter + ") ";
    switch (extra) {
      case Extra::None:
        break;
      case Extra::Union:
        body = "{ " + body + "} union { " + triples(other) + "}";
        break;
      case Extra::Optional:
        body += "optional { " + triples(other) + "}";
        break;
    }
    std::string sel = "*";
    if (!select.empty()) {
      sel.clear();
      for (const auto& v : select) sel += (sel.empty() ? "" : " ") + v;
    }
    return "select " + sel + " { " + body + "}";
  }
};

std::string random_object(Rand& r) {
  return r.chance(0.5) ? r.pick(kNodes) : r.pick(kLiterals);
}

std::vector<TripleText> random_chain(Rand& r) {
  int n = 1 + r.below(4);
  std::vector<TripleText> out;
  for (int k = 0; k < n; ++k) {
    std::string s = "?v" + std::to_string(k);
    std::string o = r.chance(0.15) ? random_object(r) : "?v" + std::to_string(k + 1);
    out.push_back({s, r.pick(kPreds), o});
  }
  return out;
}

std::string random_filter(Rand& r, const std::vector<std::string>& vars) {
  const std::string& x = r.pick(vars);
  std::string atom;
  switch (r.below(3)) {
    case 0:
      atom = x + " = " + random_object(r);
      break;
    case 1:
      atom = x + " = " + r.pick(vars);
      break;
    default:
      atom = "isliteral(" + x + ")";
  }
  return r.chance(0.3) ? "!(" + atom + ")" : atom;
}

Shape random_shape(Rand& r) {
  Shape s;
  s.chain = random_chain(r);
  auto vars = s.chain_vars();
  if (r.chance(0.4)) s.filter = random_filter(r, vars);
  int extra = r.below(8);
  if (extra == 0) {
    s.extra = Shape::Extra::Union;
    s.other = random_chain(r);
  } else if (extra == 1) {
    s.extra = Shape::Extra::Optional;
    s.other = {{r.pick(vars), r.pick(kPreds), "?w"}};
  }
  return s;
}

void random_select(Rand& r, Shape& s, double star) {
  s.select.clear();
  if (r.chance(star)) return;
  for (const auto& v : s.chain_vars()) {
    if (r.chance(0.5)) s.select.push_back(v);
  }
  if (s.select.empty()) s.select.push_back("?v0");
}

Shape mutate(Rand& r, const Shape& q1) {
  Shape q2 = q1;
  switch (r.below(6)) {
    case 0:  // identical
      break;
    case 1:  // drop a triple: usually more general
      if (q2.chain.size() > 1) q2.chain.erase(q2.chain.begin() + r.below(static_cast<int>(q2.chain.size())));
      break;
    case 2:  // toggle the filter
      q2.filter = q2.filter.empty() ? random_filter(r, q2.chain_vars()) : "";
      break;
    case 3: {  // change one position
      auto& t = q2.chain[r.below(static_cast<int>(q2.chain.size()))];
      if (r.chance(0.5)) {
        t[1] = t[1] == ":p" ? ":q" : ":p";
      } else {
        t[2] = random_object(r);
      }
      break;
    }
    case 4:  // add a union branch
      q2.extra = Shape::Extra::Union;
      q2.other = random_chain(r);
      break;
    default:
      q2 = random_shape(r);
  }
  // Filters may only mention variables the chain still binds.
  if (!q2.filter.empty()) {
    auto vars = q2.chain_vars();
    bool ok = true;
    for (size_t pos = q2.filter.find('?'); pos != std::string::npos; pos = q2.filter.find('?', pos + 1)) {
      size_t end = pos + 1;
      while (end < q2.filter.size() && std::isalnum(static_cast<unsigned char>(q2.filter[end]))) ++end;
      ok = ok && std::find(vars.begin(), vars.end(), q2.filter.substr(pos, end - pos)) != vars.end();
    }
    if (!ok) q2.filter.clear();
  }
  if (q2.extra == Shape::Extra::Optional) {
    auto vars = q2.chain_vars();
    if (std::find(vars.begin(), vars.end(), q2.other[0][0]) == vars.end()) q2.other[0][0] = vars[0];
  }
  return q2;
}

bool included(const eval::MappingSet& a, const eval::MappingSet& b, bool subsumption) {
  for (const auto& m : a) {
    if (!subsumption) {
      if (!b.count(m)) return false;
      continue;
    }
    bool found = false;
    for (const auto& n : b) {
      if (eval::extends(n, m)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

std::vector<QueryPair> generate_pairs(uint64_t seed, int n_pairs) {
  Rand r(seed);
  std::vector<QueryPair> out;
  for (int i = 0; i < n_pairs; ++i) {
    Shape s1 = random_shape(r);
    random_select(r, s1, 0.6);
    Shape s2 = mutate(r, s1);
    random_select(r, s2, 0.7);
    QueryPair p;
    p.q1 = syntax::parse_query(s1.text());
    p.q2 = syntax::parse_query(s2.text());
    // Containment needs a projection-free second query.
    p.subsumption = !s2.select.empty() || r.chance(0.3);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<rdf::Dataset> generate_datasets(uint64_t seed, int n_datasets) {
  Rand r(seed ^ 0x9e3779b97f4a7c15ULL);
  auto iri = [](const std::string& t) {
    return rdf::RdfTerm::iri(std::string(syntax::kDefaultBase) + t.substr(1));
  };
  auto lit = [](const std::string& t) { return rdf::RdfTerm::literal(t.substr(1, t.size() - 2)); };
  std::vector<rdf::Dataset> out;
  for (int i = 0; i < n_datasets; ++i) {
    rdf::Dataset d;
    int n = r.below(11);
    for (int k = 0; k < n; ++k) {
      auto o = r.chance(0.3) ? lit(r.pick(kLiterals)) : iri(r.pick(kNodes));
      d.default_graph.insert({iri(r.pick(kNodes)), iri(r.pick(kPreds)), o});
    }
    out.push_back(std::move(d));
  }
  return out;
}

DiffReport differential_check(uint64_t seed, int n_pairs, int n_datasets, const Config& cfg) {
  DiffReport rep;
  auto pairs = generate_pairs(seed, n_pairs);
  auto datasets = generate_datasets(seed, n_datasets);
  for (const auto& p : pairs) {
    ++rep.pairs;
    Verdict v;
    try {
      v = p.subsumption ? check_subsumption(p.q1, p.q2, cfg) : check_containment(p.q1, p.q2, cfg);
    } catch (const Error&) {
      ++rep.rejected;
      continue;
    }
    rep.witness_failures += v.witness_failures;
    std::string label = (p.subsumption ? "subsumption " : "containment ") +
                        syntax::to_string(p.q1) + "  vs  " + syntax::to_string(p.q2);
    switch (v.answer) {
      case Answer::Holds: {
        ++rep.holds;
        for (size_t k = 0; k < datasets.size(); ++k) {
          auto r1 = eval::eval_query(p.q1, datasets[k]);
          auto r2 = eval::eval_query(p.q2, datasets[k]);
          if (!included(r1, r2, p.subsumption)) {
            ++rep.refuted;
            rep.violations.push_back("refuted on dataset " + std::to_string(k) + ": " + label);
            break;
          }
        }
        break;
      }
      case Answer::DoesNotHold: {
        ++rep.does_not_hold;
        bool ok = v.witness.has_value();
        if (ok) {
          auto w = *v.witness;
          ok = backend::validate_witness(w, p.q1, &p.q2,
                                         p.subsumption ? backend::WitnessMode::Subsumption
                                                       : backend::WitnessMode::Containment);
        }
        if (!ok) {
          ++rep.witness_failures;
          rep.violations.push_back("invalid witness: " + label);
        }
        break;
      }
      case Answer::Unknown:
        ++rep.unknown;
        if (v.witness_failures > 0) rep.violations.push_back("witness rejected: " + label);
        break;
    }
  }
  return rep;
}

}  // namespace qcsolve::engine
