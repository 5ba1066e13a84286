#include "qcsolve/backend.hpp"

#include <gtest/gtest.h>

#include "qcsolve/error.hpp"
#include "test_util.hpp"

using namespace qcsolve;
using namespace qcsolve::backend;
using qcsolve::testing::read_data;
using qcsolve::testing::riri;
using syntax::Query;

namespace {

Query load(const std::string& name) { return syntax::parse_query(read_data(name)); }

std::vector<syntax::Term> rv_terms(const Query& q) {
  std::vector<syntax::Term> out;
  auto vars = syntax::vars_of(*q.pattern);
  for (const auto& v : q.distinguished()) {
    if (vars.count(v)) out.push_back(v);
  }
  return out;
}

struct ThetaCase {
  fol::Signature sig;
  fol::FormulaPtr theta;
  std::vector<syntax::Term> rv;
};

ThetaCase theta_of(const Query& q) {
  ThetaCase c;
  auto form = fol::conjunctive_form(q, c.sig);
  c.theta = fol::theta(form.phi, form.rv);
  c.rv = rv_terms(q);
  return c;
}

SolverConfig cfg() { return default_solver_config(); }

}  // namespace

TEST(Emit, DeterministicAndShaped) {
  auto a = theta_of(load("albums_la.rq"));
  auto b = theta_of(load("albums_la.rq"));
  auto sa = emit_smtlib(*a.theta, a.sig);
  auto sb = emit_smtlib(*b.theta, b.sig);
  EXPECT_EQ(sa.text, sb.text);
  EXPECT_NE(sa.text.find("(declare-sort U 0)"), std::string::npos);
  EXPECT_NE(sa.text.find("(assert (distinct c0 c1"), std::string::npos);
  EXPECT_NE(sa.text.find("(check-sat)"), std::string::npos);
  // Θ = ¬∃ ..., so all four variables become Skolem constants.
  EXPECT_EQ(sa.skolems.size(), 4u);
  EXPECT_EQ(sa.text.find("datatype"), std::string::npos);
}

TEST(Emit, DatatypeAxiomsOnlyWhenUsed) {
  auto q = syntax::parse_query(
      "select ?x { ?x :p ?y filter (datatype(?y) = xsd:integer && ?y = \"v\") }");
  auto c = theta_of(q);
  auto s = emit_smtlib(*c.theta, c.sig);
  EXPECT_NE(s.text.find("(declare-fun datatype (U) U)"), std::string::npos);
  // The literal's datatype (xsd:string) was interned for the axioms.
  EXPECT_TRUE(c.sig.find(rdf::RdfTerm::iri(std::string(syntax::kXsdString))).has_value());
}

TEST(Solver, UnsatisfiableFilter) {
  auto c = theta_of(load("unsat_filter.rq"));
  auto r = check_validity(*c.theta, c.sig, cfg());
  EXPECT_EQ(r.status, Status::Unsat);
}

TEST(Solver, SatisfiableQueryYieldsWitness) {
  auto q = load("albums_la.rq");
  auto c = theta_of(q);
  auto r = check_validity(*c.theta, c.sig, cfg());
  ASSERT_EQ(r.status, Status::Sat);
  ASSERT_TRUE(r.model.has_value());
  auto w = extract_witness(r, c.sig, c.rv, q, nullptr, WitnessMode::Satisfiability);
  EXPECT_TRUE(w.validated) << w.note << "\n" << rdf::to_nquads(w.dataset);
  EXPECT_EQ(w.binding.size(), 2u);
}

TEST(Solver, SingleTripleWitness) {
  auto q = syntax::parse_query("select ?x { ?x :p :o }");
  auto c = theta_of(q);
  auto r = check_validity(*c.theta, c.sig, cfg());
  ASSERT_EQ(r.status, Status::Sat);
  auto w = extract_witness(r, c.sig, c.rv, q, nullptr, WitnessMode::Satisfiability);
  ASSERT_TRUE(w.validated) << w.note;
  ASSERT_EQ(w.dataset.default_graph.size(), 1u);
  const auto& t = *w.dataset.default_graph.begin();
  EXPECT_EQ(t.p, riri("p"));
  EXPECT_EQ(t.o, riri("o"));
  EXPECT_EQ(w.binding.at(qcsolve::testing::var("x")), t.s);
}

TEST(Solver, AlbumPsi) {
  auto q1 = load("albums_la.rq");
  auto q2 = load("albums.rq");
  {
    fol::Signature sig;
    auto c1 = fol::conjunctive_form(q1, sig);
    auto c2 = fol::conjunctive_form(q2, sig);
    auto r = check_validity(*fol::psi(c1.phi, c1.rv, {c2.phi}), sig, cfg());
    EXPECT_EQ(r.status, Status::Unsat);
  }
  {
    fol::Signature sig;
    auto c2 = fol::conjunctive_form(q2, sig);
    auto c1 = fol::conjunctive_form(q1, sig);
    auto r = check_validity(*fol::psi(c2.phi, c2.rv, {c1.phi}), sig, cfg());
    ASSERT_EQ(r.status, Status::Sat);
    auto w = extract_witness(r, sig, rv_terms(q2), q2, &q1, WitnessMode::Containment);
    EXPECT_TRUE(w.validated) << w.note;
    EXPECT_FALSE(eval::eval_query(q2, w.dataset).empty());
  }
}

TEST(Solver, TypedLiteralWitness) {
  auto q = syntax::parse_query("select ?y { ?x :p ?y filter (datatype(?y) = xsd:integer) }");
  auto c = theta_of(q);
  auto r = check_validity(*c.theta, c.sig, cfg());
  ASSERT_EQ(r.status, Status::Sat);
  auto w = extract_witness(r, c.sig, c.rv, q, nullptr, WitnessMode::Satisfiability);
  ASSERT_TRUE(w.validated) << w.note << "\n" << r.output;
  const auto& y = w.binding.at(qcsolve::testing::var("y"));
  EXPECT_TRUE(y.is_literal());
  EXPECT_EQ(y.datatype, std::string(syntax::kXsdNs) + "integer");
}

TEST(Solver, TimeoutIsUnknown) {
  auto c = theta_of(load("albums_la.rq"));
  SolverConfig slow;
  slow.command = {"sh", "-c", "sleep 5"};
  slow.timeout = std::chrono::milliseconds(1);
  EXPECT_EQ(check_validity(*c.theta, c.sig, slow).status, Status::Unknown);
  auto w = extract_witness(SolverResult{}, c.sig, c.rv, load("albums_la.rq"), nullptr,
                           WitnessMode::Satisfiability);
  EXPECT_FALSE(w.validated);
  EXPECT_TRUE(w.dataset.default_graph.empty());
}

TEST(Solver, Errors) {
  auto c = theta_of(load("albums_la.rq"));
  SolverConfig missing;
  missing.command = {"qcsolve-no-such-solver"};
  EXPECT_THROW(check_validity(*c.theta, c.sig, missing), SolverNotFound);
  SolverConfig garbage;
  garbage.command = {"sh", "-c", "cat >/dev/null; echo maybe"};
  EXPECT_THROW(check_validity(*c.theta, c.sig, garbage), SolverProtocolError);
  garbage.command = {"sh", "-c", "cat >/dev/null; echo '(('"};
  EXPECT_THROW(check_validity(*c.theta, c.sig, garbage), SolverProtocolError);
}

TEST(ModelParser, ReadsDefinitions) {
  const char* text = R"(sat
(
  ;; universe for U:
  (declare-fun U!val!1 () U)
  (declare-fun U!val!0 () U)
  (forall ((x U)) (or (= x U!val!1) (= x U!val!0)))
  (define-fun c1 () U U!val!1)
  (define-fun |odd name| () U U!val!0)
  (define-fun k!0 ((x!0 U)) U (ite (= x!0 U!val!1) U!val!1 U!val!0))
  (define-fun betaD ((x!0 U) (x!1 U) (x!2 U)) Bool
    (let ((a!1 (= (k!0 x!1) U!val!1))) (and a!1 (= x!0 U!val!0) (not (= x!2 U!val!0)))))
)
)";
  auto sexps = parse_sexps(text);
  ASSERT_EQ(sexps.size(), 2u);
  auto m = Model::from_sexp(sexps[1]);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->universe().size(), 2u);
  EXPECT_EQ(m->constant("c1"), "U!val!1");
  EXPECT_EQ(m->constant("odd name"), "U!val!0");
  EXPECT_TRUE(m->holds("betaD", {"U!val!0", "U!val!1", "U!val!1"}));
  EXPECT_FALSE(m->holds("betaD", {"U!val!0", "U!val!0", "U!val!1"}));
  EXPECT_FALSE(m->holds("betaN", {"U!val!0", "U!val!0", "U!val!1", "U!val!1"}));
}

TEST(Witness, ValidationRejectsNonCounterexamples) {
  auto q1 = syntax::parse_query("select ?x { ?x :p ?y }");
  auto q2 = syntax::parse_query("select ?x { ?x :p ?z }");
  Witness w;
  w.dataset.default_graph.insert({riri("s"), riri("p"), riri("o")});
  w.binding[qcsolve::testing::var("x")] = riri("s");
  EXPECT_TRUE(validate_witness(w, q1, nullptr, WitnessMode::Satisfiability));
  EXPECT_FALSE(validate_witness(w, q1, &q2, WitnessMode::Containment));
  EXPECT_FALSE(validate_witness(w, q1, &q2, WitnessMode::Subsumption));
  w.binding[qcsolve::testing::var("x")] = riri("o");
  EXPECT_FALSE(validate_witness(w, q1, nullptr, WitnessMode::Satisfiability));
}

TEST(Witness, GeneratedSatisfiableQueriesValidate) {
  // Chains over a small vocabulary with an optional filter; every Sat answer
  // must give an err-free dataset the evaluator accepts.
  qcsolve::testing::Rng rng(77);
  int sat = 0;
  for (int i = 0; i < 20; ++i) {
    std::string body;
    int n = 1 + rng.below(3);
    for (int k = 0; k < n; ++k) {
      body += "?v" + std::to_string(k) + " :" + (rng.chance(0.5) ? "p" : "q") + " ?v" +
              std::to_string(k + 1) + " . ";
    }
    if (rng.chance(0.5)) body += "filter (?v" + std::to_string(n) + " = \"v\")";
    if (rng.chance(0.3)) body += " filter (!isliteral(?v0))";
    auto q = syntax::parse_query("select ?v0 ?v" + std::to_string(n) + " { " + body + " }");
    auto c = theta_of(q);
    auto r = check_validity(*c.theta, c.sig, cfg());
    ASSERT_EQ(r.status, Status::Sat) << syntax::to_string(q);
    auto w = extract_witness(r, c.sig, c.rv, q, nullptr, WitnessMode::Satisfiability);
    EXPECT_TRUE(w.validated) << syntax::to_string(q) << ": " << w.note;
    for (const auto& t : w.dataset.default_graph) {
      EXPECT_FALSE(t.s.is_err() || t.p.is_err() || t.o.is_err());
    }
    ++sat;
  }
  EXPECT_EQ(sat, 20);
}
