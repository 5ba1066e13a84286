#include "qcsolve/fol.hpp"

#include <gtest/gtest.h>

#include "qcsolve/error.hpp"
#include "qcsolve/eval.hpp"
#include "test_util.hpp"

using namespace qcsolve;
using namespace qcsolve::fol;
using qcsolve::testing::iri;
using qcsolve::testing::riri;
using qcsolve::testing::ConjGen;
using qcsolve::testing::Rng;
using qcsolve::testing::var;
using syntax::PatternPtr;
using syntax::Query;
using syntax::Term;

namespace {

Query load(const std::string& name) {
  return syntax::parse_query(qcsolve::testing::read_data(name));
}

TermPtr v(const char* n) { return var_term(std::string("?") + n); }

struct Albums {
  Signature sig;
  TermPtr c(const std::string& local) { return const_term(sig.intern(riri(local))); }
  TermPtr type() { return const_term(sig.intern(rdf::RdfTerm::iri(std::string(syntax::kRdfType)))); }
  FormulaPtr bd(TermPtr s, TermPtr p, TermPtr o) { return atom(Pred::BetaD, {s, p, o}); }
};

FormulaPtr sigma_of(const std::string& body, Signature& sig) {
  auto q = syntax::parse_query("select * " + body);
  auto qc = query_context(q.from, q.from_named, sig);
  return sigma_pattern(*q.pattern, cx_default(q.from, q.from_named, sig), qc, sig);
}

}  // namespace

TEST(SigmaTerm, Examples) {
  Signature sig;
  auto album = sigma_term(iri("Album"), sig);
  EXPECT_EQ(album->kind, FolTerm::Kind::Const);
  EXPECT_EQ(sig.value(album->constant), riri("Album"));
  EXPECT_EQ(sigma_term(var("x"), sig)->var, "?x");
  auto la = sigma_term(Term::literal("Los Angeles"), sig);
  EXPECT_EQ(sig.value(la->constant), rdf::RdfTerm::literal("Los Angeles"));
  EXPECT_EQ(sigma_term(iri("Album"), sig)->constant, album->constant);
  EXPECT_NE(sigma_term(Term::blank("x"), sig)->var, "?x");
}

TEST(SigmaTerm, TypedLiteralsAreDistinct) {
  Signature sig;
  int a = sigma_term(Term::literal("1"), sig)->constant;
  int b = sigma_term(Term::literal("1", std::string(syntax::kXsdNs) + "integer"), sig)->constant;
  EXPECT_NE(a, b);
  EXPECT_NE(a, Signature::err());
}

TEST(Cx, Examples) {
  Signature sig;
  EXPECT_EQ(cx_default({}, {}, sig).kind, ActiveGraphCtx::Kind::DefaultOfGlobal);
  auto merged = cx_default({"urn:g1", "urn:g2"}, {}, sig);
  EXPECT_EQ(merged.kind, ActiveGraphCtx::Kind::MergedFrom);
  EXPECT_EQ(merged.graphs.size(), 2u);
  EXPECT_EQ(cx_default({}, {"urn:g"}, sig).kind, ActiveGraphCtx::Kind::EmptyDefault);
  EXPECT_EQ(sigma_of("from named <urn:g> { ?x :p ?y }", sig)->kind, Formula::Kind::Bottom);
}

TEST(SigmaPattern, AlbumQuery) {
  Albums f;
  auto q = load("albums_la.rq");
  auto form = conjunctive_form(q, f.sig);
  auto x = v("x"), y = v("y"), z = v("z"), w = v("w");
  auto la = const_term(f.sig.intern(rdf::RdfTerm::literal("Los Angeles")));
  auto expected = exists(
      {"?z", "?w"},
      conjunction({f.bd(x, f.type(), f.c("Album")), f.bd(x, f.c("artist"), y),
                   f.bd(y, f.type(), f.c("SoloArtist")), f.bd(y, f.c("hometown"), z),
                   f.bd(z, f.c("name"), w), atom(Pred::Eq, {w, la})}));
  EXPECT_TRUE(alpha_equivalent(*form.phi, *expected)) << to_string(*form.phi, f.sig);
  EXPECT_EQ(form.rv, (VarNames{"?x", "?y"}));

  // A different literal or a swapped atom argument must not match.
  auto wrong = exists({"?z", "?w"},
                      conjunction({f.bd(x, f.type(), f.c("Album")), f.bd(x, f.c("artist"), y),
                                   f.bd(y, f.type(), f.c("SoloArtist")),
                                   f.bd(y, f.c("hometown"), z), f.bd(z, f.c("name"), w),
                                   atom(Pred::Eq, {w, f.c("LosAngeles")})}));
  EXPECT_FALSE(alpha_equivalent(*form.phi, *wrong));
  auto swapped = exists({"?z", "?w"},
                        conjunction({f.bd(x, f.type(), f.c("Album")), f.bd(y, f.c("artist"), x),
                                     f.bd(y, f.type(), f.c("SoloArtist")),
                                     f.bd(y, f.c("hometown"), z), f.bd(z, f.c("name"), w),
                                     atom(Pred::Eq, {w, la})}));
  EXPECT_FALSE(alpha_equivalent(*form.phi, *swapped));
}

TEST(SigmaPattern, DiffAndMinus) {
  Signature sig;
  auto p = const_term(sig.intern(riri("p")));
  auto q = const_term(sig.intern(riri("q")));
  auto diff = sigma_of("{ ?x :p ?y diff { ?x :q ?z } }", sig);
  auto want = conjunction({atom(Pred::BetaD, {v("x"), p, v("y")}),
                           forall({"?z"}, negation(atom(Pred::BetaD, {v("x"), q, v("z")})))});
  EXPECT_TRUE(alpha_equivalent(*diff, *want)) << to_string(*diff, sig);

  auto disjoint = sigma_of("{ ?x :p ?y minus { ?a :q ?b } }", sig);
  EXPECT_TRUE(alpha_equivalent(*disjoint, *atom(Pred::BetaD, {v("x"), p, v("y")})));

  auto shared = sigma_of("{ ?x :p ?y minus { ?x :q ?z } }", sig);
  EXPECT_TRUE(alpha_equivalent(*shared, *want));
}

TEST(SigmaPattern, GraphOperators) {
  Signature sig;
  EXPECT_THROW(sigma_of("{ graph ?g { ?x :p ?y } }", sig), UnsupportedShape);
  auto f = sigma_of("from named <urn:g1> from named <urn:g2> { graph ?g { ?x :p ?y } }", sig);
  ASSERT_EQ(f->kind, Formula::Kind::Or);
  EXPECT_EQ(f->children.size(), 2u);
  EXPECT_EQ(free_vars(*f), (VarNames{"?g", "?x", "?y"}));
  EXPECT_EQ(sigma_of("from named <urn:g1> { graph <urn:g3> { ?x :p ?y } }", sig)->kind,
            Formula::Kind::Bottom);
  auto named = sigma_of("from named <urn:g1> { graph <urn:g1> { ?x :p ?y } }", sig);
  ASSERT_EQ(named->kind, Formula::Kind::Atom);
  EXPECT_EQ(named->pred, Pred::BetaN);
  auto merged = sigma_of("from <urn:g1> from <urn:g2> { ?x :p ?y }", sig);
  ASSERT_EQ(merged->kind, Formula::Kind::Or);
  EXPECT_EQ(merged->children.size(), 2u);
}

TEST(SigmaCond, ErrGuardsAndUnboundVariables) {
  Signature sig;
  // Equality with a datatype application carries a guard against err.
  auto f = sigma_of("{ ?x :p ?y filter (datatype(?y) = xsd:string) }", sig);
  EXPECT_TRUE(sig.uses_datatype());
  ASSERT_EQ(f->kind, Formula::Kind::And);
  EXPECT_EQ(f->children.size(), 3u);
  // A plain variable equality needs none.
  auto g = sigma_of("{ ?x :p ?y filter (?x = ?y) }", sig);
  EXPECT_EQ(g->children.size(), 2u);
  // A variable the pattern cannot bind denotes err.
  auto q = syntax::parse_query("select * { ?x :p ?y }");
  auto r = syntax::eq(syntax::term_expr(var("z")), syntax::term_expr(var("x")));
  auto h = sigma_cond(*r, syntax::vars_of(*q.pattern), sig);
  EXPECT_EQ(free_vars(*h), (VarNames{"?x"}));
}

TEST(RelevantVars, Examples) {
  auto q1 = load("albums_la.rq");
  EXPECT_EQ(relevant_vars(*q1.pattern, q1.distinguished_set()), (VarNames{"?x", "?y"}));
  auto q = syntax::parse_query("select ?x ?z { ?x :p ?y }");
  EXPECT_EQ(relevant_vars(*q.pattern, q.distinguished_set()), (VarNames{"?x"}));
  auto star = syntax::parse_query("select * { ?x :p ?y . _:b :q ?x }");
  EXPECT_EQ(relevant_vars(*star.pattern, star.distinguished_set()), (VarNames{"?x", "?y"}));
}

TEST(Phi, QuantifierPrefix) {
  Signature sig;
  auto s = sigma_of("{ ?x :p ?y }", sig);
  EXPECT_EQ(phi(s, {"?x", "?y"})->kind, Formula::Kind::Atom);
  auto closed = phi(s, {});
  ASSERT_EQ(closed->kind, Formula::Kind::Exists);
  EXPECT_TRUE(free_vars(*closed).empty());
}

TEST(Theta, FusesQuantifiers) {
  Albums f;
  auto form = conjunctive_form(load("albums_la.rq"), f.sig);
  auto t = theta(form.phi, form.rv);
  ASSERT_EQ(t->kind, Formula::Kind::Not);
  ASSERT_EQ(t->children[0]->kind, Formula::Kind::Exists);
  EXPECT_EQ(t->children[0]->vars.size(), 4u);
  EXPECT_TRUE(free_vars(*t).empty());
}

TEST(Psi, AlbumPair) {
  Albums f;
  auto q1 = load("albums_la.rq");
  auto q2 = load("albums.rq");
  auto c1 = conjunctive_form(q1, f.sig);
  auto c2 = conjunctive_form(q2, f.sig);
  EXPECT_TRUE(tilde(c1.rv, c2.rv, Mode::Containment));
  // Q2 is projection-free, so its Φ has no prefix.
  EXPECT_EQ(c2.phi->kind, Formula::Kind::And);
  auto p = psi(c1.phi, c1.rv, {c2.phi});
  EXPECT_TRUE(free_vars(*p).empty());
  auto x = v("x"), y = v("y");
  auto want = forall({"?x", "?y"},
                     implies(c1.phi, conjunction({f.bd(x, f.type(), f.c("Album")),
                                                  f.bd(x, f.c("artist"), y)})));
  EXPECT_TRUE(alpha_equivalent(*p, *want)) << to_string(*p, f.sig);
}

TEST(Tilde, Examples) {
  VarNames xy{"?x", "?y"}, x{"?x"};
  EXPECT_TRUE(tilde(xy, xy, Mode::Containment));
  EXPECT_TRUE(tilde(xy, xy, Mode::Subsumption));
  EXPECT_FALSE(tilde(x, xy, Mode::Containment));
  EXPECT_TRUE(tilde(x, xy, Mode::Subsumption));
  EXPECT_FALSE(tilde(xy, x, Mode::Subsumption));
}

TEST(AlphaEquivalence, RenamingMustBeBijective) {
  Signature sig;
  auto p = const_term(sig.intern(riri("p")));
  auto a = conjunction({atom(Pred::BetaD, {v("x"), p, v("y")}), atom(Pred::BetaD, {v("y"), p, v("x")})});
  auto b = conjunction({atom(Pred::BetaD, {v("u"), p, v("w")}), atom(Pred::BetaD, {v("w"), p, v("u")})});
  auto c = conjunction({atom(Pred::BetaD, {v("u"), p, v("u")}), atom(Pred::BetaD, {v("u"), p, v("u")})});
  EXPECT_TRUE(alpha_equivalent(*a, *b));
  EXPECT_FALSE(alpha_equivalent(*a, *c));
  EXPECT_FALSE(alpha_equivalent(*exists({"?x"}, a), *exists({"?u", "?w"}, b)));
}

TEST(Printer, PrefixSyntax) {
  Signature sig;
  auto f = sigma_of("{ ?x :p \"v\" }", sig);
  EXPECT_EQ(to_string(*f, sig), "(betaD ?x <urn:default:p> \"v\")");
}

// ---------------------------------------------------------------------------
// Invariants over generated conjunctive patterns.

namespace {

constexpr int kInvariantCases = 200;

template <typename F>
void for_generated(uint64_t seed, F&& body) {
  Rng rng(seed);
  for (int i = 0; i < kInvariantCases; ++i) {
    ConjGen gen(rng, i % 2 == 1);
    body(gen.query(), rng);
  }
}

syntax::VarSet domain(const eval::Mapping& m) {
  syntax::VarSet out;
  for (const auto& [k, _] : m) out.insert(k);
  return out;
}

}  // namespace

TEST(Invariants, DomainOfSolutions) {
  for_generated(201, [](const Query& q, Rng& rng) {
    for (int i = 0; i < 5; ++i) {
      auto d = qcsolve::testing::vocab_dataset(rng, 12);
      auto qd = rdf::query_dataset(q, d);
      for (const auto& m : eval::eval_pattern(*q.pattern, qd, rdf::df(qd))) {
        ASSERT_EQ(domain(m), syntax::vars_of(*q.pattern)) << syntax::to_string(q);
      }
    }
  });
}

TEST(Invariants, RelevantVariables) {
  for_generated(202, [](const Query& q, Rng& rng) {
    syntax::VarSet rv;
    for (const auto& t : syntax::vars_of(*q.pattern)) {
      if (q.distinguished_set().count(t)) rv.insert(t);
    }
    EXPECT_EQ(relevant_vars(*q.pattern, q.distinguished_set()), var_names(rv));
    for (int i = 0; i < 5; ++i) {
      auto d = qcsolve::testing::vocab_dataset(rng, 12);
      for (const auto& m : eval::eval_query(q, d)) {
        ASSERT_EQ(domain(m), rv) << syntax::to_string(q);
      }
    }
  });
}

TEST(Invariants, VarCommutation) {
  for_generated(203, [](const Query& q, Rng&) {
    Signature sig;
    auto qc = query_context(q.from, q.from_named, sig);
    auto s = sigma_pattern(*q.pattern, cx_default(q.from, q.from_named, sig), qc, sig);
    EXPECT_EQ(free_vars(*s), var_names(syntax::vars_of(*q.pattern))) << syntax::to_string(q);
  });
}

TEST(Invariants, PhiFreeVariables) {
  for_generated(204, [](const Query& q, Rng&) {
    Signature sig;
    auto c = conjunctive_form(q, sig);
    EXPECT_EQ(free_vars(*c.phi), c.rv) << syntax::to_string(q);
    EXPECT_TRUE(free_vars(*theta(c.phi, c.rv)).empty());
    EXPECT_TRUE(free_vars(*psi(c.phi, c.rv, {c.phi})).empty());
  });
}

TEST(Invariants, InterningIsInjective) {
  Signature sig;
  std::vector<rdf::RdfTerm> terms = {
      riri("a"), riri("b"), rdf::RdfTerm::literal("a"),
      rdf::RdfTerm::literal("a", std::string(syntax::kXsdString)),
      rdf::RdfTerm::literal("a", std::string(syntax::kXsdNs) + "integer")};
  std::set<int> ids;
  for (const auto& t : terms) ids.insert(sig.intern(t));
  EXPECT_EQ(ids.size(), terms.size());
  EXPECT_FALSE(ids.count(Signature::err()));
}
