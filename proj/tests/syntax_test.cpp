#include "qcsolve/syntax.hpp"

#include <gtest/gtest.h>

#include "qcsolve/error.hpp"
#include "test_util.hpp"

using namespace qcsolve;
using namespace qcsolve::syntax;
using qcsolve::testing::iri;
using qcsolve::testing::var;

namespace {

Term rdf_type() { return Term::iri(std::string(kRdfType)); }

TEST(Parse, AlbumArtistQuery) {
  Query q = parse_query(
      "select ?x ?y where { ?x a :Album . ?x :artist ?y . }");
  ASSERT_TRUE(q.select);
  EXPECT_EQ(*q.select, (std::vector<Term>{var("x"), var("y")}));
  auto expected = join(triple(var("x"), rdf_type(), iri("Album")),
                       triple(var("x"), iri("artist"), var("y")));
  EXPECT_TRUE(equal(q.pattern, expected)) << to_string(*q.pattern);
  EXPECT_TRUE(q.from.empty());
}

TEST(Parse, StarQuery) {
  Query q = parse_query("select * { ?s ?p ?o }");
  EXPECT_TRUE(q.is_star());
  EXPECT_TRUE(equal(q.pattern, triple(var("s"), var("p"), var("o"))));
  EXPECT_EQ(q.distinguished(), (std::vector<Term>{var("o"), var("p"), var("s")}));
}

TEST(Parse, FilterOnUnboundVariable) {
  EXPECT_THROW(parse_query("select ?x { ?x :p ?y filter(?z = ?y) }"),
               FilterScopeError);
}

TEST(Parse, FilterIsPostfixOnTheLeftPattern) {
  // ?z is bound only later in the group, so the filter is out of scope.
  EXPECT_THROW(parse_query("select * { ?x :p ?y filter(?z = ?y) . ?y :q ?z }"),
               FilterScopeError);
  Query q = parse_query("select * { ?x :p ?y . ?y :q ?z filter(?z = ?y) }");
  EXPECT_EQ(q.pattern->kind, Pattern::Kind::Filter);
  EXPECT_EQ(q.pattern->left->kind, Pattern::Kind::Join);
}

TEST(Parse, PrefixesAndLiterals) {
  Query q = parse_query(
      "PREFIX ex: <http://ex.org/>\n"
      "select ?x { ?x ex:p \"5\"^^xsd:integer . ?x ex:q \"a \\\"b\\\\\" }");
  auto expected =
      join(triple(var("x"), Term::iri("http://ex.org/p"),
                  Term::literal("5", std::string(kXsdNs) + "integer")),
           triple(var("x"), Term::iri("http://ex.org/q"), Term::literal("a \"b\\")));
  EXPECT_TRUE(equal(q.pattern, expected)) << to_string(*q.pattern);
}

TEST(Parse, CaseInsensitiveKeywordsAndComments) {
  Query q = parse_query(
      "SELECT ?x # the subject\nWHERE { ?x :p ?y OPTIONAL { ?y :q ?z } "
      "FILTER (!(?y = :a) && isLiteral(?x) || DATATYPE(?x) = xsd:string) }");
  ASSERT_EQ(q.pattern->kind, Pattern::Kind::Filter);
  EXPECT_EQ(q.pattern->left->kind, Pattern::Kind::Optional);
  EXPECT_EQ(q.pattern->cond->kind, Condition::Kind::Or);
  EXPECT_EQ(q.pattern->cond->left->kind, Condition::Kind::And);
  EXPECT_EQ(q.pattern->cond->left->left->kind, Condition::Kind::Not);
  EXPECT_EQ(q.pattern->cond->left->left->left->kind, Condition::Kind::Paren);
}

TEST(Parse, UnionChainsAreLeftAssociative) {
  Query q = parse_query("select * { {?x :p ?y} union {?x :q ?y} union {?x :r ?y} }");
  auto t = [](const char* p) { return triple(var("x"), iri(p), var("y")); };
  EXPECT_TRUE(equal(q.pattern, union_of(union_of(t("p"), t("q")), t("r"))));
}

TEST(Parse, GroupsSubqueriesAndGraphs) {
  Query q = parse_query(
      "select ?x from named <urn:g> { ?x :p ?y . { ?y :q ?z } "
      "{ select ?y { ?y :r ?w } } graph ?g { ?x :s ?y } graph <urn:g> { ?x :t ?y } "
      "minus { ?x :u ?v } diff { ?x :w ?v } }");
  EXPECT_EQ(q.from_named, std::vector<std::string>{"urn:g"});
  const Pattern* p = q.pattern.get();
  ASSERT_EQ(p->kind, Pattern::Kind::Diff);
  p = p->left.get();
  ASSERT_EQ(p->kind, Pattern::Kind::Minus);
  p = p->left.get();
  ASSERT_EQ(p->kind, Pattern::Kind::Join);
  EXPECT_EQ(p->right->kind, Pattern::Kind::GraphIri);
  p = p->left.get();
  EXPECT_EQ(p->right->kind, Pattern::Kind::GraphVar);
  p = p->left.get();
  EXPECT_EQ(p->right->kind, Pattern::Kind::SubQuery);
  p = p->left.get();
  EXPECT_EQ(p->right->kind, Pattern::Kind::Group);
}

TEST(Parse, PredicateObjectLists) {
  Query q = parse_query("select * { ?x :p :a, :b ; :q ?y }");
  auto expected = join(join(triple(var("x"), iri("p"), iri("a")),
                            triple(var("x"), iri("p"), iri("b"))),
                       triple(var("x"), iri("q"), var("y")));
  EXPECT_TRUE(equal(q.pattern, expected));
}

TEST(Parse, SyntaxErrorsCarryPositions) {
  try {
    parse_query("select ?x {\n  ?x :p }");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 9);
  }
  EXPECT_THROW(parse_query("select ?x { \"lit\" :p ?x }"), SyntaxError);
  EXPECT_THROW(parse_query("select ?x { ?x \"lit\" ?y }"), SyntaxError);
  EXPECT_THROW(parse_query("select ?x { ?x _:b ?y }"), SyntaxError);
  EXPECT_THROW(parse_query("select ?x { }"), SyntaxError);
  EXPECT_THROW(parse_query("select ?x { ?x :p ?y "), SyntaxError);
  EXPECT_THROW(parse_query("select ?x { ?x undeclared:p ?y }"), SyntaxError);
  EXPECT_THROW(parse_query("select ?x { { select ?x from <urn:g> { ?x :p ?y } } }"),
               SyntaxError);
  EXPECT_THROW(parse_query("select ?x { ?x :p ?y filter(_:b = ?y) }"), SyntaxError);
}

TEST(Parse, ReservedVariablePrefix) {
  EXPECT_THROW(parse_query("select ?__f0 { ?__f0 :p ?y }"), SyntaxError);
  ParseOptions opts;
  opts.allow_reserved_names = true;
  EXPECT_NO_THROW(parse_query("select ?__f0 { ?__f0 :p ?y }", opts));
}

TEST(Parse, UnsupportedFeatures) {
  const char* inputs[] = {
      "select distinct ?x { ?x :p ?y }",
      "select ?x { ?x :p ?y } order by ?x",
      "select ?x { ?x :p ?y } limit 3",
      "select ?x { ?x :p ?y filter(?x != ?y) }",
      "select ?x { ?x :p ?y filter(bound(?y)) }",
      "select ?x { ?x :p ?y filter(regex(?y, \"a\")) }",
      "select ?x { ?x :p 5 }",
      "select ?x { ?x :p \"a\"@en }",
      "ask { ?x :p ?y }",
      "select ?x { ?x :p/:q ?y }",
      "select ?x { ?x :p ?y bind(?y as ?z) }",
      "select ?x { ?x :p ?y } group by ?x",
  };
  for (const char* in : inputs) {
    EXPECT_THROW(parse_query(in), UnsupportedFeature) << in;
  }
}

TEST(VarsOf, Definitions) {
  EXPECT_EQ(vars_of(*triple(var("x"), rdf_type(), iri("Album"))), VarSet{var("x")});
  auto opt = optional(triple(var("x"), iri("p"), var("y")),
                      triple(var("y"), iri("q"), var("z")));
  EXPECT_EQ(vars_of(*opt), (VarSet{var("x"), var("y"), var("z")}));
  Query sub = parse_query("select ?a { ?a :p ?b }");
  EXPECT_EQ(vars_of(*subquery(sub)), VarSet{var("a")});
  auto m = minus(triple(var("x"), iri("p"), var("y")),
                 triple(var("z"), iri("q"), var("w")));
  EXPECT_EQ(vars_of(*m), (VarSet{var("x"), var("y")}));
  EXPECT_EQ(vars_of(*graph_var(var("g"), triple(var("x"), iri("p"), Term::blank("b")))),
            (VarSet{var("g"), var("x"), Term::blank("b")}));
  EXPECT_EQ(all_vars(*m), (VarSet{var("w"), var("x"), var("y"), var("z")}));
}

TEST(VarsOf, StarIgnoresBlankNodes) {
  Query q = parse_query("select * { ?x :p _:b }");
  EXPECT_EQ(q.distinguished(), std::vector<Term>{var("x")});
}

TEST(VarsOf, ProjectionFree) {
  EXPECT_TRUE(is_projection_free(parse_query("select * { ?x :p ?y }")));
  EXPECT_TRUE(is_projection_free(parse_query("select ?x ?y ?z { ?x :p ?y }")));
  EXPECT_FALSE(is_projection_free(parse_query("select ?x { ?x :p ?y }")));
  EXPECT_FALSE(is_projection_free(parse_query("select ?x { ?x :p _:b }")));
}

TEST(Properties, VarsOfIsStructurallyMonotone) {
  qcsolve::testing::Rng rng(7);
  qcsolve::testing::CanonicalGen gen(rng);
  for (int i = 0; i < 300; ++i) {
    auto a = gen.pattern(2);
    auto b = gen.pattern(2);
    auto va = vars_of(*a);
    auto vb = vars_of(*b);
    VarSet both = va;
    both.insert(vb.begin(), vb.end());
    EXPECT_EQ(vars_of(*join(a, b)), both);
    EXPECT_EQ(vars_of(*filter(a, eq(term_expr(iri("a")), term_expr(iri("b"))))), va);
  }
}

TEST(Properties, PrintParseRoundTrip) {
  qcsolve::testing::Rng rng(2024);
  qcsolve::testing::CanonicalGen gen(rng);
  for (int i = 0; i < 500; ++i) {
    Query q = gen.query(3);
    std::string text = to_string(q);
    Query back;
    ASSERT_NO_THROW(back = parse_query(text)) << text;
    EXPECT_TRUE(equal(q, back)) << text << "\n" << to_string(back);
  }
}

}  // namespace
