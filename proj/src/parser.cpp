// Recursive-descent parser for the supported SPARQL subset.

#include <algorithm>
#include <cctype>
#include <map>

#include "qcsolve/error.hpp"
#include "qcsolve/syntax.hpp"

namespace qcsolve::syntax {

namespace {

enum class Tok {
  Iri,     // <...>
  PName,   // prefix:local
  Var,     // ?x
  Blank,   // _:b
  String,  // "..."
  Word,    // keywords and bare identifiers
  Number,
  Punct,
  End,
};

struct Token {
  Tok kind;
  std::string text;  // for PName: "prefix:local"; for String: unescaped
  int line;
  int col;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw SyntaxError(msg, line_, col_);
  }

  char peek(size_t off = 0) const {
    return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
  }

  void advance(size_t n = 1) {
    for (size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string take_name() {
    std::string out;
    while (is_name_char(peek())) {
      out += peek();
      advance();
    }
    return out;
  }

  Token next() {
    int line = line_, col = col_;
    auto make = [&](Tok k, std::string s) { return Token{k, std::move(s), line, col}; };
    char c = peek();

    if (c == '<') {
      size_t end = pos_ + 1;
      while (end < text_.size()) {
        char d = text_[end];
        if (d == '>' || std::isspace(static_cast<unsigned char>(d)) ||
            d == '<' || d == '"' || d == '{' || d == '}')
          break;
        ++end;
      }
      if (end < text_.size() && text_[end] == '>') {
        std::string iri(text_.substr(pos_ + 1, end - pos_ - 1));
        advance(end - pos_ + 1);
        return make(Tok::Iri, iri);
      }
      advance();
      if (peek() == '=') {
        advance();
        return make(Tok::Punct, "<=");
      }
      return make(Tok::Punct, "<");
    }
    if (c == '?' || c == '$') {
      advance();
      std::string name = take_name();
      if (name.empty()) fail("expected variable name");
      return make(Tok::Var, name);
    }
    if (c == '_' && peek(1) == ':') {
      advance(2);
      std::string label = take_name();
      if (label.empty()) fail("expected blank node label");
      return make(Tok::Blank, label);
    }
    if (c == '"') {
      advance();
      std::string s;
      while (true) {
        if (pos_ >= text_.size()) fail("unterminated string literal");
        char d = peek();
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\\') {
          char e = peek(1);
          if (e != '"' && e != '\\') fail("unsupported escape in literal");
          s += e;
          advance(2);
          continue;
        }
        s += d;
        advance();
      }
      return make(Tok::String, s);
    }
    if (c == '\'') {
      throw UnsupportedFeature("line " + std::to_string(line) +
                               ": single-quoted literals are not supported");
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
        if (peek() == '.' && !std::isdigit(static_cast<unsigned char>(peek(1))))
          break;
        num += peek();
        advance();
      }
      return make(Tok::Number, num);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':') {
      std::string prefix;
      if (c != ':') prefix = take_name();
      if (peek() == ':') {
        advance();
        std::string local = take_name();
        return make(Tok::PName, prefix + ":" + local);
      }
      return make(Tok::Word, prefix);
    }
    static const char* kTwo[] = {"&&", "||", "^^", "!=", ">=", "<="};
    for (const char* t : kTwo) {
      if (peek() == t[0] && peek(1) == t[1]) {
        advance(2);
        return make(Tok::Punct, t);
      }
    }
    if (std::string_view("{}().*=!,;>+-/@[]|^").find(c) != std::string_view::npos) {
      advance();
      return make(Tok::Punct, std::string(1, c));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::set<std::string>& unsupported_words() {
  static const std::set<std::string> words = {
      "distinct", "reduced", "order",   "limit",     "offset",   "group",
      "having",   "values",  "bind",    "service",   "construct", "ask",
      "describe", "base",    "exists",  "not",       "in",       "as",
      "load",     "insert",  "delete",  "with",      "true",     "false",
      "by",       "asc",     "desc",    "undef",     "count",    "sum",
      "min",      "max",     "avg",     "sample",    "group_concat"};
  return words;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts)
      : toks_(std::move(toks)), opts_(opts) {
    prefixes_["rdf"] = std::string(kRdfNs);
    prefixes_["xsd"] = std::string(kXsdNs);
    prefixes_[""] = std::string(kDefaultBase);
  }

  Query parse() {
    while (is_word("prefix")) {
      ++pos_;
      const Token& t = cur();
      if (t.kind != Tok::PName || t.text.back() != ':')
        fail("expected prefix name after PREFIX");
      std::string name = t.text.substr(0, t.text.size() - 1);
      ++pos_;
      if (cur().kind != Tok::Iri) fail("expected IRI in PREFIX declaration");
      prefixes_[name] = cur().text;
      ++pos_;
    }
    if (is_word("base")) unsupported("BASE declarations");
    Query q = parse_select(/*top_level=*/true);
    if (cur().kind == Tok::Word) {
      std::string w = lower(cur().text);
      if (unsupported_words().count(w)) unsupported("solution modifier " + w);
    }
    if (cur().kind != Tok::End) fail("unexpected trailing input");
    return q;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(size_t n) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, cur().line, cur().col);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedFeature("line " + std::to_string(cur().line) + ":" +
                             std::to_string(cur().col) + ": " + what +
                             " is not supported");
  }

  bool is_word(std::string_view w) const {
    return cur().kind == Tok::Word && lower(cur().text) == w;
  }
  bool is_punct(std::string_view p) const {
    return cur().kind == Tok::Punct && cur().text == p;
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    ++pos_;
  }

  void check_word_supported() const {
    if (cur().kind == Tok::Word && unsupported_words().count(lower(cur().text)))
      unsupported("keyword " + cur().text);
  }

  Query parse_select(bool top_level) {
    if (is_word("ask") || is_word("construct") || is_word("describe"))
      unsupported(cur().text + " queries");
    if (!is_word("select")) fail("expected SELECT");
    ++pos_;
    check_word_supported();
    Query q;
    if (is_punct("*")) {
      ++pos_;
    } else {
      std::vector<Term> vars;
      while (cur().kind == Tok::Var) {
        vars.push_back(variable(cur().text));
        ++pos_;
      }
      if (is_punct("(")) unsupported("select expressions");
      if (vars.empty()) fail("expected '*' or variables after SELECT");
      q.select = std::move(vars);
    }
    while (is_word("from")) {
      if (!top_level) fail("FROM is not allowed inside a subquery");
      ++pos_;
      bool named = false;
      if (is_word("named")) {
        named = true;
        ++pos_;
      }
      std::string iri = parse_iri_value();
      (named ? q.from_named : q.from).push_back(iri);
    }
    if (is_word("where")) ++pos_;
    check_word_supported();
    expect_punct("{");
    q.pattern = parse_group_body();
    expect_punct("}");
    return q;
  }

  Term variable(const std::string& name) const {
    if (!opts_.allow_reserved_names && name.rfind(kReservedPrefix, 0) == 0)
      fail("variable names starting with ?" + std::string(kReservedPrefix) +
           " are reserved");
    return Term::var(name);
  }

  std::string expand_pname(const std::string& pname) const {
    auto colon = pname.find(':');
    std::string prefix = pname.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + "'");
    return it->second + pname.substr(colon + 1);
  }

  std::string parse_iri_value() {
    if (cur().kind == Tok::Iri) {
      std::string s = cur().text;
      ++pos_;
      return s;
    }
    if (cur().kind == Tok::PName) {
      std::string s = expand_pname(cur().text);
      ++pos_;
      return s;
    }
    fail("expected IRI");
  }

  // Any RDF term or variable; position checks are done by callers.
  Term parse_term() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var: {
        Term v = variable(t.text);
        ++pos_;
        return v;
      }
      case Tok::Blank:
        ++pos_;
        return Term::blank(t.text);
      case Tok::Iri:
      case Tok::PName:
        return Term::iri(parse_iri_value());
      case Tok::String: {
        std::string lex = t.text;
        ++pos_;
        if (is_punct("@")) unsupported("language-tagged literals");
        if (is_punct("^^")) {
          ++pos_;
          return Term::literal(lex, parse_iri_value());
        }
        return Term::literal(lex);
      }
      case Tok::Number:
        unsupported("numeric literals (use a typed literal)");
      case Tok::Punct:
        if (t.text == "[") unsupported("anonymous blank nodes");
        if (t.text == "(") unsupported("RDF collections");
        break;
      default:
        break;
    }
    fail("expected an RDF term or variable");
  }

  PatternPtr parse_group_body() {
    PatternPtr acc;
    auto append = [&acc](PatternPtr item) {
      acc = acc ? join(acc, item) : item;
    };
    auto need_acc = [&](const char* what) {
      if (!acc) fail(std::string(what) + " needs a pattern on its left");
    };
    while (!is_punct("}")) {
      if (cur().kind == Tok::End) fail("unexpected end of input, expected '}'");
      if (is_punct(".")) {
        ++pos_;
        continue;
      }
      if (is_punct("{")) {
        auto [inner, is_sub] = parse_braced();
        if (is_word("union")) {
          PatternPtr u = inner;
          while (is_word("union")) {
            ++pos_;
            auto [rhs, rsub] = parse_braced();
            (void)rsub;
            u = union_of(u, rhs);
          }
          append(u);
        } else {
          append(is_sub ? inner : group(inner));
        }
        continue;
      }
      if (is_word("optional") || is_word("minus") || is_word("diff")) {
        std::string kw = lower(cur().text);
        need_acc(kw.c_str());
        ++pos_;
        auto [rhs, rsub] = parse_braced();
        (void)rsub;
        if (kw == "optional") acc = optional(acc, rhs);
        else if (kw == "minus") acc = minus(acc, rhs);
        else acc = diff(acc, rhs);
        continue;
      }
      if (is_word("filter")) {
        need_acc("filter");
        int line = cur().line, col = cur().col;
        ++pos_;
        CondPtr r;
        if (is_punct("(")) {
          ++pos_;
          r = parse_or();
          expect_punct(")");
        } else if (cur().kind == Tok::Word) {
          r = parse_primary();
        } else {
          fail("expected '(' after FILTER");
        }
        auto rv = vars_of(*r);
        auto pv = vars_of(*acc);
        for (const auto& v : rv) {
          if (!pv.count(v)) {
            throw FilterScopeError(
                "line " + std::to_string(line) + ":" + std::to_string(col) +
                ": filter variable " + to_string(v) +
                " does not occur in the pattern it applies to");
          }
        }
        acc = filter(acc, r);
        continue;
      }
      if (is_word("graph")) {
        ++pos_;
        Term g;
        if (cur().kind == Tok::Var) {
          g = variable(cur().text);
          ++pos_;
        } else if (cur().kind == Tok::Iri || cur().kind == Tok::PName) {
          g = Term::iri(parse_iri_value());
        } else {
          fail("expected variable or IRI after GRAPH");
        }
        auto [inner, is_sub] = parse_braced();
        (void)is_sub;
        append(g.kind == TermKind::Variable ? graph_var(g, inner)
                                            : graph_iri(g, inner));
        continue;
      }
      if (cur().kind == Tok::Word && lower(cur().text) != "a") {
        check_word_supported();
        fail("unexpected keyword '" + cur().text + "'");
      }
      parse_triples(append);
    }
    if (!acc) fail("empty group pattern");
    return acc;
  }

  // `{ body }` or `{ select ... }`. Returns the inner pattern (a SubQuery node
  // for the latter) and whether it was a subquery.
  std::pair<PatternPtr, bool> parse_braced() {
    expect_punct("{");
    if (is_word("select")) {
      Query sub = parse_select(/*top_level=*/false);
      expect_punct("}");
      return {subquery(std::move(sub)), true};
    }
    PatternPtr inner = parse_group_body();
    expect_punct("}");
    return {inner, false};
  }

  template <typename F>
  void parse_triples(F& append) {
    Term s = parse_term();
    if (s.kind == TermKind::Literal) fail("literal in subject position");
    while (true) {
      Term p;
      if (is_word("a")) {
        ++pos_;
        p = Term::iri(std::string(kRdfType));
      } else {
        if (is_punct("^") || is_punct("|") || is_punct("/"))
          unsupported("property paths");
        p = parse_term();
      }
      if (p.kind == TermKind::Literal || p.kind == TermKind::BlankNode)
        fail("predicate must be an IRI or variable");
      if (is_punct("/") || is_punct("|") || is_punct("*") || is_punct("+"))
        unsupported("property paths");
      while (true) {
        Term o = parse_term();
        append(triple(s, p, o));
        if (!is_punct(",")) break;
        ++pos_;
      }
      if (!is_punct(";")) break;
      ++pos_;
      if (is_punct(".") || is_punct("}")) break;
    }
    if (is_punct("/") || is_punct("|") || is_punct("*") || is_punct("+"))
      unsupported("property paths");
  }

  CondPtr parse_or() {
    CondPtr c = parse_and();
    while (is_punct("||")) {
      ++pos_;
      c = disj(c, parse_and());
    }
    return c;
  }

  CondPtr parse_and() {
    CondPtr c = parse_unary();
    while (is_punct("&&")) {
      ++pos_;
      c = conj(c, parse_unary());
    }
    return c;
  }

  CondPtr parse_unary() {
    if (is_punct("!")) {
      ++pos_;
      return negate(parse_unary());
    }
    return parse_primary();
  }

  CondPtr parse_primary() {
    if (is_punct("(")) {
      ++pos_;
      CondPtr c = parse_or();
      expect_punct(")");
      return paren(c);
    }
    if (is_word("isliteral")) {
      ++pos_;
      expect_punct("(");
      ExprPtr e = parse_expr();
      expect_punct(")");
      return is_literal(e);
    }
    ExprPtr lhs = parse_expr();
    if (is_punct("=")) {
      ++pos_;
      return eq(lhs, parse_expr());
    }
    if (cur().kind == Tok::Punct &&
        (cur().text == "!=" || cur().text == "<" || cur().text == ">" ||
         cur().text == "<=" || cur().text == ">=" || cur().text == "+" ||
         cur().text == "-" || cur().text == "*" || cur().text == "/"))
      unsupported("operator '" + cur().text + "'");
    fail("expected '=' in condition");
  }

  ExprPtr parse_expr() {
    if (cur().kind == Tok::Word) {
      std::string w = lower(cur().text);
      if (w == "datatype") {
        ++pos_;
        expect_punct("(");
        ExprPtr e = parse_expr();
        expect_punct(")");
        return datatype_expr(e);
      }
      if (ahead(1).kind == Tok::Punct && ahead(1).text == "(")
        unsupported("built-in function " + cur().text);
      check_word_supported();
      fail("unexpected word '" + cur().text + "' in expression");
    }
    if (cur().kind == Tok::Blank) fail("blank nodes are not allowed in expressions");
    return term_expr(parse_term());
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  ParseOptions opts_;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace

Query parse_query(std::string_view text, const ParseOptions& opts) {
  Parser p(Lexer(text).run(), opts);
  return p.parse();
}

}  // namespace qcsolve::syntax
