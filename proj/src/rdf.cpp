#include "qcsolve/rdf.hpp"

#include <cctype>

#include "qcsolve/error.hpp"

namespace qcsolve::rdf {

RdfTerm RdfTerm::iri(std::string iri) {
  return RdfTerm{TermKind::Iri, std::move(iri), std::nullopt};
}
RdfTerm RdfTerm::blank(std::string label) {
  return RdfTerm{TermKind::BlankNode, std::move(label), std::nullopt};
}
RdfTerm RdfTerm::literal(std::string lexical,
                         std::optional<std::string> datatype) {
  return RdfTerm{TermKind::Literal, std::move(lexical), std::move(datatype)};
}
RdfTerm RdfTerm::err() { return RdfTerm{TermKind::Err, "", std::nullopt}; }

RdfTerm from_syntax(const syntax::Term& t) {
  switch (t.kind) {
    case syntax::TermKind::Iri:
      return RdfTerm::iri(t.lexical);
    case syntax::TermKind::Literal:
      return RdfTerm::literal(t.lexical, t.datatype);
    default:
      throw Error("from_syntax: " + syntax::to_string(t) + " is not a constant");
  }
}

void Graph::insert(Triple t) {
  if (t.s.is_err() || t.p.is_err() || t.o.is_err())
    throw IllFormedTriple("err cannot occur in a triple");
  if (t.s.is_literal())
    throw IllFormedTriple("literal subject " + to_string(t.s));
  if (t.p.kind != TermKind::Iri)
    throw IllFormedTriple("predicate must be an IRI: " + to_string(t.p));
  triples_.insert(std::move(t));
}

const Graph& empty_graph() {
  static const Graph g;
  return g;
}

const Graph& df(const Dataset& d) { return d.default_graph; }

std::set<std::string> names(const Dataset& d) {
  std::set<std::string> out;
  for (const auto& [iri, g] : d.named) out.insert(iri);
  return out;
}

const Graph& gr(const Dataset& d, const std::string& iri) {
  auto it = d.named.find(iri);
  return it == d.named.end() ? empty_graph() : it->second;
}

Graph merge(const std::vector<const Graph*>& graphs) {
  Graph out;
  for (const Graph* g : graphs) {
    for (const auto& t : *g) out.insert(t);
  }
  return out;
}

Dataset query_dataset(const syntax::Query& q, const Dataset& global) {
  if (q.from.empty() && q.from_named.empty()) return global;
  Dataset d;
  std::vector<const Graph*> from;
  for (const auto& i : q.from) from.push_back(&gr(global, i));
  d.default_graph = merge(from);
  for (const auto& i : q.from_named) d.named[i] = gr(global, i);
  return d;
}

RdfTerm dt(const RdfTerm& l) {
  if (!l.is_literal()) throw NotALiteral(to_string(l) + " is not a literal");
  return RdfTerm::iri(l.datatype ? *l.datatype
                                 : std::string(syntax::kXsdString));
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_string(const RdfTerm& t) {
  switch (t.kind) {
    case TermKind::Iri:
      return "<" + t.lexical + ">";
    case TermKind::BlankNode:
      return "_:" + t.lexical;
    case TermKind::Literal: {
      std::string out = "\"" + escape(t.lexical) + "\"";
      if (t.datatype) out += "^^<" + *t.datatype + ">";
      return out;
    }
    case TermKind::Err:
      return "err";
  }
  return {};
}

std::string to_string(const Triple& t) {
  return to_string(t.s) + " " + to_string(t.p) + " " + to_string(t.o);
}

// ---------------------------------------------------------------------------
// N-Quads

namespace {

class QuadLine {
 public:
  QuadLine(std::string_view line, int lineno) : s_(line), lineno_(lineno) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, lineno_, static_cast<int>(pos_) + 1);
  }

  RdfTerm term() {
    char c = peek();
    if (c == '<') {
      auto end = s_.find('>', pos_);
      if (end == std::string_view::npos) fail("unterminated IRI");
      std::string iri(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return RdfTerm::iri(iri);
    }
    if (c == '_' && pos_ + 1 < s_.size() && s_[pos_ + 1] == ':') {
      pos_ += 2;
      size_t start = pos_;
      while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      // A trailing '.' directly after a label is the statement terminator.
      if (pos_ > start && s_[pos_ - 1] == '.' && at_terminal(pos_)) --pos_;
      if (pos_ == start) fail("empty blank node label");
      return RdfTerm::blank(std::string(s_.substr(start, pos_ - start)));
    }
    if (c == '"') {
      ++pos_;
      std::string lex;
      while (true) {
        if (pos_ >= s_.size()) fail("unterminated literal");
        char d = s_[pos_];
        if (d == '"') {
          ++pos_;
          break;
        }
        if (d == '\\') {
          if (pos_ + 1 >= s_.size()) fail("dangling escape");
          char e = s_[pos_ + 1];
          switch (e) {
            case '"':
            case '\\':
              lex += e;
              break;
            case 'n':
              lex += '\n';
              break;
            case 'r':
              lex += '\r';
              break;
            case 't':
              lex += '\t';
              break;
            default:
              fail("unsupported escape");
          }
          pos_ += 2;
          continue;
        }
        lex += d;
        ++pos_;
      }
      if (s_.substr(pos_, 2) == "^^") {
        pos_ += 2;
        if (peek() != '<') fail("expected datatype IRI");
        RdfTerm dt = term();
        return RdfTerm::literal(lex, dt.lexical);
      }
      if (pos_ < s_.size() && s_[pos_] == '@') fail("language tags are not supported");
      return RdfTerm::literal(lex);
    }
    fail("expected an RDF term");
  }

  void expect_dot() {
    if (peek() != '.') fail("expected '.'");
    ++pos_;
    if (!at_end()) fail("trailing characters after '.'");
  }

 private:
  bool at_terminal(size_t p) const {
    for (size_t i = p; i < s_.size(); ++i) {
      if (s_[i] == '#') return true;
      if (!std::isspace(static_cast<unsigned char>(s_[i]))) return false;
    }
    return true;
  }

  std::string_view s_;
  int lineno_;
  size_t pos_ = 0;
};

RdfTerm rename_blank(const RdfTerm& t, const std::string& graph_id) {
  if (t.kind != TermKind::BlankNode) return t;
  std::string suffix = "@" + graph_id;
  if (t.lexical.size() > suffix.size() &&
      t.lexical.compare(t.lexical.size() - suffix.size(), suffix.size(),
                        suffix) == 0)
    return t;
  return RdfTerm::blank(t.lexical + suffix);
}

}  // namespace

Dataset parse_nquads(std::string_view text) {
  Dataset d;
  int lineno = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++lineno;
    start = end + 1;
    QuadLine q(line, lineno);
    if (q.at_end()) {
      if (end == text.size()) break;
      continue;
    }
    RdfTerm s = q.term();
    RdfTerm p = q.term();
    RdfTerm o = q.term();
    std::optional<RdfTerm> g;
    if (q.peek() != '.') {
      g = q.term();
      if (g->kind != TermKind::Iri) q.fail("graph label must be an IRI");
    }
    q.expect_dot();
    if (s.is_literal())
      throw IllFormedTriple("line " + std::to_string(lineno) +
                            ": literal in subject position");
    if (p.kind != TermKind::Iri)
      throw IllFormedTriple("line " + std::to_string(lineno) +
                            ": predicate must be an IRI");
    std::string graph_id = g ? g->lexical : "default";
    Triple t{rename_blank(s, graph_id), p, rename_blank(o, graph_id)};
    if (g) {
      d.named[g->lexical].insert(std::move(t));
    } else {
      d.default_graph.insert(std::move(t));
    }
    if (end == text.size()) break;
  }
  return d;
}

std::string to_nquads(const Dataset& d) {
  std::string out;
  for (const auto& t : d.default_graph) out += to_string(t) + " .\n";
  for (const auto& [iri, g] : d.named) {
    for (const auto& t : g) out += to_string(t) + " <" + iri + "> .\n";
  }
  return out;
}

}  // namespace qcsolve::rdf
