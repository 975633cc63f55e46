#include "kgforge/sparql/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "../rdf/utf8.hpp"
#include "kgforge/rdf/vocabulary.hpp"

namespace kgforge::sparql {

namespace {

using rdf::Term;

enum class Tok { End, Iri, PName, Var, String, LangTag, Integer, Decimal, Double, Blank, Word, Punct };

struct Token {
  Tok type = Tok::End;
  std::string text;    // decoded value: IRI, variable name, string content, word, punctuation
  std::string prefix;  // PName prefix; text holds the local part
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool is_name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '-' || c >= 0x80; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = pos_ - line_start_ + 1;
      t.begin = pos_;
      if (pos_ >= text_.size()) {
        t.end = pos_;
        out.push_back(t);
        return out;
      }
      lex(t);
      t.end = pos_;
      out.push_back(std::move(t));
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, pos_ - line_start_ + 1, msg); }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        return;
      }
    }
  }

  bool try_iriref(Token& t) {
    std::size_t i = pos_ + 1;
    while (i < text_.size()) {
      auto c = static_cast<unsigned char>(text_[i]);
      if (c == '>') break;
      if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`' || c == '\\') {
        return false;
      }
      ++i;
    }
    if (i >= text_.size()) return false;
    t.type = Tok::Iri;
    t.text = std::string(text_.substr(pos_ + 1, i - pos_ - 1));
    pos_ = i + 1;
    return true;
  }

  void lex_string(Token& t) {
    char q = peek();
    bool long_form = peek(1) == q && peek(2) == q;
    std::size_t delim = long_form ? 3 : 1;
    for (std::size_t k = 0; k < delim; ++k) advance();
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated string");
      char c = peek();
      if (long_form) {
        if (c == q && peek(1) == q && peek(2) == q) {
          pos_ += 3;
          break;
        }
      } else if (c == q) {
        advance();
        break;
      } else if (c == '\n' || c == '\r') {
        fail("line break in string");
      }
      if (c == '\\') {
        advance();
        char e = peek();
        switch (e) {
          case 't': out += '\t'; break;
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case '"': out += '"'; break;
          case '\'': out += '\''; break;
          case '\\': out += '\\'; break;
          case 'u':
          case 'U': {
            std::size_t n = e == 'u' ? 4 : 8;
            if (pos_ + n >= text_.size()) fail("bad unicode escape");
            std::string hex(text_.substr(pos_ + 1, n));
            if (!std::all_of(hex.begin(), hex.end(), [](char h) { return std::isxdigit(static_cast<unsigned char>(h)); })) {
              fail("bad unicode escape");
            }
            rdf::detail::append_utf8(out, static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
            pos_ += n;
            break;
          }
          default: fail("bad escape sequence");
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    t.type = Tok::String;
    t.text = std::move(out);
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    bool dot = false;
    bool exp = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      dot = true;
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        exp = true;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    t.type = exp ? Tok::Double : dot ? Tok::Decimal : Tok::Integer;
    t.text = std::string(text_.substr(start, pos_ - start));
  }

  // Name characters including '.', without a trailing '.'.
  std::string read_local() {
    std::string out;
    for (;;) {
      auto c = static_cast<unsigned char>(peek());
      if (is_name_char(c) || c == ':') {
        out += static_cast<char>(c);
        ++pos_;
      } else if (c == '.' && (is_name_char(static_cast<unsigned char>(peek(1))) || peek(1) == ':')) {
        out += '.';
        ++pos_;
      } else if (c == '%' && std::isxdigit(static_cast<unsigned char>(peek(1))) &&
                 std::isxdigit(static_cast<unsigned char>(peek(2)))) {
        out += std::string(text_.substr(pos_, 3));
        pos_ += 3;
      } else if (c == '\\' && peek(1) != '\0' && std::string_view("_~.-!$&'()*+,;=/?#@%").find(peek(1)) !=
                                                       std::string_view::npos) {
        out += peek(1);
        pos_ += 2;
      } else {
        break;
      }
    }
    return out;
  }

  void lex(Token& t) {
    char c = peek();
    auto uc = static_cast<unsigned char>(c);
    if (c == '<') {
      if (try_iriref(t)) return;
      ++pos_;
      t.type = Tok::Punct;
      t.text = "<";
      if (peek() == '=') {
        ++pos_;
        t.text = "<=";
      }
      return;
    }
    if (c == '"' || c == '\'') return lex_string(t);
    if (c == '?' || c == '$') {
      if (is_name_start(static_cast<unsigned char>(peek(1))) || std::isdigit(static_cast<unsigned char>(peek(1)))) {
        ++pos_;
        std::string name;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
               static_cast<unsigned char>(peek()) >= 0x80) {
          name += peek();
          ++pos_;
        }
        t.type = Tok::Var;
        t.text = std::move(name);
        return;
      }
    }
    if (c == '@' && std::isalpha(static_cast<unsigned char>(peek(1)))) {
      ++pos_;
      std::string tag;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') {
        tag += peek();
        ++pos_;
      }
      t.type = Tok::LangTag;
      t.text = std::move(tag);
      return;
    }
    if (std::isdigit(uc) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) return lex_number(t);
    if (c == '_' && peek(1) == ':') {
      pos_ += 2;
      t.type = Tok::Blank;
      t.text = read_local();
      if (t.text.empty()) fail("empty blank node label");
      return;
    }
    if (is_name_start(uc) || c == ':') {
      std::string word;
      while (is_name_char(static_cast<unsigned char>(peek())) ||
             (peek() == '.' && is_name_char(static_cast<unsigned char>(peek(1))))) {
        word += peek();
        ++pos_;
      }
      if (peek() == ':') {
        ++pos_;
        t.type = Tok::PName;
        t.prefix = std::move(word);
        t.text = read_local();
        return;
      }
      t.type = Tok::Word;
      t.text = std::move(word);
      return;
    }
    static const char* const kTwo[] = {"!=", ">=", "&&", "||", "^^"};
    for (const char* p : kTwo) {
      if (c == p[0] && peek(1) == p[1]) {
        pos_ += 2;
        t.type = Tok::Punct;
        t.text = p;
        return;
      }
    }
    if (std::string_view("{}()[].;,*=>!+-/^|?").find(c) != std::string_view::npos) {
      ++pos_;
      t.type = Tok::Punct;
      t.text = std::string(1, c);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

const std::set<std::string> kBuiltins = {
    "STR",      "LANG",      "LANGMATCHES", "DATATYPE", "BOUND",   "IRI",       "URI",       "CONCAT",
    "ENCODE_FOR_URI", "CONTAINS", "STRSTARTS", "STRENDS", "STRLEN", "LCASE", "UCASE", "REGEX",
    "ISIRI",    "ISURI",     "ISBLANK",     "ISLITERAL", "ISNUMERIC", "COALESCE", "IF", "SAMETERM"};
const std::set<std::string> kAggregates = {"COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT"};
const std::set<std::string> kCasts = {
    std::string(rdf::vocab::kXsdInteger), std::string(rdf::vocab::kXsdFloat),
    std::string(rdf::vocab::kXsdDecimal), std::string(rdf::vocab::kXsdDouble),
    std::string(rdf::vocab::kXsdString), std::string(rdf::vocab::kXsdBoolean)};

std::pair<int, int> arity(const std::string& name) {
  if (name == "CONCAT") return {0, -1};
  if (name == "COALESCE") return {1, -1};
  if (name == "REGEX") return {2, 3};
  if (name == "IF") return {3, 3};
  if (name == "LANGMATCHES" || name == "CONTAINS" || name == "STRSTARTS" || name == "STRENDS" ||
      name == "SAMETERM") {
    return {2, 2};
  }
  return {1, 1};
}

ExprPtr make(ExprKind kind, std::vector<ExprPtr> args = {}, std::string name = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->args = std::move(args);
  e->name = std::move(name);
  return e;
}

ExprPtr make_const(Term t) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Const;
  e->constant = std::move(t);
  return e;
}

ExprPtr make_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  return e;
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> tokens) : text_(text), toks_(std::move(tokens)) {}

  Query parse() {
    prologue();
    if (!is_word("SELECT")) {
      for (const char* form : {"CONSTRUCT", "ASK", "DESCRIBE"}) {
        if (is_word(form)) unsupported(std::string(form) + " query");
      }
      for (const char* form : {"INSERT", "DELETE", "LOAD", "CLEAR", "DROP", "CREATE", "WITH"}) {
        if (is_word(form)) unsupported("SPARQL Update");
      }
      error("expected SELECT");
    }
    next();
    select_clause();
    if (is_word("FROM")) unsupported("FROM dataset clause");
    if (is_word("WHERE")) next();
    if (!is_punct("{")) error("expected '{' to start WHERE clause");
    q_.where = *group_graph_pattern();
    solution_modifiers();
    if (is_word("VALUES")) {
      next();
      q_.values = values_block();
    }
    if (peek().type != Tok::End) error("unexpected content after query");
    validate();
    return std::move(q_);
  }

 private:
  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  Query q_;
  std::size_t anon_ = 0;
  bool aggregates_allowed_ = false;

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::End: return "end of input";
      case Tok::Var: return "'?" + t.text + "'";
      case Tok::Iri: return "'<" + t.text + ">'";
      case Tok::PName: return "'" + t.prefix + ":" + t.text + "'";
      case Tok::String: return "string literal";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void error(const std::string& msg) const {
    const auto& t = peek();
    throw SyntaxError(t.line, t.column, msg + ", found " + describe(t));
  }
  [[noreturn]] void unsupported(const std::string& feature) const {
    const auto& t = peek();
    throw UnsupportedFeature(feature, t.line, t.column);
  }

  bool is_word(std::string_view w) const { return peek().type == Tok::Word && upper(peek().text) == w; }
  bool clause_keyword() const {
    return is_word("HAVING") || is_word("ORDER") || is_word("LIMIT") || is_word("OFFSET") || is_word("VALUES");
  }
  bool is_keyword() const {
    return peek().type == Tok::Word && !is_word("A") && !is_word("TRUE") && !is_word("FALSE");
  }
  bool is_punct(std::string_view p) const { return peek().type == Tok::Punct && peek().text == p; }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) error("expected '" + std::string(p) + "'");
    next();
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) error("expected " + std::string(w));
    next();
  }

  std::string resolve(const std::string& iri) const {
    if (q_.base.empty() || rdf::has_uri_scheme(iri)) return iri;
    return q_.base + iri;
  }

  Term iri_term(const Token& t) const {
    std::string value;
    if (t.type == Tok::Iri) {
      value = resolve(t.text);
    } else {
      auto ns = q_.prefixes.find(t.prefix);
      if (!ns) throw SyntaxError(t.line, t.column, "undeclared prefix '" + t.prefix + ":'");
      value = std::string(*ns) + t.text;
    }
    try {
      return Term::iri(value);
    } catch (const rdf::TermError& e) {
      throw SyntaxError(t.line, t.column, e.what());
    }
  }

  void prologue() {
    for (;;) {
      if (is_word("PREFIX")) {
        next();
        if (peek().type != Tok::PName || !peek().text.empty()) error("expected prefix name");
        std::string label = next().prefix;
        if (peek().type != Tok::Iri) error("expected IRI");
        std::string ns = resolve(next().text);
        try {
          q_.prefixes.set(label, ns);
        } catch (const std::invalid_argument& e) {
          error(e.what());
        }
      } else if (is_word("BASE")) {
        next();
        if (peek().type != Tok::Iri) error("expected IRI");
        q_.base = next().text;
      } else {
        return;
      }
    }
  }

  void select_clause() {
    if (is_word("DISTINCT")) {
      next();
      q_.distinct = true;
    } else if (is_word("REDUCED")) {
      next();
      q_.reduced = true;
    }
    if (is_punct("*")) {
      next();
      q_.select_all = true;
      return;
    }
    aggregates_allowed_ = true;
    while (peek().type == Tok::Var || is_punct("(")) {
      if (peek().type == Tok::Var) {
        q_.projection.push_back({next().text, nullptr});
        continue;
      }
      next();
      auto e = expression();
      expect_word("AS");
      if (peek().type != Tok::Var) error("expected variable after AS");
      std::string var = next().text;
      expect_punct(")");
      q_.projection.push_back({var, e});
    }
    aggregates_allowed_ = false;
    if (q_.projection.empty()) error("expected projection variables or '*'");
  }

  void solution_modifiers() {
    aggregates_allowed_ = true;
    if (is_word("GROUP")) {
      next();
      expect_word("BY");
      do {
        if (peek().type == Tok::Var) {
          auto name = next().text;
          q_.group_by.push_back({make_var(name), name});
        } else if (is_punct("(")) {
          next();
          auto e = expression();
          std::string alias;
          if (is_word("AS")) {
            next();
            if (peek().type != Tok::Var) error("expected variable after AS");
            alias = next().text;
          }
          expect_punct(")");
          q_.group_by.push_back({e, alias});
        } else {
          q_.group_by.push_back({primary(), ""});
        }
      } while (peek().type == Tok::Var || is_punct("(") || (peek().type == Tok::Word && !clause_keyword()) ||
               peek().type == Tok::PName || peek().type == Tok::Iri);
    }
    if (is_word("HAVING")) {
      next();
      do {
        q_.having.push_back(constraint());
      } while (is_punct("(") || (peek().type == Tok::Word && !clause_keyword()));
    }
    if (is_word("ORDER")) {
      next();
      expect_word("BY");
      do {
        if (is_word("ASC") || is_word("DESC")) {
          bool desc = is_word("DESC");
          next();
          if (!is_punct("(")) error("expected '(' after ASC/DESC");
          q_.order_by.push_back({bracketted(), desc});
        } else if (peek().type == Tok::Var) {
          q_.order_by.push_back({make_var(next().text), false});
        } else {
          q_.order_by.push_back({constraint(), false});
        }
      } while (peek().type == Tok::Var || is_punct("(") || is_word("ASC") || is_word("DESC") ||
               (peek().type == Tok::Word && !clause_keyword()) || peek().type == Tok::PName ||
               peek().type == Tok::Iri);
    }
    aggregates_allowed_ = false;
    for (int k = 0; k < 2; ++k) {
      if (is_word("LIMIT")) {
        next();
        q_.limit = count_value();
      } else if (is_word("OFFSET")) {
        next();
        q_.offset = count_value();
      }
    }
  }

  std::size_t count_value() {
    if (peek().type != Tok::Integer) error("expected a non-negative integer");
    return static_cast<std::size_t>(std::stoull(next().text));
  }

  // ---- graph patterns

  std::shared_ptr<GroupPattern> group_graph_pattern() {
    expect_punct("{");
    if (is_word("SELECT")) unsupported("subquery");
    auto group = std::make_shared<GroupPattern>();
    for (;;) {
      if (is_punct("}")) {
        next();
        return group;
      }
      if (peek().type == Tok::End) error("expected '}'");
      if (is_keyword()) {
        std::string w = upper(peek().text);
        if (w == "FILTER") {
          next();
          group->elements.push_back(FilterElement{constraint()});
        } else if (w == "BIND") {
          next();
          expect_punct("(");
          auto e = expression();
          expect_word("AS");
          if (peek().type != Tok::Var) error("expected variable after AS");
          std::string var = next().text;
          expect_punct(")");
          group->elements.push_back(BindElement{e, var});
        } else if (w == "OPTIONAL") {
          next();
          group->elements.push_back(OptionalElement{group_graph_pattern()});
        } else if (w == "SERVICE") {
          next();
          ServiceElement s;
          if (is_word("SILENT")) {
            next();
            s.silent = true;
          }
          if (peek().type == Tok::Var) unsupported("SERVICE with variable endpoint");
          if (peek().type != Tok::Iri && peek().type != Tok::PName) error("expected endpoint IRI");
          s.endpoint = iri_term(next());
          std::size_t open = peek().end;
          s.group = group_graph_pattern();
          std::size_t close = toks_[i_ - 1].begin;
          s.text = std::string(text_.substr(open, close - open));
          group->elements.push_back(std::move(s));
        } else if (w == "VALUES") {
          next();
          group->elements.push_back(values_block());
        } else if (w == "MINUS") {
          unsupported("MINUS");
        } else if (w == "GRAPH") {
          unsupported("GRAPH");
        } else {
          error("unexpected keyword");
        }
        if (is_punct(".")) next();
        continue;
      }
      if (is_punct("{")) {
        auto first = group_graph_pattern();
        if (is_word("UNION")) {
          UnionElement u;
          u.branches.push_back(first);
          while (is_word("UNION")) {
            next();
            u.branches.push_back(group_graph_pattern());
          }
          group->elements.push_back(std::move(u));
        } else {
          group->elements.push_back(SubGroupElement{first});
        }
        if (is_punct(".")) next();
        continue;
      }
      triples_block(*group);
    }
  }

  BgpElement& current_bgp(GroupPattern& group) {
    if (group.elements.empty() || !std::holds_alternative<BgpElement>(group.elements.back())) {
      group.elements.push_back(BgpElement{});
    }
    return std::get<BgpElement>(group.elements.back());
  }

  void triples_block(GroupPattern& group) {
    std::vector<TriplePatternAst> out;
    for (;;) {
      TermOrVar subject;
      if (is_punct("[")) {
        subject = blank_property_list(out);
        if (!is_punct(".") && !is_punct("}") && peek().type != Tok::Word) property_list(subject, out);
      } else if (is_punct("(")) {
        unsupported("RDF collection");
      } else {
        subject = var_or_term();
        if (std::holds_alternative<rdf::Term>(subject) && std::get<rdf::Term>(subject).is_literal()) {
          error("literal not allowed as subject");
        }
        property_list(subject, out);
      }
      if (is_punct(".")) {
        next();
        if (is_punct("}") || is_punct("{") || is_keyword()) break;
        continue;
      }
      if (!is_punct("}") && !is_punct("{") && !is_keyword()) error("expected '.' or '}'");
      break;
    }
    auto& bgp = current_bgp(group);
    bgp.triples.insert(bgp.triples.end(), out.begin(), out.end());
  }

  void check_no_path() {
    if (is_punct("/") || is_punct("|") || is_punct("*") || is_punct("+") || is_punct("?") || is_punct("^")) {
      unsupported("property path");
    }
  }

  TermOrVar verb() {
    if (is_punct("^") || is_punct("!") || is_punct("(")) unsupported("property path");
    if (is_word("A") && peek().text == "a") {
      next();
      return Term::iri(std::string(rdf::vocab::kRdfType));
    }
    if (peek().type == Tok::Var) return Var{next().text};
    if (peek().type == Tok::Iri || peek().type == Tok::PName) return iri_term(next());
    error("expected predicate");
  }

  void property_list(const TermOrVar& subject, std::vector<TriplePatternAst>& out) {
    for (;;) {
      auto p = verb();
      check_no_path();
      for (;;) {
        TermOrVar o;
        if (is_punct("[")) {
          o = blank_property_list(out);
        } else if (is_punct("(")) {
          unsupported("RDF collection");
        } else {
          o = var_or_term();
        }
        out.push_back({subject, p, o});
        if (!is_punct(",")) break;
        next();
      }
      if (!is_punct(";")) return;
      while (is_punct(";")) next();
      if (is_punct(".") || is_punct("]") || is_punct("}")) return;
    }
  }

  TermOrVar blank_property_list(std::vector<TriplePatternAst>& out) {
    expect_punct("[");
    Var v{"_:anon" + std::to_string(anon_++)};
    if (!is_punct("]")) property_list(v, out);
    expect_punct("]");
    return v;
  }

  TermOrVar var_or_term() {
    const auto& t = peek();
    switch (t.type) {
      case Tok::Var: return Var{next().text};
      case Tok::Blank: return Var{"_:" + next().text};
      case Tok::Iri:
      case Tok::PName: return iri_term(next());
      default: break;
    }
    if (is_punct("-") || is_punct("+")) {
      std::string sign = next().text;
      if (peek().type != Tok::Integer && peek().type != Tok::Decimal && peek().type != Tok::Double) {
        error("expected number");
      }
      return numeric_literal(sign);
    }
    if (auto lit = try_literal()) return *lit;
    error("expected variable or term");
  }

  Term numeric_literal(const std::string& sign = "") {
    const auto& t = next();
    std::string dt = t.type == Tok::Integer   ? std::string(rdf::vocab::kXsdInteger)
                     : t.type == Tok::Decimal ? std::string(rdf::vocab::kXsdDecimal)
                                              : std::string(rdf::vocab::kXsdDouble);
    return Term::typed(sign == "-" ? "-" + t.text : t.text, dt);
  }

  std::optional<Term> try_literal() {
    const auto& t = peek();
    if (t.type == Tok::Integer || t.type == Tok::Decimal || t.type == Tok::Double) return numeric_literal();
    if (is_word("TRUE") || is_word("FALSE")) {
      std::string v = upper(next().text) == "TRUE" ? "true" : "false";
      return Term::typed(v, std::string(rdf::vocab::kXsdBoolean));
    }
    if (t.type != Tok::String) return std::nullopt;
    std::string lexical = next().text;
    if (peek().type == Tok::LangTag) {
      const auto& tag = next();
      try {
        return Term::lang(lexical, tag.text);
      } catch (const rdf::TermError& e) {
        throw SyntaxError(tag.line, tag.column, e.what());
      }
    }
    if (is_punct("^^")) {
      next();
      if (peek().type != Tok::Iri && peek().type != Tok::PName) error("expected datatype IRI");
      const auto& dt_tok = peek();
      auto dt = iri_term(next());
      try {
        return Term::typed(lexical, dt.value());
      } catch (const rdf::TermError& e) {
        throw SyntaxError(dt_tok.line, dt_tok.column, e.what());
      }
    }
    return Term::literal(lexical);
  }

  ValuesElement values_block() {
    ValuesElement v;
    bool single = false;
    if (peek().type == Tok::Var) {
      single = true;
      v.vars.push_back(next().text);
    } else {
      expect_punct("(");
      while (peek().type == Tok::Var) v.vars.push_back(next().text);
      expect_punct(")");
    }
    expect_punct("{");
    while (!is_punct("}")) {
      std::vector<std::optional<Term>> row;
      if (single) {
        row.push_back(data_value());
      } else {
        expect_punct("(");
        while (!is_punct(")")) row.push_back(data_value());
        next();
        if (row.size() != v.vars.size()) error("VALUES row width does not match variable list");
      }
      v.rows.push_back(std::move(row));
    }
    next();
    return v;
  }

  std::optional<Term> data_value() {
    if (is_word("UNDEF")) {
      next();
      return std::nullopt;
    }
    if (peek().type == Tok::Iri || peek().type == Tok::PName) return iri_term(next());
    if (is_punct("-") || is_punct("+")) {
      std::string sign = next().text;
      return numeric_literal(sign);
    }
    if (auto lit = try_literal()) return lit;
    error("expected data value");
  }

  // ---- expressions

  ExprPtr bracketted() {
    expect_punct("(");
    auto e = expression();
    expect_punct(")");
    return e;
  }

  ExprPtr constraint() {
    if (is_punct("(")) return bracketted();
    if (peek().type == Tok::Word || peek().type == Tok::PName || peek().type == Tok::Iri) return primary();
    error("expected constraint");
  }

  ExprPtr expression() {
    auto left = and_expr();
    while (is_punct("||")) {
      next();
      left = make(ExprKind::Or, {left, and_expr()});
    }
    return left;
  }

  ExprPtr and_expr() {
    auto left = relational();
    while (is_punct("&&")) {
      next();
      left = make(ExprKind::And, {left, relational()});
    }
    return left;
  }

  ExprPtr relational() {
    auto left = additive();
    static const std::pair<const char*, ExprKind> kOps[] = {{"=", ExprKind::Eq},  {"!=", ExprKind::Ne},
                                                            {"<", ExprKind::Lt},  {"<=", ExprKind::Le},
                                                            {">", ExprKind::Gt},  {">=", ExprKind::Ge}};
    for (const auto& [op, kind] : kOps) {
      if (is_punct(op)) {
        next();
        return make(kind, {left, additive()});
      }
    }
    bool negated = false;
    if (is_word("NOT") && peek(1).type == Tok::Word && upper(peek(1).text) == "IN") {
      next();
      negated = true;
    }
    if (is_word("IN")) {
      next();
      expect_punct("(");
      std::vector<ExprPtr> items;
      while (!is_punct(")")) {
        items.push_back(expression());
        if (is_punct(",")) next();
      }
      next();
      if (items.empty()) return make_const(Term::typed(negated ? "true" : "false", std::string(rdf::vocab::kXsdBoolean)));
      ExprPtr out;
      for (auto& item : items) {
        auto cmp = make(negated ? ExprKind::Ne : ExprKind::Eq, {left, item});
        out = out ? make(negated ? ExprKind::And : ExprKind::Or, {out, cmp}) : cmp;
      }
      return out;
    }
    return left;
  }

  ExprPtr additive() {
    auto left = multiplicative();
    for (;;) {
      if (is_punct("+")) {
        next();
        left = make(ExprKind::Add, {left, multiplicative()});
      } else if (is_punct("-")) {
        next();
        left = make(ExprKind::Sub, {left, multiplicative()});
      } else {
        return left;
      }
    }
  }

  ExprPtr multiplicative() {
    auto left = unary();
    for (;;) {
      if (is_punct("*")) {
        next();
        left = make(ExprKind::Mul, {left, unary()});
      } else if (is_punct("/")) {
        next();
        left = make(ExprKind::Div, {left, unary()});
      } else {
        return left;
      }
    }
  }

  ExprPtr unary() {
    if (is_punct("!")) {
      next();
      return make(ExprKind::Not, {unary()});
    }
    if (is_punct("-")) {
      next();
      return make(ExprKind::Neg, {unary()});
    }
    if (is_punct("+")) {
      next();
      return unary();
    }
    return primary();
  }

  std::vector<ExprPtr> arg_list() {
    expect_punct("(");
    std::vector<ExprPtr> args;
    if (is_punct(")")) {
      next();
      return args;
    }
    for (;;) {
      args.push_back(expression());
      if (is_punct(",")) {
        next();
        continue;
      }
      expect_punct(")");
      return args;
    }
  }

  ExprPtr aggregate(const std::string& name) {
    if (!aggregates_allowed_) error("aggregate not allowed here");
    next();
    expect_punct("(");
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Aggregate;
    e->name = name;
    if (is_word("DISTINCT")) {
      next();
      e->distinct = true;
    }
    if (is_punct("*")) {
      if (name != "COUNT") error("'*' is only allowed in COUNT");
      next();
      e->star = true;
    } else {
      bool saved = aggregates_allowed_;
      aggregates_allowed_ = false;
      e->args.push_back(expression());
      aggregates_allowed_ = saved;
    }
    if (name == "GROUP_CONCAT" && is_punct(";")) {
      next();
      expect_word("SEPARATOR");
      expect_punct("=");
      if (peek().type != Tok::String) error("expected separator string");
      e->constant = Term::literal(next().text);
    } else if (name == "GROUP_CONCAT") {
      e->constant = Term::literal(" ");
    }
    expect_punct(")");
    return e;
  }

  ExprPtr primary() {
    const auto& t = peek();
    if (is_punct("(")) return bracketted();
    if (t.type == Tok::Var) return make_var(next().text);
    if (t.type == Tok::Iri || t.type == Tok::PName) {
      const Token& tok = next();
      auto iri = iri_term(tok);
      if (!is_punct("(")) return make_const(iri);
      if (!kCasts.count(iri.value())) {
        throw UnsupportedFeature("function <" + iri.value() + ">", tok.line, tok.column);
      }
      auto args = arg_list();
      if (args.size() != 1) throw SyntaxError(tok.line, tok.column, "cast takes one argument");
      return make(ExprKind::Call, std::move(args), iri.value());
    }
    if (t.type == Tok::Word && !is_word("TRUE") && !is_word("FALSE")) {
      std::string name = upper(t.text);
      if (kAggregates.count(name)) return aggregate(name);
      if (name == "EXISTS" || (name == "NOT" && peek(1).type == Tok::Word && upper(peek(1).text) == "EXISTS")) {
        unsupported("EXISTS");
      }
      if (!kBuiltins.count(name)) {
        if (peek(1).type == Tok::Punct && peek(1).text == "(") unsupported("function " + t.text);
        error("unexpected word");
      }
      const Token& tok = next();
      auto args = arg_list();
      auto [lo, hi] = arity(name);
      if (static_cast<int>(args.size()) < lo || (hi >= 0 && static_cast<int>(args.size()) > hi)) {
        throw SyntaxError(tok.line, tok.column, "wrong number of arguments to " + name);
      }
      if (name == "BOUND" && args[0]->kind != ExprKind::Var) {
        throw SyntaxError(tok.line, tok.column, "BOUND takes a variable");
      }
      return make(ExprKind::Call, std::move(args), name == "URI" ? "IRI" : name == "ISURI" ? "ISIRI" : name);
    }
    if (auto lit = try_literal()) return make_const(*lit);
    error("expected expression");
  }

  // ---- checks

  void validate() {
    bool grouped = q_.is_aggregate();
    if (grouped && q_.select_all) {
      const auto& t = toks_.front();
      throw SyntaxError(t.line, t.column, "SELECT * is not allowed with GROUP BY or aggregates");
    }
    if (grouped) {
      std::set<std::string> keys;
      for (const auto& k : q_.group_by) {
        if (!k.alias.empty()) keys.insert(k.alias);
      }
      for (const auto& p : q_.projection) {
        if (!p.expr && !keys.count(p.var)) {
          const auto& t = toks_.front();
          throw SyntaxError(t.line, t.column, "variable ?" + p.var + " is neither grouped nor aggregated");
        }
        if (p.expr) keys.insert(p.var);
      }
    }
    std::set<std::string> seen;
    for (const auto& p : q_.projection) {
      if (p.expr && !seen.insert(p.var).second) {
        const auto& t = toks_.front();
        throw SyntaxError(t.line, t.column, "variable ?" + p.var + " projected twice");
      }
      seen.insert(p.var);
    }
  }
};

}  // namespace

Query parse_query(std::string_view text) {
  Lexer lexer(text);
  Parser parser(text, lexer.run());
  return parser.parse();
}

// ---------------------------------------------------------------------------
// AST helpers

namespace {

void add_unique(std::vector<std::string>& out, const std::string& name) {
  if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
}

void collect_term(const TermOrVar& t, std::vector<std::string>& out) {
  if (const auto* v = std::get_if<Var>(&t)) add_unique(out, v->name);
}

}  // namespace

void collect_variables(const Expr& expr, std::vector<std::string>& out) {
  if (expr.kind == ExprKind::Var) add_unique(out, expr.name);
  for (const auto& a : expr.args) collect_variables(*a, out);
}

bool contains_aggregate(const Expr& expr) {
  if (expr.kind == ExprKind::Aggregate) return true;
  return std::any_of(expr.args.begin(), expr.args.end(), [](const ExprPtr& a) { return contains_aggregate(*a); });
}

void collect_variables(const GroupPattern& group, std::vector<std::string>& out) {
  for (const auto& el : group.elements) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, BgpElement>) {
            for (const auto& t : e.triples) {
              collect_term(t.subject, out);
              collect_term(t.predicate, out);
              collect_term(t.object, out);
            }
          } else if constexpr (std::is_same_v<T, BindElement>) {
            add_unique(out, e.var);
          } else if constexpr (std::is_same_v<T, OptionalElement> || std::is_same_v<T, SubGroupElement> ||
                               std::is_same_v<T, ServiceElement>) {
            collect_variables(*e.group, out);
          } else if constexpr (std::is_same_v<T, UnionElement>) {
            for (const auto& b : e.branches) collect_variables(*b, out);
          } else if constexpr (std::is_same_v<T, ValuesElement>) {
            for (const auto& v : e.vars) add_unique(out, v);
          }
        },
        el);
  }
}

std::vector<std::string> Query::pattern_variables() const {
  std::vector<std::string> all;
  collect_variables(where, all);
  if (values) {
    for (const auto& v : values->vars) add_unique(all, v);
  }
  std::vector<std::string> out;
  for (auto& v : all) {
    if (v.rfind("_:", 0) != 0) out.push_back(std::move(v));
  }
  return out;
}

bool Query::is_aggregate() const {
  if (!group_by.empty()) return true;
  for (const auto& p : projection) {
    if (p.expr && contains_aggregate(*p.expr)) return true;
  }
  for (const auto& h : having) {
    if (contains_aggregate(*h)) return true;
  }
  for (const auto& o : order_by) {
    if (contains_aggregate(*o.expr)) return true;
  }
  return false;
}

}  // namespace kgforge::sparql
