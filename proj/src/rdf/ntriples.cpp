#include "kgforge/rdf/ntriples.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "utf8.hpp"

namespace kgforge::rdf {

NTriplesParseError::NTriplesParseError(std::size_t line, std::size_t offset,
                                       const std::string& message)
    : std::runtime_error("N-Triples parse error at line " + std::to_string(line) + ", byte " +
                         std::to_string(offset) + ": " + message),
      line_(line),
      offset_(offset) {}

void write_ntriples(std::ostream& out, const Triple& triple, NTriplesOptions options) {
  out << triple.to_ntriples(options.ascii_only) << '\n';
}

void write_ntriples(std::ostream& out, const std::vector<Triple>& triples,
                    NTriplesOptions options) {
  for (const auto& t : triples) write_ntriples(out, t, options);
}

std::string serialize_ntriples(const std::vector<Triple>& triples, NTriplesOptions options) {
  std::ostringstream out;
  write_ntriples(out, triples, options);
  return out.str();
}

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_number, std::size_t line_offset)
      : s_(line), line_(line_number), base_(line_offset) {}

  bool parse(Triple& out) {
    skip_ws();
    if (at_end() || peek() == '#') return false;

    Term subject = peek() == '<' ? parse_iri() : parse_blank();
    expect_ws();
    if (at_end() || peek() != '<') fail("expected predicate IRI");
    Term predicate = parse_iri();
    expect_ws();
    Term object;
    if (at_end()) fail("expected object");
    switch (peek()) {
      case '<': object = parse_iri(); break;
      case '_': object = parse_blank(); break;
      case '"': object = parse_literal(); break;
      default: fail("expected object");
    }
    skip_ws();
    if (at_end() || peek() != '.') fail("expected '.'");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected trailing content");
    out = Triple(std::move(subject), std::move(predicate), std::move(object));
    return true;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw NTriplesParseError(line_, base_ + pos_, msg);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void expect_ws() {
    auto start = pos_;
    skip_ws();
    if (pos_ == start && !at_end() && peek() != '"' && peek() != '<') fail("expected whitespace");
  }

  std::uint32_t parse_hex(int digits) {
    if (pos_ + digits > s_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      char c = s_[pos_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') cp |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') cp |= static_cast<std::uint32_t>(c - 'A' + 10);
      else fail("bad hex digit in unicode escape");
    }
    return cp;
  }

  // Reads \uXXXX or \UXXXXXXXX after the backslash has been consumed.
  bool try_uchar(std::string& out) {
    if (at_end()) return false;
    if (peek() == 'u') {
      ++pos_;
      detail::append_utf8(out, parse_hex(4));
      return true;
    }
    if (peek() == 'U') {
      ++pos_;
      detail::append_utf8(out, parse_hex(8));
      return true;
    }
    return false;
  }

  std::string parse_iri_string() {
    auto start = pos_;
    ++pos_;  // '<'
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = s_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        ++pos_;
        if (!try_uchar(value)) fail("bad escape in IRI");
        continue;
      }
      value += c;
      ++pos_;
    }
    if (!is_valid_iri(value)) {
      pos_ = start;
      fail("invalid IRI");
    }
    return value;
  }

  Term parse_iri() { return Term::iri(parse_iri_string()); }

  Term parse_blank() {
    if (s_.substr(pos_, 2) != "_:") fail("expected IRI or blank node");
    pos_ += 2;
    auto start = pos_;
    while (!at_end() && peek() != ' ' && peek() != '\t') ++pos_;
    std::string label(s_.substr(start, pos_ - start));
    if (!is_valid_blank_label(label)) {
      pos_ = start;
      fail("invalid blank node label");
    }
    return Term::blank(std::move(label));
  }

  Term parse_literal() {
    ++pos_;  // opening quote
    std::string lexical;
    while (true) {
      if (at_end()) fail("unterminated literal");
      char c = s_[pos_];
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        ++pos_;
        if (at_end()) fail("dangling escape");
        char e = peek();
        switch (e) {
          case 't': lexical += '\t'; ++pos_; continue;
          case 'b': lexical += '\b'; ++pos_; continue;
          case 'n': lexical += '\n'; ++pos_; continue;
          case 'r': lexical += '\r'; ++pos_; continue;
          case 'f': lexical += '\f'; ++pos_; continue;
          case '"': lexical += '"'; ++pos_; continue;
          case '\'': lexical += '\''; ++pos_; continue;
          case '\\': lexical += '\\'; ++pos_; continue;
          default:
            if (!try_uchar(lexical)) fail("unknown escape sequence");
            continue;
        }
      }
      if (c == '\n' || c == '\r') fail("raw line break in literal");
      lexical += c;
      ++pos_;
    }
    if (!at_end() && peek() == '@') {
      ++pos_;
      auto start = pos_;
      while (!at_end() && peek() != ' ' && peek() != '\t' && peek() != '.') ++pos_;
      // A trailing '.' directly after the tag belongs to the statement terminator.
      std::string tag(s_.substr(start, pos_ - start));
      if (!is_valid_language_tag(tag)) {
        pos_ = start;
        fail("invalid language tag");
      }
      return Term::lang(std::move(lexical), std::move(tag));
    }
    if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (at_end() || peek() != '<') fail("expected datatype IRI");
      auto start = pos_;
      std::string dt = parse_iri_string();
      try {
        return Term::typed(std::move(lexical), std::move(dt));
      } catch (const TermError& e) {
        pos_ = start;
        fail(e.what());
      }
    }
    return Term::literal(std::move(lexical));
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

}  // namespace

bool parse_ntriples_line(std::string_view line, Triple& out, std::size_t line_number,
                         std::size_t line_offset) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  try {
    return LineParser(line, line_number, line_offset).parse(out);
  } catch (const TermError& e) {
    throw NTriplesParseError(line_number, line_offset, e.what());
  }
}

void parse_ntriples(std::istream& in, const std::function<void(Triple&&)>& sink) {
  std::string line;
  std::size_t line_number = 0;
  std::size_t offset = 0;
  Triple t;
  while (std::getline(in, line)) {
    ++line_number;
    if (parse_ntriples_line(line, t, line_number, offset)) sink(std::move(t));
    offset += line.size() + 1;
  }
}

std::vector<Triple> parse_ntriples(std::string_view text) {
  std::vector<Triple> out;
  std::size_t line_number = 0;
  std::size_t offset = 0;
  Triple t;
  while (offset < text.size()) {
    auto nl = text.find('\n', offset);
    auto end = nl == std::string_view::npos ? text.size() : nl;
    ++line_number;
    if (parse_ntriples_line(text.substr(offset, end - offset), t, line_number, offset)) {
      out.push_back(std::move(t));
    }
    offset = end + 1;
  }
  return out;
}

std::vector<Triple> parse_ntriples_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<Triple> out;
  parse_ntriples(in, [&](Triple&& t) { out.push_back(std::move(t)); });
  return out;
}

}  // namespace kgforge::rdf
