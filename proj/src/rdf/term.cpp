#include "kgforge/rdf/term.hpp"

#include <cstdint>
#include <cstdio>

#include "kgforge/rdf/vocabulary.hpp"
#include "utf8.hpp"

namespace kgforge::rdf {

namespace {

bool is_forbidden_iri_char(unsigned char c) {
  if (c <= 0x20 || c == 0x7F) return true;
  switch (c) {
    case '<': case '>': case '"': case '{': case '}':
    case '|': case '^': case '`': case '\\':
      return true;
    default:
      return false;
  }
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }

void append_uchar(std::string& out, std::uint32_t cp) {
  char buf[12];
  if (cp <= 0xFFFF) {
    std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(cp));
  } else {
    std::snprintf(buf, sizeof buf, "\\U%08X", static_cast<unsigned>(cp));
  }
  out += buf;
}

std::string escape_iri(std::string_view iri, bool ascii_only) {
  if (!ascii_only) return std::string(iri);
  std::string out;
  out.reserve(iri.size());
  std::size_t i = 0;
  while (i < iri.size()) {
    auto c = static_cast<unsigned char>(iri[i]);
    if (c < 0x80) {
      out += static_cast<char>(c);
      ++i;
    } else {
      append_uchar(out, detail::decode_utf8(iri, i));
    }
  }
  return out;
}

}  // namespace

bool is_valid_iri(std::string_view iri) {
  if (iri.empty()) return false;
  for (char c : iri) {
    if (is_forbidden_iri_char(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool is_valid_blank_label(std::string_view label) {
  if (label.empty() || !is_alnum(label.front())) return false;
  for (char c : label) {
    if (!is_alnum(c) && c != '_' && c != '-') return false;
  }
  return true;
}

bool is_valid_language_tag(std::string_view tag) {
  std::size_t i = 0;
  std::size_t n = 0;
  while (i < tag.size() && is_alpha(tag[i])) ++i, ++n;
  if (n == 0) return false;
  while (i < tag.size()) {
    if (tag[i] != '-') return false;
    ++i;
    n = 0;
    while (i < tag.size() && is_alnum(tag[i])) ++i, ++n;
    if (n == 0) return false;
  }
  return true;
}

Term Term::iri(std::string value) {
  if (!is_valid_iri(value)) throw TermError("invalid IRI: '" + value + "'");
  Term t;
  t.kind_ = TermKind::Iri;
  t.value_ = std::move(value);
  return t;
}

Term Term::blank(std::string label) {
  if (!is_valid_blank_label(label)) throw TermError("invalid blank node label: '" + label + "'");
  Term t;
  t.kind_ = TermKind::BlankNode;
  t.value_ = std::move(label);
  return t;
}

Term Term::literal(std::string lexical) {
  Term t;
  t.kind_ = TermKind::Literal;
  t.value_ = std::move(lexical);
  return t;
}

Term Term::typed(std::string lexical, std::string datatype) {
  if (datatype == vocab::kXsdString) return literal(std::move(lexical));
  if (!is_valid_iri(datatype)) throw TermError("invalid datatype IRI: '" + datatype + "'");
  if (datatype == vocab::kRdfLangString) throw TermError("rdf:langString requires a language tag");
  Term t = literal(std::move(lexical));
  t.datatype_ = std::move(datatype);
  return t;
}

Term Term::lang(std::string lexical, std::string language) {
  if (!is_valid_language_tag(language)) throw TermError("invalid language tag: '" + language + "'");
  Term t = literal(std::move(lexical));
  t.language_ = std::move(language);
  return t;
}

std::string Term::effective_datatype() const {
  if (kind_ != TermKind::Literal) return {};
  if (!language_.empty()) return std::string(vocab::kRdfLangString);
  if (datatype_.empty()) return std::string(vocab::kXsdString);
  return datatype_;
}

std::string Term::to_ntriples(bool ascii_only) const {
  switch (kind_) {
    case TermKind::Iri:
      return "<" + escape_iri(value_, ascii_only) + ">";
    case TermKind::BlankNode:
      return "_:" + value_;
    case TermKind::Literal: {
      std::string out = "\"" + escape_literal(value_, ascii_only) + "\"";
      if (!language_.empty()) {
        out += "@" + language_;
      } else if (!datatype_.empty()) {
        out += "^^<" + escape_iri(datatype_, ascii_only) + ">";
      }
      return out;
    }
  }
  return {};
}

std::string escape_literal(std::string_view lexical, bool ascii_only) {
  std::string out;
  out.reserve(lexical.size() + 2);
  std::size_t i = 0;
  while (i < lexical.size()) {
    auto c = static_cast<unsigned char>(lexical[i]);
    switch (c) {
      case '"': out += "\\\""; ++i; continue;
      case '\\': out += "\\\\"; ++i; continue;
      case '\n': out += "\\n"; ++i; continue;
      case '\r': out += "\\r"; ++i; continue;
      case '\t': out += "\\t"; ++i; continue;
      default: break;
    }
    if (c < 0x20 || c == 0x7F) {
      append_uchar(out, c);
      ++i;
    } else if (c >= 0x80 && ascii_only) {
      append_uchar(out, detail::decode_utf8(lexical, i));
    } else {
      out += static_cast<char>(c);
      ++i;
    }
  }
  return out;
}

Triple::Triple(Term s, Term p, Term o)
    : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (subject.is_literal()) throw TermError("triple subject cannot be a literal");
  if (!predicate.is_iri()) throw TermError("triple predicate must be an IRI");
}

std::string Triple::to_ntriples(bool ascii_only) const {
  return subject.to_ntriples(ascii_only) + " " + predicate.to_ntriples(ascii_only) + " " +
         object.to_ntriples(ascii_only) + " .";
}

std::size_t TermHash::operator()(const Term& t) const noexcept {
  std::size_t h = std::hash<std::string>{}(t.value());
  h ^= static_cast<std::size_t>(t.kind()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  if (!t.datatype().empty()) h ^= std::hash<std::string>{}(t.datatype()) + (h << 6) + (h >> 2);
  if (!t.language().empty()) h ^= std::hash<std::string>{}(t.language()) + (h << 6) + (h >> 2);
  return h;
}

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
  TermHash th;
  std::size_t h = th(t.subject);
  h ^= th(t.predicate) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= th(t.object) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace kgforge::rdf
