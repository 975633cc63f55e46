#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kgforge::rdf {

class TermError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TermKind : unsigned char { Iri, BlankNode, Literal };

// An RDF term. Equality is lexical: "01" and "1" are different literals.
// Literals typed xsd:string are stored as plain literals, so the two spellings
// of a simple string are the same term.
class Term {
 public:
  Term() = default;

  static Term iri(std::string value);
  static Term blank(std::string label);
  static Term literal(std::string lexical);
  static Term typed(std::string lexical, std::string datatype);
  static Term lang(std::string lexical, std::string language);

  TermKind kind() const { return kind_; }
  bool is_iri() const { return kind_ == TermKind::Iri; }
  bool is_blank() const { return kind_ == TermKind::BlankNode; }
  bool is_literal() const { return kind_ == TermKind::Literal; }

  // IRI string, blank node label, or literal lexical form.
  const std::string& value() const { return value_; }
  // Explicit datatype IRI; empty for plain and language-tagged literals.
  const std::string& datatype() const { return datatype_; }
  const std::string& language() const { return language_; }

  // Datatype including the implicit ones (xsd:string, rdf:langString).
  std::string effective_datatype() const;

  bool is_simple_literal() const {
    return kind_ == TermKind::Literal && datatype_.empty() && language_.empty();
  }

  // N-Triples form, e.g. <http://x>, _:b1, "a"@en.
  std::string to_ntriples(bool ascii_only = false) const;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;

 private:
  TermKind kind_ = TermKind::Iri;
  std::string value_;
  std::string datatype_;
  std::string language_;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  Triple() = default;
  // Throws TermError if the subject is a literal or the predicate is not an IRI.
  Triple(Term s, Term p, Term o);

  std::string to_ntriples(bool ascii_only = false) const;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

bool is_valid_iri(std::string_view iri);
bool is_valid_blank_label(std::string_view label);
bool is_valid_language_tag(std::string_view tag);

// Escapes a literal lexical form for use between N-Triples quotes.
std::string escape_literal(std::string_view lexical, bool ascii_only = false);

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept;
};

}  // namespace kgforge::rdf
