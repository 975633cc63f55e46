#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgforge/rdf/term.hpp"

namespace kgforge::rdf {

class UnknownPrefix : public std::runtime_error {
 public:
  explicit UnknownPrefix(std::string label)
      : std::runtime_error("unknown prefix '" + label + "'"), label_(std::move(label)) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class CurieSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered prefix-label -> namespace association. Labels are unique.
class PrefixMap {
 public:
  PrefixMap() = default;
  PrefixMap(std::initializer_list<std::pair<std::string, std::string>> entries);

  // Throws std::invalid_argument on a duplicate label with a different namespace
  // or a namespace that is not a valid IRI.
  void add(std::string label, std::string ns);
  // Like add(), but a later binding replaces an earlier one.
  void set(std::string label, std::string ns);

  std::optional<std::string_view> find(std::string_view label) const;
  bool contains(std::string_view label) const { return find(label).has_value(); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Merges `other` into this map; conflicting labels throw.
  void merge(const PrefixMap& other);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Expands `label:local` against the prefix map.
// Throws CurieSyntaxError for malformed input and UnknownPrefix for labels
// missing from the map.
Term expand_curie(std::string_view curie, const PrefixMap& prefixes);

// True if `text` starts with a URI scheme followed by ':' (e.g. "https:").
bool has_uri_scheme(std::string_view text);

}  // namespace kgforge::rdf
