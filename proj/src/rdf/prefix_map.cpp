#include "kgforge/rdf/prefix_map.hpp"

#include <algorithm>

#include "kgforge/rdf/vocabulary.hpp"

namespace kgforge::rdf {

namespace {

bool is_label_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-' || c == '.';
}

}  // namespace

PrefixMap::PrefixMap(std::initializer_list<std::pair<std::string, std::string>> entries) {
  for (const auto& [label, ns] : entries) add(label, ns);
}

void PrefixMap::add(std::string label, std::string ns) {
  if (!std::all_of(label.begin(), label.end(), is_label_char)) {
    throw std::invalid_argument("invalid prefix label '" + label + "'");
  }
  if (!is_valid_iri(ns)) throw std::invalid_argument("invalid namespace IRI '" + ns + "'");
  for (auto& [l, n] : entries_) {
    if (l == label) {
      if (n != ns) throw std::invalid_argument("prefix '" + label + "' bound twice");
      return;
    }
  }
  entries_.emplace_back(std::move(label), std::move(ns));
}

void PrefixMap::set(std::string label, std::string ns) {
  for (auto& [l, n] : entries_) {
    if (l == label) {
      if (!is_valid_iri(ns)) throw std::invalid_argument("invalid namespace IRI '" + ns + "'");
      n = std::move(ns);
      return;
    }
  }
  add(std::move(label), std::move(ns));
}

std::optional<std::string_view> PrefixMap::find(std::string_view label) const {
  for (const auto& [l, n] : entries_) {
    if (l == label) return std::string_view(n);
  }
  return std::nullopt;
}

void PrefixMap::merge(const PrefixMap& other) {
  for (const auto& [l, n] : other.entries_) add(l, n);
}

Term expand_curie(std::string_view curie, const PrefixMap& prefixes) {
  auto colon = curie.find(':');
  if (colon == std::string_view::npos) {
    throw CurieSyntaxError("malformed CURIE '" + std::string(curie) + "': missing ':'");
  }
  auto label = curie.substr(0, colon);
  auto local = curie.substr(colon + 1);
  if (!std::all_of(label.begin(), label.end(), is_label_char)) {
    throw CurieSyntaxError("malformed CURIE '" + std::string(curie) + "': bad prefix label");
  }
  auto ns = prefixes.find(label);
  if (!ns) throw UnknownPrefix(std::string(label));
  std::string expanded(*ns);
  expanded += local;
  if (!is_valid_iri(expanded)) {
    throw CurieSyntaxError("malformed CURIE '" + std::string(curie) + "': invalid local part");
  }
  return Term::iri(std::move(expanded));
}

bool has_uri_scheme(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  auto c0 = text[0];
  if (!((c0 >= 'a' && c0 <= 'z') || (c0 >= 'A' && c0 <= 'Z'))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = text[i];
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '+' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

namespace vocab {

const PrefixMap& standard_prefixes() {
  static const PrefixMap map = {
      {"rdf", std::string(kRdf)},     {"rdfs", std::string(kRdfs)},   {"xsd", std::string(kXsd)},
      {"repr", std::string(kRepr)},   {"p-plan", std::string(kPPlan)}, {"pav", std::string(kPav)},
      {"prov", std::string(kProv)},   {"fabio", std::string(kFabio)}, {"doap", std::string(kDoap)},
      {"rr", std::string(kRr)},       {"rml", std::string(kRml)},     {"ql", std::string(kQl)},
      {"wdt", std::string(kWdt)},     {"wd", std::string(kWd)},
  };
  return map;
}

}  // namespace vocab

}  // namespace kgforge::rdf
