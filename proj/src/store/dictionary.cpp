#include "kgforge/store/dictionary.hpp"

#include <limits>
#include <stdexcept>

namespace kgforge::store {

TermId Dictionary::intern(const rdf::Term& term) {
  auto it = ids_.find(term);
  if (it != ids_.end()) return it->second;
  if (terms_.size() >= std::numeric_limits<TermId>::max() - 1) throw std::length_error("term dictionary full");
  terms_.push_back(term);
  auto id = static_cast<TermId>(terms_.size());
  ids_.emplace(term, id);
  return id;
}

std::optional<TermId> Dictionary::find(const rdf::Term& term) const {
  auto it = ids_.find(term);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

}  // namespace kgforge::store
