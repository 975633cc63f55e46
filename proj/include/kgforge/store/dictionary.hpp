#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "kgforge/rdf/term.hpp"

namespace kgforge::store {

using TermId = std::uint32_t;
inline constexpr TermId kNoTerm = 0;

// Bijective term <-> id mapping. Ids are dense and start at 1.
class Dictionary {
 public:
  TermId intern(const rdf::Term& term);
  std::optional<TermId> find(const rdf::Term& term) const;
  const rdf::Term& term(TermId id) const { return terms_.at(id - 1); }
  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<rdf::Term> terms_;
  std::unordered_map<rdf::Term, TermId, rdf::TermHash> ids_;
};

}  // namespace kgforge::store
