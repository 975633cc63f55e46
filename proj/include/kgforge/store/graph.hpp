#pragma once

#include <array>
#include <functional>
#include <vector>

#include "kgforge/store/dictionary.hpp"

namespace kgforge::store {

struct IdTriple {
  TermId s = kNoTerm;
  TermId p = kNoTerm;
  TermId o = kNoTerm;

  friend bool operator==(const IdTriple&, const IdTriple&) = default;
  friend auto operator<=>(const IdTriple&, const IdTriple&) = default;
};

enum class IndexKind { SPO, POS, OSP };

// Index whose sort order puts the bound positions first.
IndexKind choose_index(bool s_bound, bool p_bound, bool o_bound);

// Pattern over ids; kNoTerm is a wildcard.
struct IdPattern {
  TermId s = kNoTerm;
  TermId p = kNoTerm;
  TermId o = kNoTerm;
};

// An immutable set of id-triples kept in three sort orders.
class IndexedGraph {
 public:
  IndexedGraph() = default;
  // Sorts and deduplicates.
  explicit IndexedGraph(std::vector<IdTriple> triples);

  std::size_t size() const { return spo_.size(); }
  // Triples in SPO order.
  const std::vector<IdTriple>& triples() const { return spo_; }
  bool contains(const IdTriple& t) const;

  // Calls `fn` for every matching triple; stops early when fn returns false.
  void scan(const IdPattern& pattern, const std::function<bool(const IdTriple&)>& fn) const;
  void scan(IndexKind index, const IdPattern& pattern, const std::function<bool(const IdTriple&)>& fn) const;
  // Number of matches, computed from index ranges where possible.
  std::size_t count(const IdPattern& pattern) const;

 private:
  std::vector<IdTriple> spo_;
  std::vector<IdTriple> pos_;
  std::vector<IdTriple> osp_;
};

}  // namespace kgforge::store
