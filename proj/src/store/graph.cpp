#include "kgforge/store/graph.hpp"

#include <algorithm>

namespace kgforge::store {

namespace {

// Triple positions in index order: SPO = (s,p,o), POS = (p,o,s), OSP = (o,s,p).
std::array<TermId, 3> key(IndexKind k, const IdTriple& t) {
  switch (k) {
    case IndexKind::SPO: return {t.s, t.p, t.o};
    case IndexKind::POS: return {t.p, t.o, t.s};
    case IndexKind::OSP: return {t.o, t.s, t.p};
  }
  return {};
}

std::array<TermId, 3> key(IndexKind k, const IdPattern& p) { return key(k, IdTriple{p.s, p.p, p.o}); }

struct ByKey {
  IndexKind kind;
  bool operator()(const IdTriple& a, const IdTriple& b) const { return key(kind, a) < key(kind, b); }
};

bool matches(const IdPattern& p, const IdTriple& t) {
  return (p.s == kNoTerm || p.s == t.s) && (p.p == kNoTerm || p.p == t.p) && (p.o == kNoTerm || p.o == t.o);
}

}  // namespace

IndexKind choose_index(bool s, bool p, bool o) {
  if (s && !p && o) return IndexKind::OSP;
  if (s) return IndexKind::SPO;
  if (p) return IndexKind::POS;
  if (o) return IndexKind::OSP;
  return IndexKind::SPO;
}

IndexedGraph::IndexedGraph(std::vector<IdTriple> triples) : spo_(std::move(triples)) {
  std::sort(spo_.begin(), spo_.end(), ByKey{IndexKind::SPO});
  spo_.erase(std::unique(spo_.begin(), spo_.end()), spo_.end());
  pos_ = spo_;
  std::sort(pos_.begin(), pos_.end(), ByKey{IndexKind::POS});
  osp_ = spo_;
  std::sort(osp_.begin(), osp_.end(), ByKey{IndexKind::OSP});
}

bool IndexedGraph::contains(const IdTriple& t) const {
  return std::binary_search(spo_.begin(), spo_.end(), t, ByKey{IndexKind::SPO});
}

namespace {

// Range of `index` whose leading bound key positions equal the pattern's.
template <typename It>
std::pair<It, It> prefix_range(It begin, It end, IndexKind kind, const IdPattern& pattern) {
  auto want = key(kind, pattern);
  std::size_t bound = 0;
  while (bound < 3 && want[bound] != kNoTerm) ++bound;
  if (bound == 0) return {begin, end};
  auto lo = std::partition_point(begin, end, [&](const IdTriple& t) {
    auto k = key(kind, t);
    return std::lexicographical_compare(k.begin(), k.begin() + bound, want.begin(), want.begin() + bound);
  });
  auto hi = std::partition_point(lo, end, [&](const IdTriple& t) {
    auto k = key(kind, t);
    return std::equal(k.begin(), k.begin() + bound, want.begin());
  });
  return {lo, hi};
}

}  // namespace

void IndexedGraph::scan(IndexKind index, const IdPattern& pattern,
                        const std::function<bool(const IdTriple&)>& fn) const {
  const auto& v = index == IndexKind::SPO ? spo_ : index == IndexKind::POS ? pos_ : osp_;
  auto [lo, hi] = prefix_range(v.begin(), v.end(), index, pattern);
  for (auto it = lo; it != hi; ++it) {
    if (matches(pattern, *it) && !fn(*it)) return;
  }
}

void IndexedGraph::scan(const IdPattern& pattern, const std::function<bool(const IdTriple&)>& fn) const {
  scan(choose_index(pattern.s != kNoTerm, pattern.p != kNoTerm, pattern.o != kNoTerm), pattern, fn);
}

std::size_t IndexedGraph::count(const IdPattern& pattern) const {
  auto index = choose_index(pattern.s != kNoTerm, pattern.p != kNoTerm, pattern.o != kNoTerm);
  const auto& v = index == IndexKind::SPO ? spo_ : index == IndexKind::POS ? pos_ : osp_;
  auto [lo, hi] = prefix_range(v.begin(), v.end(), index, pattern);
  return static_cast<std::size_t>(hi - lo);
}

}  // namespace kgforge::store
