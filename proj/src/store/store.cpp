#include "kgforge/store/store.hpp"

#include <fstream>

#include "kgforge/materialize/csv.hpp"
#include "kgforge/rdf/ntriples.hpp"

namespace kgforge::store {

namespace fs = std::filesystem;

TriplePattern::TriplePattern(PatternTerm s, PatternTerm p, PatternTerm o)
    : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (auto* t = std::get_if<rdf::Term>(&predicate); t && !t->is_iri()) {
    throw std::invalid_argument("pattern predicate must be an IRI or a variable");
  }
}

// ---------------------------------------------------------------------------
// Snapshot

Snapshot::Snapshot() : dict_(std::make_shared<Dictionary>()), default_(std::make_shared<IndexedGraph>()) {}

const IndexedGraph& Snapshot::graph(const GraphSelector& selector) const {
  static const IndexedGraph empty;
  if (!selector) return *default_;
  auto it = graphs_.find(*selector);
  return it == graphs_.end() ? empty : *it->second;
}

std::size_t Snapshot::total_size() const {
  std::size_t n = 0;
  for (const auto& [_, g] : graphs_) n += g->size();
  return n;
}

std::vector<Binding> Snapshot::match(const TriplePattern& pattern, const GraphSelector& selector) const {
  std::vector<Binding> out;
  IdPattern ids;
  const Variable* vars[3] = {nullptr, nullptr, nullptr};
  const PatternTerm* slots[3] = {&pattern.subject, &pattern.predicate, &pattern.object};
  TermId* targets[3] = {&ids.s, &ids.p, &ids.o};
  for (int i = 0; i < 3; ++i) {
    if (const auto* term = std::get_if<rdf::Term>(slots[i])) {
      auto id = dict_->find(*term);
      if (!id) return out;
      *targets[i] = *id;
    } else {
      vars[i] = &std::get<Variable>(*slots[i]);
    }
  }
  graph(selector).scan(ids, [&](const IdTriple& t) {
    const TermId values[3] = {t.s, t.p, t.o};
    Binding b;
    for (int i = 0; i < 3; ++i) {
      if (!vars[i]) continue;
      const auto& term = dict_->term(values[i]);
      auto [it, inserted] = b.emplace(vars[i]->name, term);
      // Repeated variable: all occurrences must bind the same term.
      if (!inserted && it->second != term) return true;
    }
    out.push_back(std::move(b));
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// SnapshotBuilder

SnapshotBuilder::SnapshotBuilder(const Snapshot* base, bool union_default)
    : dict_(base ? std::make_shared<Dictionary>(base->dictionary()) : std::make_shared<Dictionary>()),
      union_default_(union_default) {
  if (base) graphs_ = base->graphs();
}

std::size_t SnapshotBuilder::add_ids(const std::string& graph_iri, std::vector<IdTriple> ids) {
  std::size_t before = 0;
  auto it = graphs_.find(graph_iri);
  if (it != graphs_.end()) {
    before = it->second->size();
    const auto& existing = it->second->triples();
    ids.insert(ids.end(), existing.begin(), existing.end());
  }
  auto graph = std::make_shared<const IndexedGraph>(std::move(ids));
  std::size_t added = graph->size() - before;
  graphs_[graph_iri] = std::move(graph);
  return added;
}

std::size_t SnapshotBuilder::add(const std::string& graph_iri, const std::vector<rdf::Triple>& triples) {
  std::vector<IdTriple> ids;
  ids.reserve(triples.size());
  for (const auto& t : triples) {
    ids.push_back({dict_->intern(t.subject), dict_->intern(t.predicate), dict_->intern(t.object)});
  }
  return add_ids(graph_iri, std::move(ids));
}

std::size_t SnapshotBuilder::add_file(const std::string& graph_iri, const fs::path& ntriples) {
  std::ifstream in(ntriples, std::ios::binary);
  if (!in) throw LoadError(ntriples.string(), "file not found or unreadable");
  std::vector<IdTriple> ids;
  try {
    rdf::parse_ntriples(in, [&](rdf::Triple&& t) {
      ids.push_back({dict_->intern(t.subject), dict_->intern(t.predicate), dict_->intern(t.object)});
    });
  } catch (const std::exception& e) {
    throw LoadError(ntriples.string(), e.what());
  }
  return add_ids(graph_iri, std::move(ids));
}

std::shared_ptr<const Snapshot> SnapshotBuilder::build() {
  auto snap = std::make_shared<Snapshot>();
  snap->dict_ = dict_;
  snap->graphs_ = graphs_;
  snap->union_default_ = union_default_;
  if (union_default_) {
    if (graphs_.size() == 1) {
      snap->default_ = graphs_.begin()->second;
    } else {
      std::vector<IdTriple> all;
      std::size_t n = 0;
      for (const auto& [_, g] : graphs_) n += g->size();
      all.reserve(n);
      for (const auto& [_, g] : graphs_) all.insert(all.end(), g->triples().begin(), g->triples().end());
      snap->default_ = std::make_shared<const IndexedGraph>(std::move(all));
    }
  } else if (auto it = graphs_.find(""); it != graphs_.end()) {
    snap->default_ = it->second;
  }
  return snap;
}

// ---------------------------------------------------------------------------
// Manifest

std::vector<ManifestEntry> read_manifest(const fs::path& manifest) {
  materialize::RowSource csv;
  try {
    csv = materialize::read_csv(manifest);
  } catch (const std::exception& e) {
    throw LoadError(manifest.string(), e.what());
  }
  std::vector<std::vector<std::string>> rows;
  if (!(csv.header.size() == 2 && csv.header[0] == "graph_iri" && csv.header[1] == "path")) {
    if (!csv.header.empty() && !(csv.header.size() == 1 && csv.header[0].empty())) rows.push_back(csv.header);
  }
  rows.insert(rows.end(), csv.rows.begin(), csv.rows.end());

  std::vector<ManifestEntry> out;
  auto base = manifest.parent_path();
  for (const auto& row : rows) {
    if (row.size() != 2 || row[0].empty() || row[1].empty()) {
      throw LoadError(manifest.string(), "expected rows of graph_iri,path");
    }
    fs::path p = row[1];
    out.push_back({row[0], p.is_absolute() ? p : base / p});
  }
  return out;
}

void write_manifest(const fs::path& manifest, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + manifest.string() + "'");
  materialize::write_csv_row(out, {"graph_iri", "path"});
  auto base = manifest.parent_path();
  for (const auto& e : entries) {
    auto rel = e.path.is_absolute() ? e.path.lexically_relative(fs::absolute(base)) : e.path;
    materialize::write_csv_row(out, {e.graph_iri, rel.generic_string()});
  }
}

// ---------------------------------------------------------------------------
// TripleStore

TripleStore::TripleStore(bool union_default)
    : union_default_(union_default), current_(SnapshotBuilder(nullptr, union_default).build()) {}

std::shared_ptr<const Snapshot> TripleStore::snapshot() const {
  std::lock_guard lock(read_mutex_);
  return current_;
}

void TripleStore::publish(std::shared_ptr<const Snapshot> next) {
  std::lock_guard lock(read_mutex_);
  current_ = std::move(next);
}

std::size_t TripleStore::load_graph(const std::string& graph_iri, const fs::path& ntriples) {
  std::lock_guard lock(write_mutex_);
  auto base = snapshot();
  SnapshotBuilder builder(base.get(), union_default_);
  auto added = builder.add_file(graph_iri, ntriples);
  publish(builder.build());
  return added;
}

std::size_t TripleStore::add(const std::string& graph_iri, const std::vector<rdf::Triple>& triples) {
  std::lock_guard lock(write_mutex_);
  auto base = snapshot();
  SnapshotBuilder builder(base.get(), union_default_);
  auto added = builder.add(graph_iri, triples);
  publish(builder.build());
  return added;
}

std::vector<GraphLoad> TripleStore::load_manifest(const fs::path& manifest) {
  return load_entries(read_manifest(manifest));
}

std::vector<GraphLoad> TripleStore::load_entries(const std::vector<ManifestEntry>& entries) {
  std::lock_guard lock(write_mutex_);
  SnapshotBuilder builder(nullptr, union_default_);
  std::vector<GraphLoad> out;
  for (const auto& e : entries) {
    builder.add_file(e.graph_iri, e.path);
    out.push_back({e.graph_iri, e.path, 0});
  }
  auto next = builder.build();
  for (auto& g : out) g.triples = next->graph(g.graph_iri).size();
  publish(std::move(next));
  return out;
}

void TripleStore::clear() {
  std::lock_guard lock(write_mutex_);
  publish(SnapshotBuilder(nullptr, union_default_).build());
}

}  // namespace kgforge::store
