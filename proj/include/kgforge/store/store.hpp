#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kgforge/rdf/term.hpp"
#include "kgforge/store/graph.hpp"

namespace kgforge::store {

class LoadError : public std::runtime_error {
 public:
  LoadError(std::string file, const std::string& cause)
      : std::runtime_error("cannot load '" + file + "': " + cause), file_(std::move(file)) {}
  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<rdf::Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  // Throws std::invalid_argument unless the predicate is an IRI or variable.
  TriplePattern(PatternTerm s, PatternTerm p, PatternTerm o);
};

using Binding = std::map<std::string, rdf::Term>;

// nullopt selects the default graph.
using GraphSelector = std::optional<std::string>;

// Immutable view of the dataset. Queries hold one for their whole run.
class Snapshot {
 public:
  Snapshot();

  const Dictionary& dictionary() const { return *dict_; }
  const std::map<std::string, std::shared_ptr<const IndexedGraph>>& graphs() const { return graphs_; }
  bool union_default() const { return union_default_; }

  // The graph a selector refers to; an empty graph for unknown names.
  const IndexedGraph& graph(const GraphSelector& selector = std::nullopt) const;
  std::size_t total_size() const;

  std::vector<Binding> match(const TriplePattern& pattern, const GraphSelector& selector = std::nullopt) const;

 private:
  friend class SnapshotBuilder;

  std::shared_ptr<const Dictionary> dict_;
  std::map<std::string, std::shared_ptr<const IndexedGraph>> graphs_;
  std::shared_ptr<const IndexedGraph> default_;
  bool union_default_ = true;
};

// Builds a new snapshot, optionally starting from an existing one.
class SnapshotBuilder {
 public:
  explicit SnapshotBuilder(const Snapshot* base = nullptr, bool union_default = true);

  // Returns the number of triples that were not already in the graph.
  std::size_t add(const std::string& graph_iri, const std::vector<rdf::Triple>& triples);
  // Streams an N-Triples file into the graph. Throws LoadError.
  std::size_t add_file(const std::string& graph_iri, const std::filesystem::path& ntriples);
  std::shared_ptr<const Snapshot> build();

 private:
  std::shared_ptr<Dictionary> dict_;
  std::map<std::string, std::shared_ptr<const IndexedGraph>> graphs_;
  bool union_default_;

  std::size_t add_ids(const std::string& graph_iri, std::vector<IdTriple> ids);
};

struct ManifestEntry {
  std::string graph_iri;
  std::filesystem::path path;
};

// CSV of graph_iri,path with an optional header row. Relative paths are
// resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);
void write_manifest(const std::filesystem::path& manifest, const std::vector<ManifestEntry>& entries);

struct GraphLoad {
  std::string graph_iri;
  std::filesystem::path path;
  std::size_t triples = 0;
};

// Multi-reader/single-writer dataset. Readers take a snapshot; writers build
// a replacement and swap it in.
class TripleStore {
 public:
  explicit TripleStore(bool union_default = true);

  std::shared_ptr<const Snapshot> snapshot() const;

  // Adds the file's triples to the graph. The graph is unchanged on error.
  std::size_t load_graph(const std::string& graph_iri, const std::filesystem::path& ntriples);
  std::size_t add(const std::string& graph_iri, const std::vector<rdf::Triple>& triples);
  // Replaces the whole dataset with the manifest's graphs, or nothing on error.
  std::vector<GraphLoad> load_manifest(const std::filesystem::path& manifest);
  std::vector<GraphLoad> load_entries(const std::vector<ManifestEntry>& entries);
  void clear();

 private:
  void publish(std::shared_ptr<const Snapshot> next);

  bool union_default_;
  mutable std::mutex read_mutex_;
  std::mutex write_mutex_;
  std::shared_ptr<const Snapshot> current_;
};

}  // namespace kgforge::store
