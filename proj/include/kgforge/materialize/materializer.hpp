#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgforge/mapping/model.hpp"
#include "kgforge/materialize/csv.hpp"
#include "kgforge/rdf/term.hpp"

namespace kgforge::materialize {

class SourceNotFound : public std::runtime_error {
 public:
  explicit SourceNotFound(const std::string& path)
      : std::runtime_error("source not found: '" + path + "'"), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class MaterializationError : public std::runtime_error {
 public:
  MaterializationError(std::string partition, const std::string& cause)
      : std::runtime_error("partition " + partition + " failed: " + cause), partition_(std::move(partition)) {}
  const std::string& partition() const { return partition_; }

 private:
  std::string partition_;
};

// (source file, column) pair whose values must never reach the output.
struct SuppressedColumn {
  std::string source;  // file name or path as written in the mapping
  std::string column;
};

// Loads and caches the CSV sources referenced by mappings. Not thread-safe
// while loading; call preload() before sharing it across workers.
class SourceCatalog {
 public:
  explicit SourceCatalog(std::filesystem::path data_dir, std::vector<SuppressedColumn> suppressed = {});

  const RowSource& get(const mapping::LogicalSource& source);
  const RowSource& get(const mapping::LogicalSource& source) const;
  void preload(const mapping::MappingDocument& doc);
  // Header per map name (first source), for mapping validation.
  std::map<std::string, std::vector<std::string>> headers(const mapping::MappingDocument& doc);

  std::filesystem::path resolve(const std::string& path) const;

 private:
  std::filesystem::path data_dir_;
  std::vector<SuppressedColumn> suppressed_;
  std::map<std::string, std::unique_ptr<RowSource>> cache_;
};

// Substitutes row values into the template, percent-encoding each value.
// Returns nullopt when any referenced value is empty or the column is absent.
std::optional<rdf::Term> expand_template(const mapping::TemplateExpr& t, const std::vector<std::string>& header,
                                         const std::vector<std::string>& row);
std::optional<rdf::Term> expand_template(const mapping::TemplateExpr& t,
                                         const std::map<std::string, std::string>& row);

// For each (parent map, parent column) used by a join: column value -> parent
// subject IRIs, in first-seen order.
using ParentIndex =
    std::map<std::pair<std::string, std::string>, std::unordered_map<std::string, std::vector<rdf::Term>>>;

ParentIndex build_parent_index(const mapping::MappingDocument& doc, const SourceCatalog& sources);

// All triples of one map, deduplicated, in row order.
std::vector<rdf::Triple> materialize_map(const mapping::TriplesMapSpec& map, const SourceCatalog& sources,
                                         const ParentIndex& parents);

struct RuleRef {
  std::size_t map_index;
  std::size_t po_index;

  friend bool operator==(const RuleRef&, const RuleRef&) = default;
};

struct PartitionKey {
  std::string subject_prefix;  // shortest constant prefix among the members
  std::string predicate;
  std::string graph;

  std::string to_string() const;
  friend bool operator==(const PartitionKey&, const PartitionKey&) = default;
};

// Rules whose outputs cannot overlap with those of any other partition.
struct MappingPartition {
  PartitionKey key;
  std::vector<RuleRef> members;
};

// Groups rules by (subject template prefix, predicate, graph). Rules with the
// same predicate and graph whose prefixes are prefix-related (one starts with
// the other) can produce the same subject and are merged into one partition.
// `graph_of_map[i]` names the target graph of doc.maps[i].
std::vector<MappingPartition> partition(const mapping::MappingDocument& doc,
                                        const std::vector<std::string>& graph_of_map);
std::vector<MappingPartition> partition(const mapping::MappingDocument& doc);

// One mapping file = one entity group = one output graph.
struct EntityMapping {
  std::string entity;
  mapping::MappingDocument doc;
};

// Loads every *.yml / *.yaml in a directory (sorted by name) or a single file;
// the entity name is the file stem.
std::vector<EntityMapping> load_mappings(const std::filesystem::path& dir_or_file);

struct MaterializeOptions {
  std::filesystem::path data_dir;
  std::filesystem::path out_dir;
  unsigned jobs = 1;
  std::vector<SuppressedColumn> suppressed;
};

struct ReportRow {
  std::string entity;
  double seconds = 0;
  std::size_t mappings = 0;
  std::size_t triples = 0;
  std::uintmax_t bytes = 0;
};

struct MaterializationReport {
  std::vector<ReportRow> rows;

  ReportRow total() const;
  // CSV with header Entity,Time (in sec),No. of mappings,Triples generated,File Size
  // and a final Total row.
  void write_csv(std::ostream& out) const;
  // Aligned pipe-separated table in the same column order.
  std::string to_text() const;
};

// Table-style file size: "0.49 MB", "7.8 MB", "4.2 GB" (decimal units).
std::string format_size(std::uintmax_t bytes);

struct EntityOutput {
  std::string entity;
  std::size_t mappings = 0;
  double seconds = 0;
  std::vector<rdf::Triple> triples;
};

// Runs all partitions on up to `jobs` threads and groups output per entity.
// Output order is independent of `jobs`.
std::vector<EntityOutput> materialize_entities(const std::vector<EntityMapping>& entities, SourceCatalog& sources,
                                               unsigned jobs);

// Validates, materializes and writes <out_dir>/<entity>.nt for every entity.
MaterializationReport materialize_all(const std::vector<EntityMapping>& entities, const MaterializeOptions& options);

}  // namespace kgforge::materialize
