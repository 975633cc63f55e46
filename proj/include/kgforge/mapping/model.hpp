#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kgforge/rdf/prefix_map.hpp"
#include "kgforge/rdf/term.hpp"

namespace kgforge::mapping {

class MappingSyntaxError : public std::runtime_error {
 public:
  MappingSyntaxError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  // Location of the offending key, e.g. "mappings.repositories.po[2]".
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class UnsupportedFeature : public std::runtime_error {
 public:
  UnsupportedFeature(std::string path, const std::string& message)
      : std::runtime_error(path + ": unsupported " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class SourceFormat { Csv };

struct LogicalSource {
  std::string path;
  SourceFormat format = SourceFormat::Csv;

  friend bool operator==(const LogicalSource&, const LogicalSource&) = default;
};

struct ColumnRef {
  std::string column;

  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

struct ConstantText {
  std::string text;

  friend bool operator==(const ConstantText&, const ConstantText&) = default;
};

// A `$(column)`-style template: literal text interleaved with column values.
struct TemplateExpr {
  std::vector<std::variant<ConstantText, ColumnRef>> segments;

  // Parses YARRRML template syntax. `\$(` escapes a literal "$(".
  static TemplateExpr parse(std::string_view text);

  std::vector<std::string> columns() const;
  // Text before the first column reference.
  std::string constant_prefix() const;
  // Template in RML syntax, `{column}` with `{`, `}` and `\` escaped in constants.
  std::string to_rml() const;
  std::string to_yarrrml() const;

  friend bool operator==(const TemplateExpr&, const TemplateExpr&) = default;
};

// Object produced from a column value: a literal, optionally typed or tagged.
struct ColumnObject {
  ColumnRef column;
  std::string datatype;  // absolute IRI or empty
  std::string language;  // empty if none

  friend bool operator==(const ColumnObject&, const ColumnObject&) = default;
};

// IRI object built from a template.
struct TemplateObject {
  TemplateExpr expr;

  friend bool operator==(const TemplateObject&, const TemplateObject&) = default;
};

struct ConstantObject {
  rdf::Term term;

  friend bool operator==(const ConstantObject&, const ConstantObject&) = default;
};

// Object is the subject of the parent map's row whose parent column equals
// the child column of the current row.
struct JoinRef {
  std::string parent_map;
  ColumnRef child;
  ColumnRef parent;

  friend bool operator==(const JoinRef&, const JoinRef&) = default;
};

using ObjectSpec = std::variant<ConstantObject, ColumnObject, TemplateObject, JoinRef>;

struct PredicateObjectSpec {
  rdf::Term predicate;
  ObjectSpec object;

  friend bool operator==(const PredicateObjectSpec&, const PredicateObjectSpec&) = default;
};

struct TriplesMapSpec {
  std::string name;
  std::vector<LogicalSource> sources;
  TemplateExpr subject;
  std::vector<PredicateObjectSpec> pos;

  friend bool operator==(const TriplesMapSpec&, const TriplesMapSpec&) = default;
};

struct MappingDocument {
  rdf::PrefixMap prefixes;
  std::vector<TriplesMapSpec> maps;

  const TriplesMapSpec* find(std::string_view name) const;
  // Number of mapping rules, counted as one per predicate-object spec.
  std::size_t rule_count() const;

  // Appends the maps of `other`; throws MappingSyntaxError on duplicate names.
  void merge(const MappingDocument& other);
};

}  // namespace kgforge::mapping
