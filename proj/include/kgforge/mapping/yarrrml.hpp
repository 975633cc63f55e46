#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/mapping/model.hpp"

namespace kgforge::mapping {

// Parses the supported YARRRML subset:
//   prefixes / mappings roots; per map `sources` (`source`), `s` (`subject`),
//   `po` (`predicateobjects`); po entries as `[p, o]`, `[p, o, datatype]`,
//   `[p, o, lang~lang]` or `{p, o}` blocks whose `o` may be a join
//   (`mapping` + `condition` with function `equal`).
// Anything outside the subset throws MappingSyntaxError or UnsupportedFeature.
MappingDocument parse_yarrrml(std::string_view text);
MappingDocument parse_yarrrml_file(const std::filesystem::path& path);

struct Diagnostic {
  enum class Kind { MissingColumn, UnknownParentMap, MissingSource, InvalidTemplate };
  Kind kind;
  std::string map;
  std::string detail;  // column, parent map name, source path or template text

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string to_string(const Diagnostic& d);

// Checks every column reference against the headers of the map's sources.
// `headers` is keyed by map name. Maps without an entry yield MissingSource.
// Join columns on the parent side are checked against the parent's header.
std::vector<Diagnostic> validate(const MappingDocument& doc,
                                 const std::map<std::string, std::vector<std::string>>& headers);

}  // namespace kgforge::mapping
