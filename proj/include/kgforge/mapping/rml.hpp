#pragma once

#include <string>
#include <vector>

#include "kgforge/mapping/model.hpp"
#include "kgforge/rdf/term.hpp"

namespace kgforge::mapping {

inline constexpr std::string_view kRmlMapBase = "urn:kgforge:rml:";

// Translates a mapping document into RML (rr/rml/ql vocabulary) triples.
// Each map becomes one rr:TriplesMap per source, named
// <urn:kgforge:rml:NAME> (or NAME_k with several sources); inner nodes are
// blank nodes numbered in emission order, so the output is deterministic.
std::vector<rdf::Triple> export_rml(const MappingDocument& doc);

}  // namespace kgforge::mapping
