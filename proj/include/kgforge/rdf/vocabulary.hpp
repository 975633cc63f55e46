#pragma once

#include <string_view>

#include "kgforge/rdf/prefix_map.hpp"

// Namespaces and terms reused by the knowledge graph data model.
namespace kgforge::rdf::vocab {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kRepr = "https://w3id.org/reproduceme/";
// No trailing '#': p-plan:isStepOfPlan expands to .../p-planisStepOfPlan.
inline constexpr std::string_view kPPlan = "http://purl.org/net/p-plan";
inline constexpr std::string_view kPav = "http://purl.org/pav/";
inline constexpr std::string_view kProv = "http://www.w3.org/ns/prov#";
inline constexpr std::string_view kFabio = "http://purl.org/spar/fabio/";
inline constexpr std::string_view kDoap = "http://usefulinc.com/ns/doap#";

inline constexpr std::string_view kRr = "http://www.w3.org/ns/r2rml#";
inline constexpr std::string_view kRml = "http://semweb.mmlab.be/ns/rml#";
inline constexpr std::string_view kQl = "http://semweb.mmlab.be/ns/ql#";

inline constexpr std::string_view kWdt = "http://www.wikidata.org/prop/direct/";
inline constexpr std::string_view kWd = "http://www.wikidata.org/entity/";

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfLangString =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
inline constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";

inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdFloat = "http://www.w3.org/2001/XMLSchema#float";
inline constexpr std::string_view kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kXsdDate = "http://www.w3.org/2001/XMLSchema#date";

inline constexpr std::string_view kFabioArticle = "http://purl.org/spar/fabio/Article";
inline constexpr std::string_view kFabioJournal = "http://purl.org/spar/fabio/Journal";
inline constexpr std::string_view kDoapGitRepository = "http://usefulinc.com/ns/doap#GitRepository";
inline constexpr std::string_view kReprNotebook = "https://w3id.org/reproduceme/Notebook";
inline constexpr std::string_view kReprCell = "https://w3id.org/reproduceme/Cell";
inline constexpr std::string_view kReprCellExecution = "https://w3id.org/reproduceme/CellExecution";
inline constexpr std::string_view kReprFile = "https://w3id.org/reproduceme/File";
inline constexpr std::string_view kProvSpecializationOf = "http://www.w3.org/ns/prov#specializationOf";
inline constexpr std::string_view kProvGeneralizationOf = "http://www.w3.org/ns/prov#generalizationOf";
inline constexpr std::string_view kPavRetrievedFrom = "http://purl.org/pav/retrievedFrom";
inline constexpr std::string_view kPPlanIsStepOfPlan = "http://purl.org/net/p-planisStepOfPlan";
inline constexpr std::string_view kPPlanIsVariableOfPlan = "http://purl.org/net/p-planisVariableOfPlan";

// repr datatype properties
inline constexpr std::string_view kReprKernel = "https://w3id.org/reproduceme/kernel";
inline constexpr std::string_view kReprLanguage = "https://w3id.org/reproduceme/language";
inline constexpr std::string_view kReprTotalCells = "https://w3id.org/reproduceme/total_cells";
inline constexpr std::string_view kReprDuration = "https://w3id.org/reproduceme/duration";
inline constexpr std::string_view kReprProcessed = "https://w3id.org/reproduceme/processed";
inline constexpr std::string_view kReprUrl = "https://w3id.org/reproduceme/url";

// Prefix map with every namespace above, under the conventional labels.
const PrefixMap& standard_prefixes();

}  // namespace kgforge::rdf::vocab
