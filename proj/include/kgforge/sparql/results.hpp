#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "kgforge/sparql/engine.hpp"

namespace kgforge::sparql {

class ResultsFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// application/sparql-results+json
std::string to_json(const ResultTable& table);
// text/csv as in the SPARQL 1.1 CSV results format.
std::string to_csv(const ResultTable& table);

// Parses a SPARQL JSON results document.
ResultTable parse_json_results(std::string_view text);

}  // namespace kgforge::sparql
