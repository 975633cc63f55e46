#pragma once

#include <map>
#include <set>
#include <string>

#include "kgforge/sparql/engine.hpp"

namespace kgforge::sparql {

struct HttpFederationOptions {
  // Endpoints that SERVICE may contact. Empty allows none.
  std::set<std::string> allow;
  // Endpoint IRI -> URL actually contacted, e.g. Wikidata -> a local mock.
  std::map<std::string, std::string> redirects;
};

// SPARQL protocol client: POSTs the query form-encoded and reads
// application/sparql-results+json.
class HttpFederationClient : public FederationClient {
 public:
  explicit HttpFederationClient(HttpFederationOptions options);
  ResultTable select(const std::string& endpoint, const std::string& query,
                     std::chrono::milliseconds timeout) override;

 private:
  HttpFederationOptions options_;
};

}  // namespace kgforge::sparql
