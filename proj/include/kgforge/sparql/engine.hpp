#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/rdf/term.hpp"
#include "kgforge/sparql/ast.hpp"
#include "kgforge/store/store.hpp"

namespace kgforge::sparql {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Timeout : public std::runtime_error {
 public:
  Timeout() : std::runtime_error("query timed out") {}
};

class FederationError : public std::runtime_error {
 public:
  FederationError(std::string endpoint, const std::string& cause)
      : std::runtime_error("SERVICE <" + endpoint + "> failed: " + cause), endpoint_(std::move(endpoint)) {}
  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
};

struct ResultTable {
  std::vector<std::string> vars;
  std::vector<std::vector<std::optional<rdf::Term>>> rows;
  bool ordered = false;

  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

// Sends a SELECT query to a remote endpoint and returns its result table.
class FederationClient {
 public:
  virtual ~FederationClient() = default;
  virtual ResultTable select(const std::string& endpoint, const std::string& query,
                             std::chrono::milliseconds timeout) = 0;
};

struct EvalOptions {
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds service_timeout{10000};
  FederationClient* federation = nullptr;
  // Distinct binding tuples sent per remote request.
  std::size_t service_batch = 50;
};

ResultTable evaluate(const store::Snapshot& data, const Query& query, const EvalOptions& options = {});

// parse_query + evaluate.
ResultTable run_query(const store::Snapshot& data, std::string_view text, const EvalOptions& options = {});

}  // namespace kgforge::sparql
