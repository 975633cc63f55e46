#include "kgforge/sparql/federation.hpp"

#include <httplib.h>

#include <regex>

#include "kgforge/sparql/results.hpp"

namespace kgforge::sparql {

HttpFederationClient::HttpFederationClient(HttpFederationOptions options) : options_(std::move(options)) {}

ResultTable HttpFederationClient::select(const std::string& endpoint, const std::string& query,
                                         std::chrono::milliseconds timeout) {
  if (!options_.allow.count(endpoint)) throw std::runtime_error("endpoint is not allow-listed");
  auto it = options_.redirects.find(endpoint);
  const std::string& url = it == options_.redirects.end() ? endpoint : it->second;

  static const std::regex kUrl(R"(^(https?://[^/?#]+)([^#]*)$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) throw std::runtime_error("unsupported endpoint URL '" + url + "'");
  std::string path = m[2].str().empty() ? "/" : m[2].str();

  httplib::Client client(m[1].str());
  if (!client.is_valid()) throw std::runtime_error("cannot create HTTP client for '" + url + "'");
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
  httplib::Params params{{"query", query}};
  auto res = client.Post(path, headers, params);
  if (!res) throw std::runtime_error("HTTP request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw std::runtime_error("HTTP status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  return parse_json_results(res->body);
}

}  // namespace kgforge::sparql
