#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

#include "kgforge/service/catalog.hpp"
#include "kgforge/sparql/federation.hpp"
#include "kgforge/store/store.hpp"

namespace kgforge::service {

struct ServiceConfig {
  std::filesystem::path config_dir;  // holds catalog/ and profiles/
  std::size_t row_cap = 100000;
  bool strict_row_cap = false;  // 413 instead of truncating
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds service_timeout{10000};
  bool admin = true;
  sparql::HttpFederationOptions federation;
};

// Reads <config_dir>/service.json when present. Keys: row_cap, strict_row_cap,
// timeout_ms, service_timeout_ms, admin, federation.allow, federation.redirects.
ServiceConfig load_service_config(const std::filesystem::path& config_dir);

// HTTP endpoints: GET/POST /query, GET /catalog, GET /profile/<type>,
// POST /admin/load, GET /health.
class Server {
 public:
  Server(std::shared_ptr<store::TripleStore> store, ServiceConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); bind() first.
  void run();
  // run() on a background thread.
  void start();
  void stop();

  const std::vector<CatalogEntry>& catalog() const;
  const std::map<std::string, ProfileTemplate>& profiles() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kgforge::service
