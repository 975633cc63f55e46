#include "kgforge/service/server.hpp"

#include <httplib.h>

#include <fstream>
#include <json.hpp>
#include <thread>

#include "kgforge/sparql/parser.hpp"
#include "kgforge/sparql/results.hpp"

namespace kgforge::service {

namespace fs = std::filesystem;
using nlohmann::json;

ServiceConfig load_service_config(const fs::path& config_dir) {
  ServiceConfig c;
  c.config_dir = config_dir;
  fs::path file = config_dir / "service.json";
  if (!fs::exists(file)) return c;
  std::ifstream in(file);
  json j;
  try {
    j = json::parse(in);
    c.row_cap = j.value("row_cap", c.row_cap);
    c.strict_row_cap = j.value("strict_row_cap", c.strict_row_cap);
    c.timeout = std::chrono::milliseconds(j.value("timeout_ms", c.timeout.count()));
    c.service_timeout = std::chrono::milliseconds(j.value("service_timeout_ms", c.service_timeout.count()));
    c.admin = j.value("admin", c.admin);
    if (j.contains("federation")) {
      const auto& f = j.at("federation");
      json allow = f.value("allow", json::array());
      json redirects = f.value("redirects", json::object());
      for (const auto& e : allow) c.federation.allow.insert(e.get<std::string>());
      for (const auto& r : redirects.items()) {
        c.federation.redirects[r.key()] = r.value().get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return c;
}

struct Server::Impl {
  std::shared_ptr<store::TripleStore> store;
  ServiceConfig config;
  std::vector<CatalogEntry> catalog;
  std::map<std::string, ProfileTemplate> profiles;
  sparql::HttpFederationClient federation;
  httplib::Server http;
  std::thread thread;

  Impl(std::shared_ptr<store::TripleStore> s, ServiceConfig c)
      : store(std::move(s)), config(std::move(c)), federation(config.federation) {
    if (!config.config_dir.empty()) {
      if (fs::is_directory(config.config_dir / "catalog")) catalog = load_catalog(config.config_dir / "catalog");
      if (fs::is_directory(config.config_dir / "profiles")) profiles = load_profiles(config.config_dir / "profiles");
    }
    routes();
  }

  sparql::EvalOptions eval_options() {
    sparql::EvalOptions o;
    o.timeout = config.timeout;
    o.service_timeout = config.service_timeout;
    o.federation = &federation;
    return o;
  }

  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    send_json(res, status, extra);
  }

  void handle_query(const httplib::Request& req, httplib::Response& res) {
    std::string text;
    if (req.has_param("query")) {
      text = req.get_param_value("query");
    } else if (req.method == "POST" && req.get_header_value("Content-Type").rfind("application/sparql-query", 0) == 0) {
      text = req.body;
    } else if (req.method == "POST" && !req.body.empty() &&
               req.get_header_value("Content-Type").find("form-urlencoded") == std::string::npos) {
      text = req.body;
    }
    if (text.empty()) return send_error(res, 400, "missing 'query' parameter");

    bool csv = false;
    if (req.has_param("format")) {
      auto f = req.get_param_value("format");
      if (f == "csv" || f == "text/csv") {
        csv = true;
      } else if (f != "json" && f != "application/sparql-results+json" && f != "application/json") {
        return send_error(res, 400, "unsupported format '" + f + "'");
      }
    } else {
      auto accept = req.get_header_value("Accept");
      csv = accept.find("text/csv") != std::string::npos &&
            accept.find("application/sparql-results+json") == std::string::npos;
    }

    auto snapshot = store->snapshot();
    sparql::ResultTable table;
    try {
      table = sparql::run_query(*snapshot, text, eval_options());
    } catch (const sparql::SyntaxError& e) {
      return send_error(res, 400, e.what(), {{"line", e.line()}, {"column", e.column()}});
    } catch (const sparql::UnsupportedFeature& e) {
      return send_error(res, 400, e.what(), {{"line", e.line()}, {"column", e.column()}});
    } catch (const sparql::Timeout& e) {
      return send_error(res, 504, e.what());
    } catch (const sparql::FederationError& e) {
      return send_error(res, 500, e.what(), {{"endpoint", e.endpoint()}});
    } catch (const std::exception& e) {
      return send_error(res, 500, e.what());
    }

    bool truncated = table.rows.size() > config.row_cap;
    if (truncated && config.strict_row_cap) {
      return send_error(res, 413, "result has " + std::to_string(table.rows.size()) + " rows, cap is " +
                                      std::to_string(config.row_cap));
    }
    if (truncated) table.rows.resize(config.row_cap);
    res.set_header("X-Result-Truncated", truncated ? "true" : "false");
    res.status = 200;
    if (csv) {
      res.set_content(sparql::to_csv(table), "text/csv; charset=utf-8");
    } else {
      res.set_content(sparql::to_json(table), "application/sparql-results+json");
    }
  }

  void handle_catalog(const httplib::Request& req, httplib::Response& res) {
    std::string category = req.has_param("category") ? req.get_param_value("category") : "";
    json out = json::array();
    for (const auto& e : catalog) {
      if (!category.empty() && e.category != category) continue;
      out.push_back({{"id", e.id},
                     {"title", e.title},
                     {"description", e.description},
                     {"category", e.category},
                     {"query", e.query}});
    }
    send_json(res, 200, out);
  }

  void handle_profile(const httplib::Request& req, httplib::Response& res) {
    std::string type = req.matches[1];
    auto it = profiles.find(type);
    if (it == profiles.end()) return send_error(res, 404, "no profile for entity type '" + type + "'");
    if (!req.has_param("iri")) return send_error(res, 400, "missing 'iri' parameter");
    std::string iri = req.get_param_value("iri");

    auto snapshot = store->snapshot();
    json aspects = json::array();
    for (const auto& a : it->second.aspects) {
      json aspect = {{"name", a.name}, {"title", a.title}};
      try {
        std::string q = instantiate(a.query, iri);
        aspect["query"] = q;
        aspect["results"] = json::parse(sparql::to_json(sparql::run_query(*snapshot, q, eval_options())));
      } catch (const ConfigError& e) {
        return send_error(res, 400, e.what());
      } catch (const std::exception& e) {
        aspect["error"] = e.what();
      }
      aspects.push_back(std::move(aspect));
    }
    send_json(res, 200, {{"type", type}, {"iri", iri}, {"aspects", aspects}});
  }

  void handle_load(const httplib::Request& req, httplib::Response& res) {
    if (!config.admin) return send_error(res, 403, "administration is disabled");
    std::string manifest;
    if (req.has_param("manifest")) {
      manifest = req.get_param_value("manifest");
    } else if (!req.body.empty()) {
      try {
        manifest = json::parse(req.body).at("manifest").get<std::string>();
      } catch (const json::exception&) {
        return send_error(res, 400, "expected a 'manifest' parameter or JSON body {\"manifest\": path}");
      }
    }
    if (manifest.empty()) return send_error(res, 400, "missing 'manifest'");
    try {
      auto loads = store->load_manifest(manifest);
      json graphs = json::array();
      std::size_t total = 0;
      for (const auto& l : loads) {
        graphs.push_back({{"graph", l.graph_iri}, {"path", l.path.string()}, {"triples", l.triples}});
        total += l.triples;
      }
      send_json(res, 200, {{"graphs", graphs}, {"total", total}});
    } catch (const store::LoadError& e) {
      send_error(res, 409, e.what(), {{"file", e.file()}});
    } catch (const std::exception& e) {
      send_error(res, 409, e.what(), {{"file", manifest}});
    }
  }

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type, Accept"},
                              {"Access-Control-Expose-Headers", "X-Result-Truncated"}});
    http.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    auto query = [this](const httplib::Request& req, httplib::Response& res) { handle_query(req, res); };
    http.Get("/query", query);
    http.Post("/query", query);
    http.Get("/catalog", [this](const httplib::Request& req, httplib::Response& res) { handle_catalog(req, res); });
    http.Get(R"(/profile/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) { handle_profile(req, res); });
    http.Post("/admin/load", [this](const httplib::Request& req, httplib::Response& res) { handle_load(req, res); });
    http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      auto s = store->snapshot();
      send_json(res, 200, {{"status", "ok"}, {"graphs", s->graphs().size()}, {"triples", s->total_size()}});
    });
  }
};

Server::Server(std::shared_ptr<store::TripleStore> store, ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(store), std::move(config))) {}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::start() {
  impl_->thread = std::thread([this] { run(); });
  impl_->http.wait_until_ready();
}

void Server::stop() {
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

const std::vector<CatalogEntry>& Server::catalog() const { return impl_->catalog; }
const std::map<std::string, ProfileTemplate>& Server::profiles() const { return impl_->profiles; }

}  // namespace kgforge::service
