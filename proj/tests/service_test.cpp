#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <thread>

#include "kgforge/fixtures/corpus.hpp"
#include "kgforge/materialize/csv.hpp"
#include "kgforge/materialize/materializer.hpp"
#include "kgforge/rdf/ntriples.hpp"
#include "kgforge/service/server.hpp"

namespace fs = std::filesystem;
using namespace kgforge;
using nlohmann::json;

namespace {

const std::string kRepr = "https://w3id.org/reproduceme/";
const std::string kWikidataEndpoint = "https://query.wikidata.org/sparql";

struct Corpus {
  fs::path dir;
  std::shared_ptr<store::TripleStore> store = std::make_shared<store::TripleStore>();
  std::shared_ptr<store::TripleStore> wikidata = std::make_shared<store::TripleStore>();
  std::unique_ptr<service::Server> mock;
  std::unique_ptr<service::Server> server;
  int port = 0;

  Corpus() {
    dir = fs::temp_directory_path() / ("kgforge_service_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    auto spec = fixtures::CorpusSpec::for_scale("s", 7);
    spec.reproduced_fraction = 0.4;
    fixtures::generate(spec, dir);
    materialize::MaterializeOptions o;
    o.data_dir = dir;
    o.out_dir = dir / "graphs";
    materialize::materialize_all(materialize::load_mappings(dir / "mappings"), o);
    store->load_manifest(dir / "manifest.csv");
    wikidata->load_manifest(dir / "wikidata-manifest.csv");

    mock = std::make_unique<service::Server>(wikidata, service::ServiceConfig{});
    int mock_port = mock->bind("127.0.0.1", 0);
    mock->start();

    auto config = service::load_service_config(KGFORGE_CONFIG_DIR);
    config.federation.redirects[kWikidataEndpoint] = "http://127.0.0.1:" + std::to_string(mock_port) + "/query";
    server = std::make_unique<service::Server>(store, config);
    port = server->bind("127.0.0.1", 0);
    server->start();
  }
  ~Corpus() {
    server->stop();
    mock->stop();
    fs::remove_all(dir);
  }

};

Corpus& corpus() {
  static Corpus c;
  return c;
}

httplib::Client client(int port) {
  httplib::Client c("127.0.0.1", port);
  c.set_read_timeout(60, 0);
  return c;
}

json bindings(const std::string& body) { return json::parse(body).at("results").at("bindings"); }

std::set<std::pair<std::string, std::string>> pairs(const json& rows, const std::string& a, const std::string& b) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& r : rows) out.insert({r.at(a).at("value").get<std::string>(), r.at(b).at("value").get<std::string>()});
  return out;
}

std::string catalog_query(const std::string& id) {
  for (const auto& e : corpus().server->catalog()) {
    if (e.id == id) return e.query;
  }
  throw std::runtime_error("no catalog entry " + id);
}

}  // namespace

TEST(ServiceProtocol, GetLimitOne) {
  auto c = client(corpus().port);
  auto res = c.Get("/query?query=" + httplib::detail::encode_url("SELECT * WHERE { ?s ?p ?o } LIMIT 1"));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/sparql-results+json");
  EXPECT_EQ(res->get_header_value("X-Result-Truncated"), "false");
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  auto doc = json::parse(res->body);
  EXPECT_EQ(doc["head"]["vars"], json::array({"s", "p", "o"}));
  EXPECT_EQ(doc["results"]["bindings"].size(), 1u);
}

TEST(ServiceProtocol, PostFigureQueryAllEncodings) {
  auto c = client(corpus().port);
  auto q = catalog_query("explore-07-ten-reproduced-notebooks");
  auto raw = c.Post("/query", q, "application/sparql-query");
  ASSERT_TRUE(raw);
  ASSERT_EQ(raw->status, 200) << raw->body;
  EXPECT_EQ(bindings(raw->body).size(), 10u);

  auto form = c.Post("/query", httplib::Params{{"query", q}});
  ASSERT_TRUE(form);
  EXPECT_EQ(form->body, raw->body);

  httplib::Headers accept{{"Accept", "text/csv"}};
  auto csv = c.Post("/query", accept, q, "application/sparql-query");
  ASSERT_TRUE(csv);
  EXPECT_EQ(csv->status, 200);
  EXPECT_EQ(csv->body.rfind("notebook_url,total_cells,duration\r\n", 0), 0u);
  EXPECT_EQ(std::count(csv->body.begin(), csv->body.end(), '\n'), 11);
}

TEST(ServiceProtocol, ErrorsAreStructured) {
  auto c = client(corpus().port);
  auto res = c.Get("/query?query=" + httplib::detail::encode_url("SELECT {"));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  auto doc = json::parse(res->body);
  EXPECT_TRUE(doc.contains("error"));
  EXPECT_EQ(doc["line"], 1);
  EXPECT_GE(doc["column"].get<int>(), 1);

  res = c.Get("/query?query=" + httplib::detail::encode_url("ASK { ?s ?p ?o }"));
  EXPECT_EQ(res->status, 400);
  res = c.Get("/query");
  EXPECT_EQ(res->status, 400);
  res = c.Get("/query?format=xml&query=" + httplib::detail::encode_url("SELECT * WHERE { ?s ?p ?o }"));
  EXPECT_EQ(res->status, 400);
}

TEST(ServiceProtocol, CorsPreflight) {
  auto c = client(corpus().port);
  auto res = c.Options("/query");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_NE(res->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST(ServiceCatalog, EveryEntryRuns) {
  auto c = client(corpus().port);
  auto res = c.Get("/catalog");
  ASSERT_TRUE(res);
  auto entries = json::parse(res->body);
  ASSERT_GE(entries.size(), 20u);
  for (const auto& e : entries) {
    auto r = c.Post("/query", e["query"].get<std::string>(), "application/sparql-query");
    ASSERT_TRUE(r) << e["id"];
    EXPECT_EQ(r->status, 200) << e["id"] << ": " << r->body;
    if (r->status == 200) {
      EXPECT_NO_THROW(bindings(r->body)) << e["id"];
    }
  }
}

TEST(ServiceCatalog, Categories) {
  auto c = client(corpus().port);
  auto fed = json::parse(c.Get("/catalog?category=federation")->body);
  EXPECT_EQ(fed.size(), 3u);
  for (const auto& e : fed) {
    EXPECT_NE(e["query"].get<std::string>().find("SERVICE <" + kWikidataEndpoint + ">"), std::string::npos);
  }
  auto exploration = json::parse(c.Get("/catalog?category=exploration")->body);
  std::set<std::string> titles;
  for (const auto& e : exploration) titles.insert(e["title"].get<std::string>());
  EXPECT_TRUE(titles.count("Most common errors in immunology"));
  EXPECT_TRUE(titles.count("Repositories by their stargazers count"));
  EXPECT_TRUE(titles.count("Ten successfully reproduced Jupyter notebooks"));
  EXPECT_GE(json::parse(c.Get("/catalog?category=reproduce-figures")->body).size(), 10u);
  EXPECT_EQ(json::parse(c.Get("/catalog?category=nothing")->body).size(), 0u);
}

TEST(ServiceFederation, DoiJoinMatchesOracle) {
  auto& cp = corpus();
  std::map<std::string, std::set<std::string>> items_by_doi;
  for (const auto& t : rdf::parse_ntriples_file((cp.dir / "wikidata/wikidata.nt").string())) {
    if (t.predicate.value() == "http://www.wikidata.org/prop/direct/P356") {
      items_by_doi[t.object.value()].insert(t.subject.value());
    }
  }
  auto articles = materialize::read_csv(cp.dir / "data/articles.csv");
  int id = articles.column_index("id"), doi = articles.column_index("doi");
  std::set<std::pair<std::string, std::string>> expected;
  for (const auto& row : articles.rows) {
    for (const auto& item : items_by_doi[row[doi]]) expected.insert({kRepr + "article_" + row[id], item});
  }
  ASSERT_FALSE(expected.empty());

  auto c = client(cp.port);
  auto res = c.Post("/query", catalog_query("federation-01-doi"), "application/sparql-query");
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(pairs(bindings(res->body), "article", "item"), expected);
}

TEST(ServiceFederation, MalayalamLabels) {
  auto c = client(corpus().port);
  auto res = c.Post("/query", catalog_query("federation-03-mesh-malayalam"), "application/sparql-query");
  ASSERT_EQ(res->status, 200) << res->body;
  auto rows = bindings(res->body);
  ASSERT_FALSE(rows.empty());
  for (const auto& r : rows) EXPECT_EQ(r["label_ml"]["xml:lang"], "ml");
}

TEST(ServiceFederation, UnreachableEndpoint) {
  auto& cp = corpus();
  auto config = service::load_service_config(KGFORGE_CONFIG_DIR);
  config.federation.redirects[kWikidataEndpoint] = "http://127.0.0.1:1/query";
  config.service_timeout = std::chrono::milliseconds(2000);
  service::Server s(cp.store, config);
  int port = s.bind("127.0.0.1", 0);
  s.start();
  auto c = client(port);
  auto res = c.Post("/query", catalog_query("federation-02-pmcid"), "application/sparql-query");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 500);
  EXPECT_EQ(json::parse(res->body)["endpoint"], kWikidataEndpoint);

  res = c.Post("/query", "SELECT * WHERE { SERVICE <http://example.org/sparql> { ?s ?p ?o } }",
               "application/sparql-query");
  EXPECT_EQ(res->status, 500);
  EXPECT_EQ(json::parse(res->body)["endpoint"], "http://example.org/sparql");
  s.stop();
}

TEST(ServiceProfile, RepositoryMatchesJoinOracle) {
  auto& cp = corpus();
  auto notebooks = materialize::read_csv(cp.dir / "data/notebooks.csv");
  auto releases = materialize::read_csv(cp.dir / "data/releases.csv");
  auto repos = materialize::read_csv(cp.dir / "data/repositories.csv");
  int nb_id = notebooks.column_index("id"), nb_repo = notebooks.column_index("repository_id");
  int rel_repo = releases.column_index("repository_id");
  int repo_id = repos.column_index("id"), repo_article = repos.column_index("article_id");

  auto c = client(cp.port);
  for (const auto& repo : repos.rows) {
    std::string iri = kRepr + "repository_" + repo[repo_id];
    std::set<std::string> expected_notebooks;
    for (const auto& n : notebooks.rows) {
      if (n[nb_repo] == repo[repo_id]) expected_notebooks.insert(kRepr + "notebook_" + n[nb_id]);
    }
    std::size_t expected_releases = 0;
    for (const auto& r : releases.rows) expected_releases += r[rel_repo] == repo[repo_id];

    auto res = c.Get("/profile/Repository?iri=" + httplib::detail::encode_url(iri));
    ASSERT_EQ(res->status, 200) << res->body;
    auto doc = json::parse(res->body);
    EXPECT_EQ(doc["type"], "Repository");
    std::map<std::string, json> aspects;
    for (const auto& a : doc["aspects"]) {
      ASSERT_TRUE(a.contains("results")) << a.dump();
      aspects[a["name"]] = a["results"]["results"]["bindings"];
    }
    ASSERT_EQ(aspects.size(), 4u);
    std::set<std::string> got;
    for (const auto& r : aspects["notebooks"]) got.insert(r["notebook"]["value"].get<std::string>());
    EXPECT_EQ(got, expected_notebooks) << iri;
    EXPECT_EQ(aspects["releases"].size(), expected_releases) << iri;
    ASSERT_EQ(aspects["article"].size(), 1u);
    EXPECT_EQ(aspects["article"][0]["article"]["value"], kRepr + "article_" + repo[repo_article]);
    EXPECT_FALSE(aspects["metadata"].empty());
  }
}

TEST(ServiceProfile, EveryTypeAndErrors) {
  auto c = client(corpus().port);
  std::map<std::string, std::string> samples = {{"Notebook", "notebook_1"}, {"Repository", "repository_1"},
                                                {"Article", "article_1"},    {"Journal", "journal_1"},
                                                {"Author", "author_1"},      {"MESH", "mesh_1"}};
  for (const auto& [type, local] : samples) {
    auto res = c.Get("/profile/" + type + "?iri=" + httplib::detail::encode_url(kRepr + local));
    ASSERT_EQ(res->status, 200) << type;
    auto found = json::parse(res->body);
    for (const auto& a : found["aspects"]) {
      ASSERT_TRUE(a.contains("results")) << type << " " << a.dump();
    }
    auto missing = c.Get("/profile/" + type + "?iri=" + httplib::detail::encode_url(kRepr + "does_not_exist"));
    ASSERT_EQ(missing->status, 200);
    auto empty = json::parse(missing->body);
    for (const auto& a : empty["aspects"]) {
      EXPECT_TRUE(a["results"]["results"]["bindings"].empty()) << type << " " << a["name"];
    }
  }
  EXPECT_EQ(c.Get("/profile/Gene?iri=" + httplib::detail::encode_url(kRepr + "x"))->status, 404);
  EXPECT_EQ(c.Get("/profile/Notebook")->status, 400);
  EXPECT_EQ(c.Get("/profile/Notebook?iri=" + httplib::detail::encode_url("not an iri"))->status, 400);
  EXPECT_EQ(c.Get("/profile/Notebook?iri=" + httplib::detail::encode_url("https://x.org/a> } #"))->status, 400);
}

TEST(ServiceLimits, TruncateOrReject) {
  auto& cp = corpus();
  service::ServiceConfig config;
  config.row_cap = 5;
  service::Server lenient(cp.store, config);
  int p1 = lenient.bind("127.0.0.1", 0);
  lenient.start();
  config.strict_row_cap = true;
  service::Server strict(cp.store, config);
  int p2 = strict.bind("127.0.0.1", 0);
  strict.start();

  std::string q = "/query?query=" + httplib::detail::encode_url("SELECT * WHERE { ?s ?p ?o }");
  auto res = client(p1).Get(q);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("X-Result-Truncated"), "true");
  EXPECT_EQ(bindings(res->body).size(), 5u);
  EXPECT_EQ(client(p2).Get(q)->status, 413);
  auto small = client(p2).Get("/query?query=" + httplib::detail::encode_url("SELECT * WHERE { ?s ?p ?o } LIMIT 5"));
  EXPECT_EQ(small->status, 200);
  EXPECT_EQ(small->get_header_value("X-Result-Truncated"), "false");
  lenient.stop();
  strict.stop();
}

TEST(ServiceLimits, Timeout) {
  service::ServiceConfig config;
  config.timeout = std::chrono::milliseconds(1);
  service::Server s(corpus().store, config);
  int port = s.bind("127.0.0.1", 0);
  s.start();
  auto res = client(port).Get("/query?query=" +
                              httplib::detail::encode_url("SELECT * WHERE { ?a ?b ?c . ?d ?e ?f . ?g ?h ?i }"));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 504);
  s.stop();
}

TEST(ServiceAdmin, LoadReplaceAndFail) {
  auto& cp = corpus();
  auto store = std::make_shared<store::TripleStore>();
  service::Server s(store, service::ServiceConfig{});
  int port = s.bind("127.0.0.1", 0);
  s.start();
  auto c = client(port);

  auto res = c.Post("/admin/load", httplib::Params{{"manifest", (cp.dir / "manifest.csv").string()}});
  ASSERT_EQ(res->status, 200) << res->body;
  auto doc = json::parse(res->body);
  EXPECT_EQ(doc["graphs"].size(), 18u);
  std::size_t total = doc["total"];
  EXPECT_EQ(total, cp.store->snapshot()->total_size());

  fs::path broken = cp.dir / "broken.csv";
  std::ofstream(broken) << "graph_iri,path\nurn:g," << (cp.dir / "graphs/missing.nt").string() << "\n";
  res = c.Post("/admin/load", json{{"manifest", broken.string()}}.dump(), "application/json");
  EXPECT_EQ(res->status, 409);
  EXPECT_NE(json::parse(res->body)["file"].get<std::string>().find("missing.nt"), std::string::npos);
  EXPECT_EQ(json::parse(c.Get("/health")->body)["triples"], total);

  fs::path empty = cp.dir / "empty.csv";
  std::ofstream(empty) << "graph_iri,path\n";
  res = c.Post("/admin/load", httplib::Params{{"manifest", empty.string()}});
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["total"], 0);
  auto count = c.Get("/query?query=" + httplib::detail::encode_url("SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }"));
  EXPECT_EQ(bindings(count->body)[0]["n"]["value"], "0");
  s.stop();

  service::ServiceConfig locked;
  locked.admin = false;
  service::Server l(store, locked);
  int lport = l.bind("127.0.0.1", 0);
  l.start();
  EXPECT_EQ(client(lport).Post("/admin/load", httplib::Params{{"manifest", empty.string()}})->status, 403);
  l.stop();
}

TEST(ServiceAdmin, ReadersSeeWholeSnapshots) {
  auto& cp = corpus();
  auto store = std::make_shared<store::TripleStore>();
  store->load_manifest(cp.dir / "manifest.csv");
  std::size_t small = store->snapshot()->total_size();
  service::Server s(store, service::ServiceConfig{});
  int port = s.bind("127.0.0.1", 0);
  s.start();

  std::atomic<bool> done{false};
  std::set<std::string> seen;
  std::thread reader([&] {
    auto c = client(port);
    std::string q = "/query?query=" + httplib::detail::encode_url("SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }");
    while (!done) {
      auto res = c.Get(q);
      if (res && res->status == 200) seen.insert(bindings(res->body)[0]["n"]["value"].get<std::string>());
    }
  });
  std::size_t full = 0;
  for (int i = 0; i < 4; ++i) {
    auto loads = store->load_manifest(cp.dir / (i % 2 ? "manifest.csv" : "manifest-full.csv"));
    if (i % 2 == 0) {
      full = 0;
      for (const auto& l : loads) full += l.triples;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  done = true;
  reader.join();
  s.stop();
  ASSERT_FALSE(seen.empty());
  for (const auto& n : seen) {
    EXPECT_TRUE(n == std::to_string(small) || n == std::to_string(full)) << n;
  }
}
