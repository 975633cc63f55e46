// Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails.

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <regex>
#include <thread>

#include "corpus_oracle.hpp"
#include "kgforge/fixtures/corpus.hpp"
#include "kgforge/mapping/yarrrml.hpp"
#include "kgforge/materialize/materializer.hpp"
#include "kgforge/rdf/ntriples.hpp"
#include "kgforge/service/server.hpp"
#include "kgforge/sparql/engine.hpp"
#include "kgforge/sparql/federation.hpp"
#include "sparql_fuzz.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace kgforge;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kMappingSeconds = 1.0;
constexpr double kOracleSeconds = 30.0;
constexpr double kPartitionSeconds = 60.0;
constexpr double kQuerySeconds = 1.0;
constexpr double kFuzzSeconds = 300.0;
constexpr int kFuzzCases = 500;
constexpr double kLoadSeconds = 60.0;
constexpr double kPointQueryMillis = 100.0;
constexpr std::size_t kDeskTriples = 1000000;

const std::string kWikidataEndpoint = "https://query.wikidata.org/sparql";

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
}

materialize::MaterializationReport materialize_corpus(const fs::path& dir, const fs::path& out, unsigned jobs) {
  materialize::MaterializeOptions o;
  o.data_dir = dir;
  o.out_dir = out;
  o.jobs = jobs;
  return materialize::materialize_all(materialize::load_mappings(dir / "mappings"), o);
}

std::vector<std::string> graph_lines(const fs::path& file) {
  std::vector<std::string> out;
  for (const auto& t : rdf::parse_ntriples_file(file.string())) out.push_back(t.to_ntriples());
  std::sort(out.begin(), out.end());
  return out;
}

std::string percent_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

unsigned hardware_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Corpora shared by several criteria, generated once at m scale.
struct Corpora {
  testing::TempDir root;
  std::map<std::uint64_t, fs::path> dirs;
  std::map<std::uint64_t, materialize::MaterializationReport> reports;
  std::map<std::uint64_t, double> seconds;

  const fs::path& get(std::uint64_t seed) {
    if (!dirs.count(seed)) {
      fs::path dir = root / ("seed" + std::to_string(seed));
      auto start = Clock::now();
      fixtures::generate(fixtures::CorpusSpec::for_scale("m", seed), dir);
      reports[seed] = materialize_corpus(dir, dir / "graphs", hardware_jobs());
      seconds[seed] = since(start);
      dirs[seed] = dir;
    }
    return dirs[seed];
  }
};

Outcome mapping_golden() {
  auto start = Clock::now();
  auto dir = testing::data_dir();
  std::vector<materialize::EntityMapping> entities = {
      {"notebooks", mapping::parse_yarrrml_file(dir / "notebooks.yml")},
      {"article", mapping::parse_yarrrml_file(dir / "article.yml")}};
  materialize::SourceCatalog sources(dir / "notebooks_example");
  std::vector<std::string> lines;
  for (const auto& o : materialize::materialize_entities(entities, sources, 1)) {
    for (const auto& t : o.triples) lines.push_back(t.to_ntriples());
  }
  std::sort(lines.begin(), lines.end());
  auto expected = testing::sorted_lines(dir / "notebooks_example" / "expected.nt");
  double secs = since(start);
  bool same = lines == expected;
  return {same && secs < kMappingSeconds, std::to_string(lines.size()) + " triples, " +
                                              (same ? "set equal" : "SET DIFFERS") + ", " + fmt("%.3f s", secs) +
                                              " (limit 1 s)"};
}

Outcome oracle_equivalence(Corpora& corpora) {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto& dir = corpora.get(seed);
    std::size_t triples = 0, mismatched = 0;
    for (const auto& entity : fixtures::entity_names()) {
      auto got = graph_lines(dir / "graphs" / (entity + ".nt"));
      if (got != corpus_oracle::expected_graph(dir / "data", entity)) ++mismatched;
      triples += got.size();
    }
    double secs = corpora.seconds[seed];
    ok = ok && mismatched == 0 && secs < kOracleSeconds && triples > 0;
    detail += "seed " + std::to_string(seed) + ": " + std::to_string(triples) + " triples, " +
              std::to_string(mismatched) + " graphs differ, " + fmt("%.2f s", secs) + "; ";
  }
  return {ok, detail + "limit 30 s per seed"};
}

Outcome partition_correctness(Corpora& corpora) {
  const auto& dir = corpora.get(1);
  auto start = Clock::now();
  std::map<unsigned, std::map<std::string, std::vector<std::string>>> outputs;
  for (unsigned jobs : {1u, 4u, 8u}) {
    fs::path out = dir / ("partition_j" + std::to_string(jobs));
    materialize_corpus(dir, out, jobs);
    for (const auto& entity : fixtures::entity_names()) {
      outputs[jobs][entity] = testing::sorted_lines(out / (entity + ".nt"));
    }
  }
  bool identical = outputs[1] == outputs[4] && outputs[1] == outputs[8];
  std::vector<std::string> all;
  for (const auto& [entity, lines] : outputs[1]) all.insert(all.end(), lines.begin(), lines.end());
  std::sort(all.begin(), all.end());
  std::size_t before = all.size();
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::size_t removed = before - all.size();
  double secs = since(start);
  return {identical && removed == 0 && secs < kPartitionSeconds,
          std::string("jobs 1/4/8 ") + (identical ? "identical" : "DIFFER") + ", dedup removed " +
              std::to_string(removed) + " of " + std::to_string(before) + ", " + fmt("%.2f s", secs) +
              " (limit 60 s)"};
}

Outcome report_format(Corpora& corpora) {
  corpora.get(1);
  std::ostringstream csv;
  corpora.reports[1].write_csv(csv);
  auto table = materialize::parse_csv(csv.str());
  const std::vector<std::string> header = {"Entity", "Time (in sec)", "No. of mappings", "Triples generated",
                                           "File Size"};
  if (table.header != header) return {false, "header differs"};
  if (table.rows.size() != fixtures::entity_names().size() + 1) {
    return {false, std::to_string(table.rows.size()) + " rows"};
  }
  std::size_t mappings = 0, triples = 0;
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    mappings += std::stoull(table.rows[i][2]);
    triples += std::stoull(table.rows[i][3]);
  }
  const auto& total = table.rows.back();
  bool ok = total[0] == "Total" && std::stoull(total[2]) == mappings && std::stoull(total[3]) == triples;
  return {ok, "5 columns, " + std::to_string(table.rows.size() - 1) + " entities, total row " + total[2] +
                  " mappings / " + total[3] + " triples / " + total[4] +
                  (ok ? " (column sums match)" : " (SUMS DIFFER)")};
}

Outcome query_conformance(Corpora& corpora) {
  const auto& dir = corpora.get(1);
  std::string query;
  for (const auto& e : service::load_catalog(testing::config_dir() / "catalog")) {
    if (e.id == "explore-07-ten-reproduced-notebooks") query = e.query;
  }
  if (query.empty()) return {false, "figure query missing from catalog"};

  auto nb = materialize::read_csv(dir / "data/notebooks.csv");
  auto repos = materialize::read_csv(dir / "data/repositories.csv");
  auto execs = materialize::read_csv(dir / "data/executions.csv");
  std::map<std::string, std::string> url_of;
  for (const auto& r : repos.rows) url_of[r[repos.column_index("id")]] = r[repos.column_index("url")];
  std::map<std::string, std::pair<std::string, long>> notebook_of;
  for (const auto& n : nb.rows) {
    notebook_of[n[nb.column_index("id")]] = {
        url_of.at(n[nb.column_index("repository_id")]) + "/blob/master/" + percent_encode(n[nb.column_index("name")]),
        std::stol(n[nb.column_index("total_cells")])};
  }
  struct Row {
    std::string url;
    long cells;
    double duration;
  };
  std::vector<Row> expected;
  for (const auto& e : execs.rows) {
    if (e[execs.column_index("processed")] != std::to_string(fixtures::kReproducedStatus)) continue;
    const auto& [url, cells] = notebook_of.at(e[execs.column_index("notebook_id")]);
    expected.push_back({url, cells, std::stod(e[execs.column_index("duration")])});
  }
  std::size_t qualifying = expected.size();
  std::sort(expected.begin(), expected.end(), [](const Row& a, const Row& b) {
    return a.cells != b.cells ? a.cells > b.cells : a.duration > b.duration;
  });
  expected.resize(std::min<std::size_t>(expected.size(), 10));

  store::TripleStore store;
  store.load_manifest(dir / "manifest.csv");
  auto start = Clock::now();
  auto table = sparql::run_query(*store.snapshot(), query);
  double secs = since(start);

  bool equal = table.rows.size() == expected.size();
  for (std::size_t i = 0; equal && i < expected.size(); ++i) {
    equal = table.rows[i][0]->value() == expected[i].url && std::stol(table.rows[i][1]->value()) == expected[i].cells &&
            std::stod(table.rows[i][2]->value()) == expected[i].duration;
  }
  return {equal && table.rows.size() == 10 && qualifying >= 10 && secs < kQuerySeconds,
          std::to_string(table.rows.size()) + " rows from " + std::to_string(qualifying) + " qualifying executions, " +
              (equal ? "equal to oracle" : "DIFFERS FROM ORACLE") + ", " + fmt("%.3f s", secs) + " (limit 1 s)"};
}

Outcome engine_fuzz() {
  std::mt19937_64 rng(20240611);
  auto start = Clock::now();
  for (int i = 0; i < kFuzzCases; ++i) {
    auto failure = sparql_fuzz::run_case(rng);
    if (!failure.empty()) return {false, "case " + std::to_string(i) + ": " + failure};
  }
  double secs = since(start);
  return {secs < kFuzzSeconds, std::to_string(kFuzzCases) + " datasets agree with the brute-force evaluator, " +
                                   fmt("%.1f s", secs) + " (limit 300 s)"};
}

struct Services {
  std::shared_ptr<store::TripleStore> store = std::make_shared<store::TripleStore>();
  std::shared_ptr<store::TripleStore> wikidata = std::make_shared<store::TripleStore>();
  std::unique_ptr<service::Server> mock, server;
  int mock_port = 0, port = 0;

  explicit Services(const fs::path& dir) {
    store->load_manifest(dir / "manifest.csv");
    wikidata->load_manifest(dir / "wikidata-manifest.csv");
    mock = std::make_unique<service::Server>(wikidata, service::ServiceConfig{});
    mock_port = mock->bind("127.0.0.1", 0);
    mock->start();
    auto config = service::load_service_config(testing::config_dir());
    config.federation.redirects[kWikidataEndpoint] = "http://127.0.0.1:" + std::to_string(mock_port) + "/query";
    server = std::make_unique<service::Server>(store, config);
    port = server->bind("127.0.0.1", 0);
    server->start();
  }
  ~Services() {
    server->stop();
    mock->stop();
  }
};

Outcome federation(Corpora& corpora, Services& services) {
  const auto& dir = corpora.get(1);
  std::map<std::string, std::set<std::string>> items_by_doi;
  for (const auto& t : rdf::parse_ntriples_file((dir / "wikidata/wikidata.nt").string())) {
    if (t.predicate.value() == "http://www.wikidata.org/prop/direct/P356") {
      items_by_doi[t.object.value()].insert(t.subject.value());
    }
  }
  auto articles = materialize::read_csv(dir / "data/articles.csv");
  std::set<std::pair<std::string, std::string>> expected;
  for (const auto& row : articles.rows) {
    for (const auto& item : items_by_doi[row[articles.column_index("doi")]]) {
      expected.insert({corpus_oracle::kBase + "article_" + row[articles.column_index("id")], item});
    }
  }

  std::string query;
  for (const auto& e : services.server->catalog()) {
    if (e.id == "federation-01-doi") query = e.query;
  }
  httplib::Client c("127.0.0.1", services.port);
  c.set_read_timeout(60, 0);
  auto res = c.Post("/query", query, "application/sparql-query");
  if (!res || res->status != 200) return {false, "DOI query failed"};
  std::set<std::pair<std::string, std::string>> got;
  auto doc = json::parse(res->body);
  for (const auto& b : doc["results"]["bindings"]) {
    got.insert({b["article"]["value"].get<std::string>(), b["item"]["value"].get<std::string>()});
  }
  bool match = got == expected && !expected.empty();

  sparql::HttpFederationOptions down;
  down.allow.insert(kWikidataEndpoint);
  down.redirects[kWikidataEndpoint] = "http://127.0.0.1:1/query";
  sparql::HttpFederationClient client(down);
  sparql::EvalOptions o;
  o.federation = &client;
  o.service_timeout = std::chrono::milliseconds(2000);
  std::string down_result = "no error";
  try {
    sparql::run_query(*services.store->snapshot(), query, o);
  } catch (const sparql::FederationError& e) {
    down_result = e.endpoint() == kWikidataEndpoint ? "FederationError" : "FederationError for wrong endpoint";
  }
  bool down_ok = down_result == "FederationError";
  return {match && down_ok, std::to_string(got.size()) + " DOI matches, oracle " + std::to_string(expected.size()) +
                                (match ? " (equal)" : " (DIFFER)") + "; endpoint down: " + down_result};
}

Outcome protocol(Services& services) {
  httplib::Client c("127.0.0.1", services.port);
  c.set_read_timeout(60, 0);
  auto entries = json::parse(c.Get("/catalog")->body);
  std::size_t ok = 0;
  std::string bad;
  for (const auto& e : entries) {
    auto res = c.Post("/query", e["query"].get<std::string>(), "application/sparql-query");
    bool good = res && res->status == 200;
    if (good) {
      auto doc = json::parse(res->body, nullptr, false);
      good = !doc.is_discarded() && doc["head"]["vars"].is_array() && doc["results"]["bindings"].is_array();
    }
    if (good) {
      ++ok;
    } else {
      bad += " " + e["id"].get<std::string>();
    }
  }
  auto err = c.Get("/query?query=" + httplib::detail::encode_url("SELECT ?x WHERE {\n  ?x ?y\n}"));
  bool positioned = false;
  std::string where;
  if (err && err->status == 400) {
    auto doc = json::parse(err->body);
    positioned = doc.contains("line") && doc.contains("column");
    if (positioned) where = "line " + doc["line"].dump() + " column " + doc["column"].dump();
  }
  return {ok == entries.size() && !entries.empty() && positioned,
          std::to_string(ok) + "/" + std::to_string(entries.size()) +
              " catalog entries return 200 with JSON results" + (bad.empty() ? "" : " (failed:" + bad + ")") +
              "; malformed query: " + (positioned ? "400 at " + where : "NO POSITIONED 400")};
}

Outcome ethics(Corpora& corpora) {
  std::regex email(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
  std::size_t literals = 0, hits = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto& dir = corpora.get(seed);
    for (const auto& entity : fixtures::entity_names()) {
      for (const auto& t : rdf::parse_ntriples_file((dir / "graphs" / (entity + ".nt")).string())) {
        if (!t.object.is_literal()) continue;
        ++literals;
        if (std::regex_search(t.object.value(), email)) ++hits;
      }
    }
  }
  return {hits == 0 && literals > 0,
          std::to_string(hits) + " email-pattern literals among " + std::to_string(literals) + " (seeds 1-3)"};
}

Outcome desk_scale(const fs::path& root) {
  auto spec = fixtures::CorpusSpec::for_scale("l", 1);
  spec.notebooks += spec.notebooks / 25;
  fs::path dir = root / "desk";
  fixtures::generate(spec, dir);
  materialize_corpus(dir, dir / "graphs", hardware_jobs());

  store::TripleStore store;
  auto start = Clock::now();
  store.load_manifest(dir / "manifest-full.csv");
  double load = since(start);
  auto snapshot = store.snapshot();
  std::size_t triples = snapshot->total_size();

  const std::string q =
      "PREFIX repr: <https://w3id.org/reproduceme/>\n"
      "SELECT ?repository ?stars WHERE { ?repository repr:stargazers ?stars }";
  double best = 1e9;
  std::size_t rows = 0;
  for (int i = 0; i < 5; ++i) {
    auto s = Clock::now();
    rows = sparql::run_query(*snapshot, q).rows.size();
    best = std::min(best, since(s) * 1000);
  }
  return {triples >= kDeskTriples && load < kLoadSeconds && best < kPointQueryMillis && rows > 0,
          std::to_string(triples) + " triples loaded in " + fmt("%.2f s", load) + " (limit 60 s); " +
              "predicate-bound query " + std::to_string(rows) + " rows in " + fmt("%.1f ms", best) +
              " (limit 100 ms)"};
}

}  // namespace

int main() {
  Corpora corpora;
  report("mapping-golden", mapping_golden);
  report("oracle-equivalence", [&] { return oracle_equivalence(corpora); });
  report("partition-correctness", [&] { return partition_correctness(corpora); });
  report("report-format", [&] { return report_format(corpora); });
  report("query-conformance", [&] { return query_conformance(corpora); });
  report("engine-fuzz", engine_fuzz);
  {
    std::unique_ptr<Services> services;
    try {
      services = std::make_unique<Services>(corpora.get(1));
    } catch (const std::exception& e) {
      std::cerr << "service start failed: " << e.what() << '\n';
    }
    auto need = [&](auto f) {
      return [&, f] { return services ? f(*services) : Outcome{false, "service did not start"}; };
    };
    report("federation", need([&](Services& s) { return federation(corpora, s); }));
    report("protocol", need([&](Services& s) { return protocol(s); }));
  }
  report("ethics-invariant", [&] { return ethics(corpora); });
  report("desk-scale-performance", [&] { return desk_scale(corpora.root.path()); });
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
