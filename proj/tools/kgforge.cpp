#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "kgforge/fixtures/corpus.hpp"
#include "kgforge/mapping/rml.hpp"
#include "kgforge/mapping/yarrrml.hpp"
#include "kgforge/materialize/materializer.hpp"
#include "kgforge/rdf/ntriples.hpp"
#include "kgforge/service/server.hpp"
#include "kgforge/sparql/engine.hpp"
#include "kgforge/sparql/results.hpp"

namespace fs = std::filesystem;
using namespace kgforge;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<materialize::SuppressedColumn> parse_suppressed(const std::vector<std::string>& specs) {
  std::vector<materialize::SuppressedColumn> out;
  for (const auto& s : specs) {
    auto colon = s.rfind(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--suppress", "expected <source>:<column>");
    out.push_back({s.substr(0, colon), s.substr(colon + 1)});
  }
  return out;
}

materialize::MaterializationReport run_materialize(const fs::path& mappings, const fs::path& data, const fs::path& out,
                                                   unsigned jobs,
                                                   const std::vector<materialize::SuppressedColumn>& suppressed) {
  materialize::MaterializeOptions o;
  o.data_dir = data;
  o.out_dir = out;
  o.jobs = jobs;
  o.suppressed = suppressed;
  return materialize::materialize_all(materialize::load_mappings(mappings), o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgforge: CSV to RDF materialization, triple store and SPARQL service"};
  app.require_subcommand(1);

  // compile
  auto* compile = app.add_subcommand("compile", "Translate a YARRRML document to RML (N-Triples)");
  std::string compile_in, compile_out;
  compile->add_option("mapping", compile_in, "YARRRML file")->required()->check(CLI::ExistingFile);
  compile->add_option("-o,--out", compile_out, "Output file (default: stdout)");

  // materialize
  auto* mat = app.add_subcommand("materialize", "Generate one N-Triples graph per mapping file");
  std::string mat_mappings, mat_data = ".", mat_out, mat_report;
  unsigned mat_jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> mat_suppress;
  mat->add_option("--mappings", mat_mappings, "Mapping file or directory of *.yml")->required();
  mat->add_option("--data", mat_data, "Directory that source paths are relative to");
  mat->add_option("--out", mat_out, "Output directory")->required();
  mat->add_option("-j,--jobs", mat_jobs, "Worker threads");
  mat->add_option("--report", mat_report, "Write the statistics table as CSV");
  mat->add_option("--suppress", mat_suppress, "Column never emitted, as <source>:<column>");

  // load
  auto* load = app.add_subcommand("load", "Load a manifest and print per-graph triple counts");
  std::string load_manifest;
  load->add_option("manifest", load_manifest, "CSV of graph_iri,path")->required();

  // query
  auto* query = app.add_subcommand("query", "Run a SELECT query over a manifest's graphs");
  std::string q_manifest, q_text, q_file, q_format = "json";
  long q_timeout = 30000;
  query->add_option("--manifest", q_manifest, "CSV of graph_iri,path")->required();
  auto* q_text_opt = query->add_option("-q,--query", q_text, "Query text");
  query->add_option("-f,--file", q_file, "Query file")->excludes(q_text_opt);
  query->add_option("--format", q_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  query->add_option("--timeout", q_timeout, "Timeout in milliseconds");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the SPARQL endpoint, catalog and profiles over HTTP");
  std::string s_manifest, s_config, s_host = "127.0.0.1";
  int s_port = 7878;
  long s_row_cap = -1;
  bool s_strict = false, s_no_admin = false;
  std::vector<std::string> s_allow, s_redirect;
  serve->add_option("--manifest", s_manifest, "Dataset to load at startup");
  serve->add_option("--config", s_config, "Directory with catalog/, profiles/ and service.json");
  serve->add_option("--host", s_host, "Bind address");
  serve->add_option("-p,--port", s_port, "Port (0 picks a free one)");
  serve->add_option("--row-cap", s_row_cap, "Maximum result rows");
  serve->add_flag("--strict", s_strict, "Reject results over the row cap with 413");
  serve->add_flag("--no-admin", s_no_admin, "Disable /admin/load");
  serve->add_option("--allow", s_allow, "Allow SERVICE calls to this endpoint");
  serve->add_option("--redirect", s_redirect, "Send SERVICE calls for <endpoint>=<url> to url");

  // fixtures
  auto* fix = app.add_subcommand("fixtures", "Generate a synthetic corpus and materialize its graphs");
  std::uint64_t f_seed = 1;
  std::string f_scale = "s", f_out;
  bool f_no_materialize = false;
  unsigned f_jobs = std::max(1u, std::thread::hardware_concurrency());
  fix->add_option("--seed", f_seed, "Random seed");
  fix->add_option("--scale", f_scale, "s, m or l")->check(CLI::IsMember({"s", "m", "l"}));
  fix->add_option("--out", f_out, "Output directory")->required();
  fix->add_flag("--no-materialize", f_no_materialize, "Only write CSVs, mappings and manifests");
  fix->add_option("-j,--jobs", f_jobs, "Materialization threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compile) {
      auto doc = mapping::parse_yarrrml_file(compile_in);
      auto text = rdf::serialize_ntriples(mapping::export_rml(doc));
      if (compile_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(compile_out, std::ios::binary) << text;
      }
    } else if (*mat) {
      auto report = run_materialize(mat_mappings, mat_data, mat_out, mat_jobs, parse_suppressed(mat_suppress));
      std::cout << report.to_text();
      if (!mat_report.empty()) {
        std::ofstream out(mat_report, std::ios::binary);
        report.write_csv(out);
      }
    } else if (*load) {
      store::TripleStore store;
      auto start = std::chrono::steady_clock::now();
      auto loads = store.load_manifest(load_manifest);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::size_t total = 0;
      for (const auto& l : loads) {
        std::cout << l.graph_iri << '\t' << l.triples << '\n';
        total += l.triples;
      }
      std::cout << "total\t" << total << "\nseconds\t" << secs << '\n';
    } else if (*query) {
      if (q_text.empty() && q_file.empty()) throw std::runtime_error("give --query or --file");
      if (!q_file.empty()) q_text = slurp(q_file);
      store::TripleStore store;
      store.load_manifest(q_manifest);
      sparql::EvalOptions o;
      o.timeout = std::chrono::milliseconds(q_timeout);
      auto table = sparql::run_query(*store.snapshot(), q_text, o);
      std::cout << (q_format == "csv" ? sparql::to_csv(table) : sparql::to_json(table) + "\n");
    } else if (*serve) {
      auto config = s_config.empty() ? service::ServiceConfig{} : service::load_service_config(s_config);
      if (s_row_cap >= 0) config.row_cap = static_cast<std::size_t>(s_row_cap);
      if (s_strict) config.strict_row_cap = true;
      if (s_no_admin) config.admin = false;
      for (const auto& a : s_allow) config.federation.allow.insert(a);
      for (const auto& r : s_redirect) {
        auto eq = r.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--redirect expects <endpoint>=<url>");
        config.federation.redirects[r.substr(0, eq)] = r.substr(eq + 1);
      }
      auto store = std::make_shared<store::TripleStore>();
      if (!s_manifest.empty()) store->load_manifest(s_manifest);
      service::Server server(store, config);
      int port = server.bind(s_host, s_port);
      std::cerr << "listening on http://" << s_host << ':' << port << " (" << store->snapshot()->total_size()
                << " triples)\n";
      server.run();
    } else if (*fix) {
      auto spec = fixtures::CorpusSpec::for_scale(f_scale, f_seed);
      auto summary = fixtures::generate(spec, f_out);
      std::size_t rows = 0;
      for (const auto& [file, n] : summary.rows) rows += n;
      std::cout << "wrote " << summary.rows.size() << " CSV files (" << rows << " rows) to " << f_out << '\n';
      if (!f_no_materialize) {
        auto report = run_materialize(fs::path(f_out) / "mappings", f_out, fs::path(f_out) / "graphs", f_jobs, {});
        std::ofstream out(fs::path(f_out) / "report.csv", std::ios::binary);
        report.write_csv(out);
        std::cout << report.to_text();
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
