#include "kgforge/service/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kgforge/rdf/prefix_map.hpp"
#include "kgforge/rdf/term.hpp"
#include "kgforge/sparql/parser.hpp"

namespace kgforge::service {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCategories = {"reproduce-figures", "exploration", "federation"};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<fs::path> query_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: '" + dir.string() + "'");
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".rq") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void check_parses(const std::string& query, const fs::path& file) {
  try {
    sparql::parse_query(query);
  } catch (const std::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
  return n;
}

}  // namespace

std::map<std::string, std::string> read_header(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#+", 0) != 0) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    out[trim(line.substr(2, colon - 2))] = trim(line.substr(colon + 1));
  }
  return out;
}

std::vector<CatalogEntry> load_catalog(const fs::path& dir) {
  std::vector<CatalogEntry> out;
  for (const auto& file : query_files(dir)) {
    std::string text = slurp(file);
    auto header = read_header(text);
    CatalogEntry e{file.stem().string(), header["title"], header["description"], header["category"], text};
    if (e.title.empty()) throw ConfigError(file.string() + ": missing '#+ title:' header");
    if (std::find(kCategories.begin(), kCategories.end(), e.category) == kCategories.end()) {
      throw ConfigError(file.string() + ": unknown category '" + e.category + "'");
    }
    check_parses(text, file);
    out.push_back(std::move(e));
  }
  return out;
}

std::map<std::string, ProfileTemplate> load_profiles(const fs::path& dir) {
  std::map<std::string, ProfileTemplate> out;
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: '" + dir.string() + "'");
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_directory()) continue;
    ProfileTemplate t{e.path().filename().string(), {}};
    for (const auto& file : query_files(e.path())) {
      std::string text = slurp(file);
      if (occurrences(text, kEntityPlaceholder) != 1) {
        throw ConfigError(file.string() + ": placeholder " + kEntityPlaceholder + " must appear exactly once");
      }
      check_parses(instantiate(text, "https://example.org/entity"), file);
      auto header = read_header(text);
      t.aspects.push_back({file.stem().string(), header.count("title") ? header["title"] : file.stem().string(), text});
    }
    out.emplace(t.type, std::move(t));
  }
  return out;
}

std::string instantiate(const std::string& query, const std::string& iri) {
  if (!rdf::has_uri_scheme(iri) || !rdf::is_valid_iri(iri)) throw ConfigError("invalid entity IRI '" + iri + "'");
  auto pos = query.find(kEntityPlaceholder);
  if (pos == std::string::npos) return query;
  std::string out = query;
  out.replace(pos, std::string(kEntityPlaceholder).size(), "<" + iri + ">");
  return out;
}

}  // namespace kgforge::service
