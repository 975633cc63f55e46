#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace kgforge::fixtures {

// Status value of executions that reproduced the original results.
inline constexpr int kReproducedStatus = 51;

struct CorpusSpec {
  std::uint64_t seed = 1;
  std::size_t journals = 0;
  std::size_t articles = 0;
  std::size_t mesh_terms = 0;  // below the 8 top-level terms
  std::size_t repositories = 0;
  std::size_t notebooks = 0;  // one execution per notebook
  std::size_t max_cells = 24;
  double reproduced_fraction = 0.1;

  // "s", "m" or "l": roughly 1e4, 1e5 and 1e6 triples over all 22 graphs.
  static CorpusSpec for_scale(std::string_view scale, std::uint64_t seed);
};

// Entity graphs in report order. The last four are left out of the
// prototype manifest.
const std::vector<std::string>& entity_names();
const std::vector<std::string>& omitted_entities();

std::string graph_iri(const std::string& entity);
inline constexpr std::string_view kWikidataGraph = "https://www.wikidata.org/";

struct CorpusSummary {
  std::map<std::string, std::size_t> rows;  // CSV file name -> data rows
  std::size_t reproduced = 0;
};

// Writes <out>/data/*.csv, <out>/mappings/<Entity>.yml, <out>/wikidata/wikidata.nt,
// manifest.csv (prototype graphs), manifest-full.csv, wikidata-manifest.csv and
// corpus.json. Manifests reference <out>/graphs/<Entity>.nt, produced by
// materializing the mappings. Output is byte-identical for identical specs.
CorpusSummary generate(const CorpusSpec& spec, const std::filesystem::path& out);

}  // namespace kgforge::fixtures
