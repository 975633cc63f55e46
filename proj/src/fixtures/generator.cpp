#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "kgforge/fixtures/corpus.hpp"
#include "kgforge/materialize/csv.hpp"
#include "kgforge/rdf/term.hpp"
#include "kgforge/rdf/vocabulary.hpp"

namespace kgforge::fixtures {

namespace fs = std::filesystem;
using rdf::Term;

namespace {

// Raw engine output only: the standard distributions differ between library
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(unsigned percent) { return below(100) < percent; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::string fmt(const char* f, auto... args) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string date(Rng& rng, int first_year, int years) {
  return fmt("%04d-%02zu-%02zu", first_year + static_cast<int>(rng.below(static_cast<std::size_t>(years))),
             rng.between(1, 12), rng.between(1, 28));
}

std::string datetime(Rng& rng, int first_year, int years) {
  return date(rng, first_year, years) + fmt("T%02zu:%02zu:%02zuZ", rng.below(24), rng.below(60), rng.below(60));
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

// ---------------------------------------------------------------------------
// Vocabulary lists

const std::vector<std::string> kJournals = {
    "Nature", "PLoS Computational Biology", "Scientific Reports", "Bioinformatics", "eLife",
    "BMC Bioinformatics", "Nucleic Acids Research", "GigaScience", "PeerJ", "Frontiers in Immunology",
    "Cell Reports", "Genome Biology"};
const std::vector<std::string> kPublishers = {"Springer Nature", "PLOS", "Oxford University Press", "eLife Sciences",
                                              "Frontiers Media", "Elsevier", "PeerJ Inc."};
const std::vector<std::string> kTopMesh = {
    "Anatomy", "Organisms", "Diseases", "Chemicals and Drugs",
    "Analytical, Diagnostic and Therapeutic Techniques, and Equipment", "Psychiatry and Psychology",
    "Phenomena and Processes", "Disciplines and Occupations"};
const std::vector<std::string> kMesh = {
    "Immunology", "Immunity, Innate", "Immunotherapy", "Stem Cells", "Cell Differentiation", "Neoplasms",
    "Breast Neoplasms", "Alzheimer Disease", "COVID-19", "Genomics", "Transcriptome", "Single-Cell Analysis",
    "Gene Expression Profiling", "Machine Learning", "Neurosciences", "Microbiota", "Proteomics", "Epidemiology",
    "Drug Discovery", "Computational Biology", "Sequence Analysis, RNA", "Metabolomics", "Brain", "Mice",
    "Humans", "Diabetes Mellitus", "Cardiovascular Diseases", "Image Processing, Computer-Assisted", "Phylogeny",
    "Ecology", "T-Lymphocytes", "Antibodies", "Vaccines", "Virus Diseases", "Bacteria", "Plants",
    "Electroencephalography", "Magnetic Resonance Imaging", "Cell Line, Tumor", "Mutation"};
const std::vector<std::string> kTitleStart = {"Single-cell", "Reproducible", "Deep learning", "Large-scale",
                                              "Integrative", "Longitudinal", "Open source", "Comparative"};
const std::vector<std::string> kTitleTopic = {
    "analysis of immune responses", "profiling of stem cell differentiation", "modelling of gene regulation",
    "atlas of tumour microenvironments", "study of gut microbiota", "pipeline for neuroimaging",
    "benchmark of variant callers", "mapping of immunity in infection", "workflow for proteomics",
    "characterisation of cell differentiation"};
const std::vector<std::string> kTitleContext = {"in mice", "in humans", "across tissues", "in cancer cohorts",
                                                "with Jupyter notebooks", "in clinical samples"};
const std::vector<std::string> kKeywords = {"open source", "reproducibility", "immunology", "single-cell",
                                            "machine learning", "python", "RNA-seq", "workflow", "stem cells",
                                            "differentiation", "imaging", "statistics"};
const std::vector<std::string> kLicenses = {"CC BY 4.0", "CC BY-NC 4.0", "CC0 1.0", ""};
const std::vector<std::string> kFirstNames = {"Ana", "Wei", "Priya", "Lars", "Fatima", "João", "Mei", "Tomasz",
                                              "Aisha", "Kenji", "Sofia", "Omar", "Elena", "Daniel", "Nia"};
const std::vector<std::string> kLastNames = {"Silva", "Chen", "Patel", "Nielsen", "Haddad", "Müller", "Tanaka",
                                             "Kowalski", "Okafor", "García", "Novak", "Rossi", "Kim", "Larsen"};
const std::vector<std::string> kOwners = {"bio-lab", "compbio", "neuro-group", "immunodata", "omics-team",
                                          "stat-gen", "cellatlas", "openscience"};
const std::vector<std::string> kRepoNames = {"analysis", "paper-code", "notebooks", "pipeline", "figures",
                                             "scRNA", "workflow", "supplement"};
const std::vector<std::string> kNotebookNames = {"analysis", "Figure 2 (final)", "01-preprocessing", "model_training",
                                                 "Untitled", "données brutes", "QC & filtering", "plots#1",
                                                 "differential expression", "main"};
const std::vector<std::string> kRequirementPaths = {"requirements.txt", "environment.yml", "setup.py", "Pipfile"};
const std::vector<std::string> kRepoFiles = {"README.md", "LICENSE", "src/utils.py", "data/meta.csv",
                                             "scripts/run.sh", "docs/index.rst", "Dockerfile"};
const std::vector<std::string> kKernels = {"python3", "python3", "python3", "ir", "julia-1.6", "python2"};
const std::vector<std::string> kModules = {"numpy", "pandas", "matplotlib", "scanpy", "seaborn", "sklearn",
                                           "scipy", "torch", "anndata", "statsmodels", "Bio", "tensorflow"};
const std::vector<std::string> kIdentifiers = {"df", "model", "results", "x_train", "adata", "counts", "fig",
                                               "params", "labels", "scores"};
const std::vector<std::string> kErrors = {
    "ModuleNotFoundError", "ModuleNotFoundError", "ModuleNotFoundError", "FileNotFoundError", "ImportError",
    "NameError", "ValueError", "KeyError", "AttributeError", "TypeError", "OSError", "SyntaxError"};

struct Outcome {
  int processed;
  const char* status;
};
const std::vector<Outcome> kOtherOutcomes = {
    {1, "exception"}, {1, "exception"}, {2, "different results"}, {3, "timeout"}, {4, "installation failed"}};

std::string malayalam_word(Rng& rng) {
  auto utf8 = [](char32_t c) {
    std::string s;
    s += static_cast<char>(0xE0 | (c >> 12));
    s += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (c & 0x3F));
    return s;
  };
  std::string out;
  std::size_t syllables = rng.between(2, 4);
  for (std::size_t i = 0; i < syllables; ++i) {
    out += utf8(static_cast<char32_t>(0x0D15 + rng.below(0x0D39 - 0x0D15 + 1)));
    if (rng.chance(60)) out += utf8(static_cast<char32_t>(0x0D3E + rng.below(0x0D4C - 0x0D3E + 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mapping documents

const char* kMappingPrefixes =
    "prefixes:\n"
    "  rdfs: http://www.w3.org/2000/01/rdf-schema#\n"
    "  xsd: http://www.w3.org/2001/XMLSchema#\n"
    "  repr: https://w3id.org/reproduceme/\n"
    "  pav: http://purl.org/pav/\n"
    "  prov: http://www.w3.org/ns/prov#\n"
    "  fabio: http://purl.org/spar/fabio/\n"
    "  doap: http://usefulinc.com/ns/doap#\n"
    "  p-plan: http://purl.org/net/p-plan\n";

struct MapDef {
  std::string name;
  std::string source;
  std::string subject;  // local part after repr:
  std::vector<std::string> pos;
};

std::string type(const std::string& cls) { return "      - [a, " + cls + "]\n"; }
std::string lit(const std::string& pred, const std::string& column, const std::string& datatype = "") {
  return "      - [" + pred + ", $(" + column + ")" + (datatype.empty() ? "" : ", " + datatype) + "]\n";
}
std::string ref(const std::string& pred, const std::string& local_template) {
  return "      - [" + pred + ", https://w3id.org/reproduceme/" + local_template + "~iri]\n";
}
std::string join(const std::string& pred, const std::string& parent, const std::string& column) {
  return "      - p: " + pred +
         "\n"
         "        o:\n"
         "          - mapping: " +
         parent +
         "\n"
         "            condition:\n"
         "              function: equal\n"
         "              parameters:\n"
         "                - [str1, $(" +
         column +
         "), s]\n"
         "                - [str2, $(id), o]\n";
}

std::string document(const std::vector<MapDef>& maps) {
  std::string out = kMappingPrefixes;
  out += "\nmappings:\n";
  for (const auto& m : maps) {
    out += "  " + m.name + ":\n";
    out += "    sources:\n      - [data/" + m.source + "~csv]\n";
    out += "    s: https://w3id.org/reproduceme/" + m.subject + "\n";
    out += "    po:\n";
    for (const auto& po : m.pos) out += po;
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> mapping_documents() {
  const std::string i = "xsd:integer";
  std::vector<std::pair<std::string, std::vector<MapDef>>> e = {
      {"Article",
       {{"article",
         "articles.csv",
         "article_$(id)",
         {type("fabio:Article"), lit("rdfs:label", "title"), lit("repr:pmcid", "pmc_id"), lit("repr:pmid", "pmid"),
          lit("repr:doi", "doi"), lit("repr:published", "published", "xsd:date"), lit("repr:license", "license"),
          lit("repr:keywords", "keywords"), join("repr:journal", "journal", "journal_id")}},
        {"article_mesh", "article_mesh.csv", "article_$(article_id)", {ref("prov:specializationOf", "mesh_$(mesh_ref)")}}}},
      {"Author",
       {{"author",
         "authors.csv",
         "author_$(id)",
         {type("repr:Author"), lit("repr:orcid", "orcid"), lit("repr:firstName", "first_name"),
          lit("repr:lastName", "last_name"), lit("repr:position", "position", i),
          join("repr:authorOf", "article", "article_id")}}}},
      {"Cell",
       {{"cells",
         "cells.csv",
         "cell_$(id)",
         {type("repr:Cell"), lit("repr:index", "position", i), lit("repr:cellType", "cell_type"),
          lit("repr:executionCount", "execution_count", i), lit("repr:lines", "lines", i),
          join("p-plan:isStepOfPlan", "notebooks", "notebook_id")}}}},
      {"CellFeature",
       {{"cell_features",
         "cell_features.csv",
         "cellfeature_$(id)",
         {type("repr:CellFeature"), lit("repr:lines", "lines", i), lit("repr:words", "words", i),
          lit("repr:characters", "characters", i), join("repr:describes", "cells", "cell_id")}}}},
      {"CellModule",
       {{"cell_modules",
         "cell_modules.csv",
         "cellmodule_$(id)",
         {type("repr:CellModule"), lit("rdfs:label", "module"), join("repr:usedBy", "cells", "cell_id")}}}},
      {"CellName",
       {{"cell_names",
         "cell_names.csv",
         "cellname_$(id)",
         {type("repr:CellName"), lit("rdfs:label", "name"), lit("repr:context", "context"),
          join("repr:describes", "cells", "cell_id")}}}},
      {"CellExecution",
       {{"executions",
         "executions.csv",
         "execution_$(id)",
         {type("repr:CellExecution"), join("p-plan:isStepOfPlan", "notebooks", "notebook_id"),
          lit("repr:duration", "duration", "xsd:decimal"), lit("repr:processed", "processed", i),
          lit("repr:status", "status"), lit("repr:errorType", "error_type"),
          lit("repr:errorMessage", "error_message")}}}},
      {"CodeAnalysis",
       {{"code_analysis",
         "code_analysis.csv",
         "codeanalysis_$(id)",
         {type("repr:CodeAnalysis"), lit("repr:kind", "kind"), lit("rdfs:label", "name"),
          join("repr:describes", "cells", "cell_id")}}}},
      {"Journal",
       {{"journal",
         "journals.csv",
         "journal_$(id)",
         {type("fabio:Journal"), lit("rdfs:label", "title"), lit("repr:issn", "issn"),
          lit("repr:publisher", "publisher")}}}},
      {"MarkdownFeature",
       {{"markdown_features",
         "markdown_features.csv",
         "markdownfeature_$(id)",
         {type("repr:MarkdownFeature"), lit("repr:kind", "kind"), lit("repr:count", "count", i),
          join("repr:describes", "cells", "cell_id")}}}},
      {"MESH",
       {{"mesh",
         "mesh.csv",
         "mesh_$(id)",
         {type("repr:MeSH"), lit("rdfs:label", "label"), lit("repr:meshId", "mesh_id"),
          ref("prov:specializationOf", "mesh_$(top_level_id)")}},
        {"mesh_top", "mesh.csv", "mesh_$(top_level_id)", {ref("prov:generalizationOf", "mesh_$(id)")}}}},
      {"Notebook",
       {{"notebooks",
         "notebooks.csv",
         "notebook_$(id)",
         {type("repr:Notebook"), lit("rdfs:label", "name"), lit("repr:nbformat", "nbformat"),
          lit("repr:kernel", "kernel"), lit("repr:language", "language"),
          lit("repr:languageVersion", "language_version"), lit("repr:total_cells", "total_cells", i),
          lit("repr:maxExecutionCount", "max_execution_count", i),
          join("pav:retrievedFrom", "repositories", "repository_id")}}}},
      {"NotebookAST",
       {{"notebook_ast",
         "notebook_ast.csv",
         "notebookast_$(id)",
         {type("repr:NotebookAST"), lit("repr:functions", "functions", i), lit("repr:classes", "classes", i),
          lit("repr:imports", "imports", i), lit("repr:loops", "loops", i),
          join("repr:describes", "notebooks", "notebook_id")}}}},
      {"NotebookCodeStyle",
       {{"code_style",
         "code_style.csv",
         "codestyle_$(id)",
         {type("repr:CodeStyleIssue"), lit("repr:tool", "tool"), lit("repr:code", "code"),
          lit("repr:count", "count", i), join("repr:describes", "notebooks", "notebook_id")}}}},
      {"NotebookFeature",
       {{"notebook_features",
         "notebook_features.csv",
         "notebookfeature_$(id)",
         {type("repr:NotebookFeature"), lit("repr:codeCells", "code_cells", i),
          lit("repr:markdownCells", "markdown_cells", i), lit("repr:rawCells", "raw_cells", i),
          lit("repr:emptyCells", "empty_cells", i), join("repr:describes", "notebooks", "notebook_id")}}}},
      {"NotebookMarkdown",
       {{"notebook_markdown",
         "notebook_markdown.csv",
         "notebookmarkdown_$(id)",
         {type("repr:NotebookMarkdown"), lit("repr:headers", "headers", i), lit("repr:paragraphs", "paragraphs", i),
          lit("repr:links", "links", i), lit("repr:images", "images", i),
          join("repr:describes", "notebooks", "notebook_id")}}}},
      {"NotebookModule",
       {{"notebook_modules",
         "notebook_modules.csv",
         "notebookmodule_$(id)",
         {type("repr:Module"), lit("rdfs:label", "module"), lit("repr:importType", "import_type"),
          join("repr:usedBy", "notebooks", "notebook_id")}}}},
      {"NotebookName",
       {{"notebook_names",
         "notebook_names.csv",
         "notebookname_$(id)",
         {type("repr:NotebookName"), lit("rdfs:label", "name"), lit("repr:length", "length", i),
          lit("repr:hasSpaces", "has_spaces", "xsd:boolean"), join("repr:describes", "notebooks", "notebook_id")}}}},
      {"Repository",
       {{"repositories",
         "repositories.csv",
         "repository_$(id)",
         {type("doap:GitRepository"), lit("rdfs:label", "repository"), lit("repr:url", "url"),
          lit("repr:stargazers", "stars", i), lit("repr:createdAt", "created_at", "xsd:dateTime"),
          lit("repr:updatedAt", "updated_at", "xsd:dateTime"), lit("repr:releaseCount", "releases", i),
          join("pav:retrievedFrom", "article", "article_id")}}}},
      {"RepositoryFile",
       {{"repository_files",
         "repository_files.csv",
         "repositoryfile_$(id)",
         {type("repr:File"), lit("rdfs:label", "path"), lit("repr:extension", "extension"),
          join("repr:fileOf", "repositories", "repository_id")}}}},
      {"RepositoryRelease",
       {{"releases",
         "releases.csv",
         "release_$(id)",
         {type("repr:Release"), lit("rdfs:label", "tag"), lit("repr:publishedAt", "published_at", "xsd:dateTime"),
          join("repr:releaseOf", "repositories", "repository_id")}}}},
      {"RequirementFile",
       {{"requirement_files",
         "requirement_files.csv",
         "requirementfile_$(id)",
         {type("repr:RequirementFile"), lit("rdfs:label", "path"), lit("repr:dependencies", "dependencies", i),
          join("repr:fileOf", "repositories", "repository_id")}}}},
  };
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [entity, maps] : e) out.emplace_back(entity, document(maps));
  return out;
}

// ---------------------------------------------------------------------------
// Rows

struct Corpus {
  std::map<std::string, Table> tables;
  std::vector<rdf::Triple> wikidata;
  std::size_t reproduced = 0;

  Table& table(const std::string& name, std::vector<std::string> header) {
    auto& t = tables[name];
    if (t.header.empty()) t.header = std::move(header);
    return t;
  }
};

std::string id(std::size_t n) { return std::to_string(n); }

Corpus build(const CorpusSpec& spec) {
  if ((spec.articles && !spec.journals) || (spec.repositories && !spec.articles) ||
      (spec.notebooks && !spec.repositories)) {
    throw std::invalid_argument("corpus spec: child entities need at least one parent row");
  }
  Rng rng(spec.seed);
  Corpus c;

  auto& journals = c.table("journals.csv", {"id", "title", "issn", "publisher"});
  for (std::size_t j = 1; j <= spec.journals; ++j) {
    std::string title = j <= kJournals.size() ? kJournals[j - 1] : "Journal of " + rng.pick(kMesh) + " " + id(j);
    journals.add({id(j), title, fmt("%04zu-%04zu", 1000 + j, rng.below(10000)), rng.pick(kPublishers)});
  }

  auto& mesh = c.table("mesh.csv", {"id", "mesh_id", "label", "top_level_id"});
  const std::size_t tops = spec.mesh_terms ? kTopMesh.size() : 0;
  for (std::size_t m = 1; m <= tops + spec.mesh_terms; ++m) {
    std::string mesh_id = fmt("D%06zu", 1000 + m * 97);
    if (m <= tops) {
      mesh.add({id(m), mesh_id, kTopMesh[m - 1], ""});
    } else {
      std::size_t k = m - tops - 1;
      std::string label = kMesh[k % kMesh.size()];
      if (k >= kMesh.size()) label += " " + id(k / kMesh.size() + 1);
      mesh.add({id(m), mesh_id, label, id(rng.between(1, tops))});
    }
  }

  auto& articles = c.table("articles.csv",
                           {"id", "pmc_id", "pmid", "doi", "title", "journal_id", "published", "license", "keywords"});
  auto& article_mesh = c.table("article_mesh.csv", {"article_id", "mesh_ref"});
  auto& authors = c.table("authors.csv", {"id", "article_id", "orcid", "first_name", "last_name", "position"});
  std::size_t author_id = 0;
  for (std::size_t a = 1; a <= spec.articles; ++a) {
    std::string title = rng.pick(kTitleStart) + " " + rng.pick(kTitleTopic) + " " + rng.pick(kTitleContext);
    std::set<std::string> kw;
    for (std::size_t k = rng.between(2, 4); kw.size() < k;) kw.insert(rng.pick(kKeywords));
    std::string keywords;
    for (const auto& k : kw) keywords += (keywords.empty() ? "" : "; ") + k;
    articles.add({id(a), id(3000000 + a * 131), id(20000000 + a * 977),
                  fmt("10.%04zu/j.%zu.%03zu", 1000 + rng.below(9000), a, rng.below(1000)), title,
                  id(rng.between(1, spec.journals)), date(rng, 2016, 8), rng.pick(kLicenses), keywords});
    if (spec.mesh_terms) {
      std::set<std::size_t> refs;
      for (std::size_t k = rng.between(1, 3); refs.size() < std::min(k, spec.mesh_terms);) {
        refs.insert(tops + rng.between(1, spec.mesh_terms));
      }
      for (auto r : refs) article_mesh.add({id(a), id(r)});
    }
    for (std::size_t p = 1, n = rng.between(1, 6); p <= n; ++p) {
      ++author_id;
      authors.add({id(author_id), id(a), fmt("0000-0002-%04zu-%04zu", author_id / 10000 % 10000, author_id % 10000),
                   rng.pick(kFirstNames), rng.pick(kLastNames), id(p)});
    }
  }

  auto& repos = c.table("repositories.csv", {"id", "article_id", "repository", "url", "stars", "created_at",
                                             "updated_at", "releases"});
  auto& releases = c.table("releases.csv", {"id", "repository_id", "tag", "published_at"});
  auto& requirements = c.table("requirement_files.csv", {"id", "repository_id", "path", "dependencies"});
  auto& repo_files = c.table("repository_files.csv", {"id", "repository_id", "path", "extension"});
  std::size_t release_id = 0, requirement_id = 0, file_id = 0;
  for (std::size_t r = 1; r <= spec.repositories; ++r) {
    std::string name = rng.pick(kOwners) + "/" + rng.pick(kRepoNames) + "-" + id(r);
    std::size_t n_releases = rng.below(4);
    repos.add({id(r), id(r <= spec.articles ? r : rng.between(1, spec.articles)), name, "https://github.com/" + name,
               id(rng.below(40) * rng.below(40)), datetime(rng, 2014, 4), datetime(rng, 2019, 5), id(n_releases)});
    for (std::size_t k = 0; k < n_releases; ++k) {
      releases.add({id(++release_id), id(r), fmt("v1.%zu.0", k), datetime(rng, 2018, 6)});
    }
    if (rng.chance(60)) {
      requirements.add({id(++requirement_id), id(r), rng.pick(kRequirementPaths), id(rng.between(1, 40))});
    }
    for (std::size_t k = 0, n = rng.between(2, 6); k < n; ++k) {
      std::string path = rng.pick(kRepoFiles);
      auto dot = path.rfind('.');
      repo_files.add({id(++file_id), id(r), path, dot == std::string::npos ? "" : path.substr(dot + 1)});
    }
  }

  auto& notebooks = c.table("notebooks.csv", {"id", "repository_id", "name", "nbformat", "kernel", "language",
                                              "language_version", "total_cells", "max_execution_count"});
  auto& names = c.table("notebook_names.csv", {"id", "notebook_id", "name", "length", "has_spaces"});
  auto& features = c.table("notebook_features.csv",
                           {"id", "notebook_id", "code_cells", "markdown_cells", "raw_cells", "empty_cells"});
  auto& modules = c.table("notebook_modules.csv", {"id", "notebook_id", "module", "import_type"});
  auto& style = c.table("code_style.csv", {"id", "notebook_id", "tool", "code", "count"});
  auto& ast = c.table("notebook_ast.csv", {"id", "notebook_id", "functions", "classes", "imports", "loops"});
  auto& markdown = c.table("notebook_markdown.csv", {"id", "notebook_id", "headers", "paragraphs", "links", "images"});
  auto& cells = c.table("cells.csv", {"id", "notebook_id", "position", "cell_type", "execution_count", "lines"});
  auto& cell_features = c.table("cell_features.csv", {"id", "cell_id", "lines", "words", "characters"});
  auto& cell_modules = c.table("cell_modules.csv", {"id", "cell_id", "module"});
  auto& cell_names = c.table("cell_names.csv", {"id", "cell_id", "name", "context"});
  auto& code_analysis = c.table("code_analysis.csv", {"id", "cell_id", "kind", "name"});
  auto& md_features = c.table("markdown_features.csv", {"id", "cell_id", "kind", "count"});
  auto& executions = c.table("executions.csv", {"id", "notebook_id", "duration", "processed", "status",
                                                "error_type", "error_message"});

  // Exactly round(fraction * n) reproduced executions; durations are
  // pairwise distinct so orderings by duration have no ties.
  std::vector<std::size_t> order(spec.notebooks);
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k + 1;
  rng.shuffle(order);
  c.reproduced = static_cast<std::size_t>(std::llround(spec.reproduced_fraction * static_cast<double>(spec.notebooks)));
  c.reproduced = std::min(c.reproduced, spec.notebooks);
  std::set<std::size_t> reproduced(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(c.reproduced));
  std::set<std::size_t> durations;

  std::size_t module_id = 0, style_id = 0, cell_id = 0, cell_module_id = 0, cell_name_id = 0, analysis_id = 0,
              md_feature_id = 0;
  for (std::size_t n = 1; n <= spec.notebooks; ++n) {
    std::string name = rng.pick(kNotebookNames);
    if (rng.chance(50)) name += " " + id(n);
    name += ".ipynb";
    std::size_t kernel = rng.below(kKernels.size());
    static const std::vector<std::string> languages = {"python", "python", "python", "R", "julia", "python"};
    static const std::vector<std::string> versions = {"3.8.5", "3.9.7", "3.10.4", "4.1.2", "1.6.1", "2.7.18"};
    std::size_t total = rng.between(1, std::max<std::size_t>(1, spec.max_cells));

    std::size_t code = 0, md = 0, raw = 0, exec_count = 0;
    for (std::size_t p = 0; p < total; ++p) {
      ++cell_id;
      std::size_t roll = rng.below(100);
      std::string kind = roll < 65 ? "code" : (roll < 95 ? "markdown" : "raw");
      std::string count;
      if (kind == "code") {
        ++code;
        if (rng.chance(80)) count = id(++exec_count);
      } else if (kind == "markdown") {
        ++md;
      } else {
        ++raw;
      }
      std::size_t lines = rng.between(1, 40);
      cells.add({id(cell_id), id(n), id(p), kind, count, id(lines)});
      std::size_t words = lines * rng.between(2, 9);
      cell_features.add({id(cell_id), id(cell_id), id(lines), id(words), id(words * rng.between(4, 8))});
      if (kind == "code") {
        if (rng.chance(20)) cell_modules.add({id(++cell_module_id), id(cell_id), rng.pick(kModules)});
        if (rng.chance(35)) {
          static const std::vector<std::string> contexts = {"assignment", "function", "class", "import"};
          cell_names.add({id(++cell_name_id), id(cell_id), rng.pick(kIdentifiers), rng.pick(contexts)});
        }
        static const std::vector<std::string> kinds = {"call", "attribute", "name", "import"};
        for (std::size_t k = 0, m = rng.below(3); k < m; ++k) {
          code_analysis.add({id(++analysis_id), id(cell_id), rng.pick(kinds), rng.pick(kIdentifiers)});
        }
      } else if (kind == "markdown") {
        static const std::vector<std::string> kinds = {"heading", "paragraph", "link", "image", "list"};
        md_features.add({id(++md_feature_id), id(cell_id), rng.pick(kinds), id(rng.between(1, 10))});
      }
    }

    notebooks.add({id(n), id(n <= spec.repositories ? n : rng.between(1, spec.repositories)), name, "4",
                   kKernels[kernel], languages[kernel], versions[kernel], id(total),
                   exec_count ? id(exec_count) : ""});
    names.add({id(n), id(n), name, id(name.size()), name.find(' ') != std::string::npos ? "true" : "false"});
    features.add({id(n), id(n), id(code), id(md), id(raw), id(rng.below(3))});
    std::set<std::string> used;
    for (std::size_t k = rng.below(6); used.size() < k;) used.insert(rng.pick(kModules));
    for (const auto& m : used) modules.add({id(++module_id), id(n), m, rng.chance(70) ? "import" : "from"});
    static const std::vector<std::string> tools = {"pycodestyle", "pylint", "flake8"};
    static const std::vector<std::string> codes = {"E501", "E231", "W291", "C0103", "E302"};
    for (std::size_t k = 0, m = rng.below(4); k < m; ++k) {
      style.add({id(++style_id), id(n), rng.pick(tools), rng.pick(codes), id(rng.between(1, 50))});
    }
    ast.add({id(n), id(n), id(rng.below(10)), id(rng.below(3)), id(rng.below(15)), id(rng.below(8))});
    markdown.add({id(n), id(n), id(rng.below(8)), id(rng.below(20)), id(rng.below(6)), id(rng.below(4))});

    std::size_t millis;
    do {
      millis = rng.between(1, 999999);
    } while (!durations.insert(millis).second);
    std::string duration = fmt("%zu.%03zu", millis / 1000, millis % 1000);
    if (reproduced.count(n)) {
      executions.add({id(n), id(n), duration, id(kReproducedStatus), "identical results", "", ""});
    } else {
      const auto& o = rng.pick(kOtherOutcomes);
      std::string error, message;
      if (o.processed == 1) {
        error = rng.pick(kErrors);
        message = error == "ModuleNotFoundError" ? "No module named '" + rng.pick(kModules) + "'" : error + " raised in cell " + id(rng.between(1, total));
      }
      executions.add({id(n), id(n), duration, id(o.processed), o.status, error, message});
    }
  }

  // Mock Wikidata: items for most articles and MeSH descriptors.
  const std::string wd = std::string(rdf::vocab::kWd);
  const std::string wdt = std::string(rdf::vocab::kWdt);
  auto add = [&](const std::string& s, const std::string& p, Term o) {
    c.wikidata.emplace_back(Term::iri(s), Term::iri(p), std::move(o));
  };
  for (const auto& row : articles.rows) {
    if (!rng.chance(60)) continue;
    std::string item = wd + "Q" + id(100000 + std::stoul(row[0]));
    add(item, wdt + "P31", Term::iri(wd + "Q13442814"));
    add(item, wdt + "P356", Term::literal(row[3]));
    if (rng.chance(80)) add(item, wdt + "P932", Term::literal(row[1]));
    add(item, std::string(rdf::vocab::kRdfsLabel), Term::lang(row[4], "en"));
  }
  for (std::size_t k = 0; k < 10 && spec.articles; ++k) {
    std::string item = wd + "Q" + id(900000 + k);
    add(item, wdt + "P356", Term::literal(fmt("10.9999/decoy.%zu", k)));
    add(item, wdt + "P932", Term::literal(id(9900000 + k)));
  }
  for (const auto& row : mesh.rows) {
    if (!rng.chance(80)) continue;
    std::string item = wd + "Q" + id(500000 + std::stoul(row[0]));
    add(item, wdt + "P486", Term::literal(row[1]));
    add(item, std::string(rdf::vocab::kRdfsLabel), Term::lang(row[2], "en"));
    if (rng.chance(70)) add(item, std::string(rdf::vocab::kRdfsLabel), Term::lang(malayalam_word(rng), "ml"));
  }
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

CorpusSpec CorpusSpec::for_scale(std::string_view scale, std::uint64_t seed) {
  std::size_t factor;
  if (scale == "s") {
    factor = 1;
  } else if (scale == "m") {
    factor = 10;
  } else if (scale == "l") {
    factor = 100;
  } else {
    throw std::invalid_argument("unknown scale '" + std::string(scale) + "' (expected s, m or l)");
  }
  CorpusSpec s;
  s.seed = seed;
  s.journals = 4 + 2 * factor;
  s.articles = 12 * factor;
  s.mesh_terms = 30 + 5 * factor;
  s.repositories = 16 * factor;
  s.notebooks = 36 * factor;
  return s;
}

const std::vector<std::string>& entity_names() {
  static const std::vector<std::string> names = {
      "Article",         "Author",          "Cell",           "CellFeature",      "CellModule",
      "CellName",        "CellExecution",   "CodeAnalysis",   "Journal",          "MarkdownFeature",
      "MESH",            "Notebook",        "NotebookAST",    "NotebookCodeStyle", "NotebookFeature",
      "NotebookMarkdown", "NotebookModule", "NotebookName",   "Repository",       "RepositoryFile",
      "RepositoryRelease", "RequirementFile"};
  return names;
}

const std::vector<std::string>& omitted_entities() {
  static const std::vector<std::string> names = {"CellName", "CodeAnalysis", "MarkdownFeature", "RepositoryFile"};
  return names;
}

std::string graph_iri(const std::string& entity) { return "https://w3id.org/reproduceme/graph/" + entity; }

CorpusSummary generate(const CorpusSpec& spec, const fs::path& out) {
  Corpus corpus = build(spec);
  CorpusSummary summary;
  summary.reproduced = corpus.reproduced;

  nlohmann::ordered_json manifest;
  manifest["seed"] = spec.seed;
  manifest["counts"] = {{"journals", spec.journals},         {"articles", spec.articles},
                        {"mesh_terms", spec.mesh_terms},     {"repositories", spec.repositories},
                        {"notebooks", spec.notebooks},       {"max_cells", spec.max_cells}};
  manifest["reproduced_fraction"] = spec.reproduced_fraction;
  manifest["reproduced_status"] = kReproducedStatus;
  manifest["reproduced_executions"] = corpus.reproduced;

  for (const auto& [name, table] : corpus.tables) {
    std::ostringstream csv;
    materialize::write_csv_row(csv, table.header);
    for (const auto& row : table.rows) materialize::write_csv_row(csv, row);
    write_text(out / "data" / name, csv.str());
    summary.rows[name] = table.rows.size();
    manifest["files"][name] = {{"rows", table.rows.size()}, {"columns", table.header}};
  }

  const auto& omitted = omitted_entities();
  std::string prototype = "graph_iri,path\n", full = prototype;
  for (const auto& [entity, yaml] : mapping_documents()) {
    write_text(out / "mappings" / (entity + ".yml"), yaml);
    std::string line = materialize::csv_escape(graph_iri(entity)) + ",graphs/" + entity + ".nt\n";
    full += line;
    bool in_prototype = std::find(omitted.begin(), omitted.end(), entity) == omitted.end();
    if (in_prototype) prototype += line;
    manifest["entities"].push_back({{"entity", entity},
                                    {"mapping", "mappings/" + entity + ".yml"},
                                    {"graph", graph_iri(entity)},
                                    {"prototype", in_prototype}});
  }
  write_text(out / "manifest.csv", prototype);
  write_text(out / "manifest-full.csv", full);

  std::string wikidata;
  for (const auto& t : corpus.wikidata) wikidata += t.to_ntriples() + "\n";
  write_text(out / "wikidata" / "wikidata.nt", wikidata);
  write_text(out / "wikidata-manifest.csv", "graph_iri,path\n" + std::string(kWikidataGraph) + ",wikidata/wikidata.nt\n");
  manifest["wikidata_triples"] = corpus.wikidata.size();

  write_text(out / "corpus.json", manifest.dump(2) + "\n");
  return summary;
}

}  // namespace kgforge::fixtures
