#pragma once

// Expected graph contents of a generated corpus, computed straight from the
// CSV tables without the mapping pipeline.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgforge/materialize/csv.hpp"
#include "kgforge/rdf/term.hpp"

namespace corpus_oracle {

inline const std::string kBase = "https://w3id.org/reproduceme/";
inline const std::string kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline const std::string kXsd = "http://www.w3.org/2001/XMLSchema#";

inline std::string expand(const std::string& curie) {
  static const std::map<std::string, std::string> ns = {
      {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
      {"xsd", kXsd},
      {"repr", kBase},
      {"pav", "http://purl.org/pav/"},
      {"prov", "http://www.w3.org/ns/prov#"},
      {"fabio", "http://purl.org/spar/fabio/"},
      {"doap", "http://usefulinc.com/ns/doap#"},
      {"p-plan", "http://purl.org/net/p-plan"}};
  auto colon = curie.find(':');
  return ns.at(curie.substr(0, colon)) + curie.substr(colon + 1);
}

// kind: 'a' class, 'l' literal, 'r' IRI built from <target prefix><column>,
// 'j' join to the table `target` on its id column.
struct Rule {
  char kind;
  std::string predicate;
  std::string column;
  std::string target;  // class, datatype, IRI prefix or parent csv
};

struct Map {
  std::string csv;
  std::string prefix;
  std::string subject_column;
  std::vector<Rule> rules;
};

inline Rule type(std::string cls) { return {'a', "", "", std::move(cls)}; }
inline Rule lit(std::string p, std::string c, std::string dt = "") { return {'l', std::move(p), std::move(c), std::move(dt)}; }
inline Rule ref(std::string p, std::string c, std::string prefix) { return {'r', std::move(p), std::move(c), std::move(prefix)}; }
inline Rule join(std::string p, std::string c, std::string parent) { return {'j', std::move(p), std::move(c), std::move(parent)}; }

// Subject prefix of each parent table.
inline const std::map<std::string, std::string>& parents() {
  static const std::map<std::string, std::string> p = {{"journals.csv", "journal_"},
                                                       {"articles.csv", "article_"},
                                                       {"repositories.csv", "repository_"},
                                                       {"notebooks.csv", "notebook_"},
                                                       {"cells.csv", "cell_"}};
  return p;
}

inline const std::map<std::string, std::vector<Map>>& entity_maps() {
  const std::string i = "xsd:integer";
  static const std::map<std::string, std::vector<Map>> m = {
      {"Article",
       {{"articles.csv", "article_", "id",
         {type("fabio:Article"), lit("rdfs:label", "title"), lit("repr:pmcid", "pmc_id"), lit("repr:pmid", "pmid"),
          lit("repr:doi", "doi"), lit("repr:published", "published", "xsd:date"), lit("repr:license", "license"),
          lit("repr:keywords", "keywords"), join("repr:journal", "journal_id", "journals.csv")}},
        {"article_mesh.csv", "article_", "article_id", {ref("prov:specializationOf", "mesh_ref", "mesh_")}}}},
      {"Author",
       {{"authors.csv", "author_", "id",
         {type("repr:Author"), lit("repr:orcid", "orcid"), lit("repr:firstName", "first_name"),
          lit("repr:lastName", "last_name"), lit("repr:position", "position", i),
          join("repr:authorOf", "article_id", "articles.csv")}}}},
      {"Cell",
       {{"cells.csv", "cell_", "id",
         {type("repr:Cell"), lit("repr:index", "position", i), lit("repr:cellType", "cell_type"),
          lit("repr:executionCount", "execution_count", i), lit("repr:lines", "lines", i),
          join("p-plan:isStepOfPlan", "notebook_id", "notebooks.csv")}}}},
      {"CellFeature",
       {{"cell_features.csv", "cellfeature_", "id",
         {type("repr:CellFeature"), lit("repr:lines", "lines", i), lit("repr:words", "words", i),
          lit("repr:characters", "characters", i), join("repr:describes", "cell_id", "cells.csv")}}}},
      {"CellModule",
       {{"cell_modules.csv", "cellmodule_", "id",
         {type("repr:CellModule"), lit("rdfs:label", "module"), join("repr:usedBy", "cell_id", "cells.csv")}}}},
      {"CellName",
       {{"cell_names.csv", "cellname_", "id",
         {type("repr:CellName"), lit("rdfs:label", "name"), lit("repr:context", "context"),
          join("repr:describes", "cell_id", "cells.csv")}}}},
      {"CellExecution",
       {{"executions.csv", "execution_", "id",
         {type("repr:CellExecution"), join("p-plan:isStepOfPlan", "notebook_id", "notebooks.csv"),
          lit("repr:duration", "duration", "xsd:decimal"), lit("repr:processed", "processed", i),
          lit("repr:status", "status"), lit("repr:errorType", "error_type"),
          lit("repr:errorMessage", "error_message")}}}},
      {"CodeAnalysis",
       {{"code_analysis.csv", "codeanalysis_", "id",
         {type("repr:CodeAnalysis"), lit("repr:kind", "kind"), lit("rdfs:label", "name"),
          join("repr:describes", "cell_id", "cells.csv")}}}},
      {"Journal",
       {{"journals.csv", "journal_", "id",
         {type("fabio:Journal"), lit("rdfs:label", "title"), lit("repr:issn", "issn"),
          lit("repr:publisher", "publisher")}}}},
      {"MarkdownFeature",
       {{"markdown_features.csv", "markdownfeature_", "id",
         {type("repr:MarkdownFeature"), lit("repr:kind", "kind"), lit("repr:count", "count", i),
          join("repr:describes", "cell_id", "cells.csv")}}}},
      {"MESH",
       {{"mesh.csv", "mesh_", "id",
         {type("repr:MeSH"), lit("rdfs:label", "label"), lit("repr:meshId", "mesh_id"),
          ref("prov:specializationOf", "top_level_id", "mesh_")}},
        {"mesh.csv", "mesh_", "top_level_id", {ref("prov:generalizationOf", "id", "mesh_")}}}},
      {"Notebook",
       {{"notebooks.csv", "notebook_", "id",
         {type("repr:Notebook"), lit("rdfs:label", "name"), lit("repr:nbformat", "nbformat"),
          lit("repr:kernel", "kernel"), lit("repr:language", "language"),
          lit("repr:languageVersion", "language_version"), lit("repr:total_cells", "total_cells", i),
          lit("repr:maxExecutionCount", "max_execution_count", i),
          join("pav:retrievedFrom", "repository_id", "repositories.csv")}}}},
      {"NotebookAST",
       {{"notebook_ast.csv", "notebookast_", "id",
         {type("repr:NotebookAST"), lit("repr:functions", "functions", i), lit("repr:classes", "classes", i),
          lit("repr:imports", "imports", i), lit("repr:loops", "loops", i),
          join("repr:describes", "notebook_id", "notebooks.csv")}}}},
      {"NotebookCodeStyle",
       {{"code_style.csv", "codestyle_", "id",
         {type("repr:CodeStyleIssue"), lit("repr:tool", "tool"), lit("repr:code", "code"),
          lit("repr:count", "count", i), join("repr:describes", "notebook_id", "notebooks.csv")}}}},
      {"NotebookFeature",
       {{"notebook_features.csv", "notebookfeature_", "id",
         {type("repr:NotebookFeature"), lit("repr:codeCells", "code_cells", i),
          lit("repr:markdownCells", "markdown_cells", i), lit("repr:rawCells", "raw_cells", i),
          lit("repr:emptyCells", "empty_cells", i), join("repr:describes", "notebook_id", "notebooks.csv")}}}},
      {"NotebookMarkdown",
       {{"notebook_markdown.csv", "notebookmarkdown_", "id",
         {type("repr:NotebookMarkdown"), lit("repr:headers", "headers", i), lit("repr:paragraphs", "paragraphs", i),
          lit("repr:links", "links", i), lit("repr:images", "images", i),
          join("repr:describes", "notebook_id", "notebooks.csv")}}}},
      {"NotebookModule",
       {{"notebook_modules.csv", "notebookmodule_", "id",
         {type("repr:Module"), lit("rdfs:label", "module"), lit("repr:importType", "import_type"),
          join("repr:usedBy", "notebook_id", "notebooks.csv")}}}},
      {"NotebookName",
       {{"notebook_names.csv", "notebookname_", "id",
         {type("repr:NotebookName"), lit("rdfs:label", "name"), lit("repr:length", "length", i),
          lit("repr:hasSpaces", "has_spaces", "xsd:boolean"),
          join("repr:describes", "notebook_id", "notebooks.csv")}}}},
      {"Repository",
       {{"repositories.csv", "repository_", "id",
         {type("doap:GitRepository"), lit("rdfs:label", "repository"), lit("repr:url", "url"),
          lit("repr:stargazers", "stars", i), lit("repr:createdAt", "created_at", "xsd:dateTime"),
          lit("repr:updatedAt", "updated_at", "xsd:dateTime"), lit("repr:releaseCount", "releases", i),
          join("pav:retrievedFrom", "article_id", "articles.csv")}}}},
      {"RepositoryFile",
       {{"repository_files.csv", "repositoryfile_", "id",
         {type("repr:File"), lit("rdfs:label", "path"), lit("repr:extension", "extension"),
          join("repr:fileOf", "repository_id", "repositories.csv")}}}},
      {"RepositoryRelease",
       {{"releases.csv", "release_", "id",
         {type("repr:Release"), lit("rdfs:label", "tag"), lit("repr:publishedAt", "published_at", "xsd:dateTime"),
          join("repr:releaseOf", "repository_id", "repositories.csv")}}}},
      {"RequirementFile",
       {{"requirement_files.csv", "requirementfile_", "id",
         {type("repr:RequirementFile"), lit("rdfs:label", "path"), lit("repr:dependencies", "dependencies", i),
          join("repr:fileOf", "repository_id", "repositories.csv")}}}},
  };
  return m;
}

// Sorted N-Triples lines expected in <Entity>.nt, duplicates removed.
inline std::vector<std::string> expected_graph(const std::filesystem::path& data_dir, const std::string& entity) {
  using kgforge::materialize::read_csv;
  using kgforge::rdf::Term;
  std::map<std::string, std::set<std::string>> parent_ids;
  auto ids_of = [&](const std::string& csv) -> const std::set<std::string>& {
    auto it = parent_ids.find(csv);
    if (it != parent_ids.end()) return it->second;
    auto t = read_csv(data_dir / csv);
    int c = t.column_index("id");
    auto& ids = parent_ids[csv];
    for (const auto& r : t.rows) ids.insert(r[c]);
    return ids;
  };

  std::set<std::string> out;
  for (const auto& map : entity_maps().at(entity)) {
    auto table = read_csv(data_dir / map.csv);
    int sc = table.column_index(map.subject_column);
    for (const auto& row : table.rows) {
      if (row[sc].empty()) continue;
      Term s = Term::iri(kBase + map.prefix + row[sc]);
      auto emit = [&](const std::string& p, const Term& o) {
        out.insert(s.to_ntriples() + " <" + p + "> " + o.to_ntriples() + " .");
      };
      for (const auto& r : map.rules) {
        if (r.kind == 'a') {
          emit(kRdfType, Term::iri(expand(r.target)));
          continue;
        }
        const std::string& v = row[table.column_index(r.column)];
        if (v.empty()) continue;
        if (r.kind == 'l') {
          emit(expand(r.predicate), r.target.empty() ? Term::literal(v) : Term::typed(v, expand(r.target)));
        } else if (r.kind == 'r') {
          emit(expand(r.predicate), Term::iri(kBase + r.target + v));
        } else if (ids_of(r.target).count(v)) {
          emit(expand(r.predicate), Term::iri(kBase + parents().at(r.target) + v));
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace corpus_oracle
