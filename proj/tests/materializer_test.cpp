#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "kgforge/mapping/yarrrml.hpp"
#include "kgforge/materialize/materializer.hpp"
#include "kgforge/rdf/ntriples.hpp"
#include "test_util.hpp"

using namespace kgforge;
using namespace kgforge::materialize;
using kgforge::testing::data_dir;
using kgforge::testing::read_file;
using kgforge::testing::TempDir;
using kgforge::testing::write_file;

namespace {

std::vector<EntityMapping> example_entities() {
  return {{"notebooks", mapping::parse_yarrrml_file(data_dir() / "notebooks.yml")},
          {"article", mapping::parse_yarrrml_file(data_dir() / "article.yml")}};
}

std::vector<std::string> all_lines(const std::vector<EntityOutput>& outputs) {
  std::vector<std::string> out;
  for (const auto& o : outputs) {
    for (const auto& t : o.triples) out.push_back(t.to_ntriples());
  }
  return out;
}

std::string notebooks_csv(int n, int repos) {
  std::string csv = "id,name,kernel,language,repository_id\n";
  for (int i = 1; i <= n; ++i) {
    csv += std::to_string(i) + ",nb" + std::to_string(i) + ".ipynb,python3,python," + std::to_string(1 + i % repos) + "\n";
  }
  return csv;
}

std::string repositories_csv(int n) {
  std::string csv = "id,repository,article_id\n";
  for (int i = 1; i <= n; ++i) csv += std::to_string(i) + ",owner/r" + std::to_string(i) + ",\n";
  return csv;
}

}  // namespace

TEST(ExpandTemplate, EncodesEachValue) {
  auto t = mapping::TemplateExpr::parse("https://w3id.org/reproduceme/notebook_$(id)");
  EXPECT_EQ(expand_template(t, {{"id", "42"}}), rdf::Term::iri("https://w3id.org/reproduceme/notebook_42"));

  auto two = mapping::TemplateExpr::parse("https://w3id.org/reproduceme/$(a)$(b)");
  EXPECT_EQ(expand_template(two, {{"a", "my nb"}, {"b", "v1.ipynb"}}),
            rdf::Term::iri("https://w3id.org/reproduceme/my%20nbv1.ipynb"));
  EXPECT_EQ(expand_template(two, {{"a", ""}, {"b", "x"}}), std::nullopt);
  EXPECT_EQ(expand_template(two, {{"b", "x"}}), std::nullopt);

  // Template constants are left as written.
  auto keep = mapping::TemplateExpr::parse("https://ex.org/a%20b/$(id)");
  EXPECT_EQ(expand_template(keep, {{"id", "x/y"}}), rdf::Term::iri("https://ex.org/a%20b/x%2Fy"));
}

TEST(Materialize, NotebookMappingGolden) {
  SourceCatalog sources(data_dir() / "notebooks_example");
  auto lines = all_lines(materialize_entities(example_entities(), sources, 1));
  std::sort(lines.begin(), lines.end());
  EXPECT_EQ(lines, kgforge::testing::sorted_lines(data_dir() / "notebooks_example" / "expected.nt"));
}

TEST(Materialize, RepositoriesExample) {
  TempDir tmp;
  write_file(tmp / "data/repositories.csv", "id,repository,article_id\n1,a/b,10\n2,c/d,\n");
  write_file(tmp / "data/notebooks.csv", "id,name,kernel,language,repository_id\n");
  write_file(tmp / "data/articles.csv", "id\n10\n");
  SourceCatalog sources(tmp.path());
  auto out = materialize_entities(example_entities(), sources, 1);
  ASSERT_EQ(out[0].entity, "notebooks");
  EXPECT_EQ(out[0].triples.size(), 5u);
  EXPECT_EQ(out[0].mappings, 8u);
  EXPECT_EQ(out[1].triples.size(), 1u);
}

TEST(Materialize, NotebookCounts) {
  for (int n : {0, 2, 100}) {
    TempDir tmp;
    write_file(tmp / "data/repositories.csv", repositories_csv(3));
    write_file(tmp / "data/notebooks.csv", notebooks_csv(n, 3));
    write_file(tmp / "data/articles.csv", "id\n");
    SourceCatalog sources(tmp.path());
    auto out = materialize_entities(example_entities(), sources, 2);
    // repositories: type + label per row; notebooks: five per row.
    EXPECT_EQ(out[0].triples.size(), 6u + 5u * static_cast<std::size_t>(n)) << n;
  }
}

TEST(Partition, Shapes) {
  auto example = mapping::parse_yarrrml_file(data_dir() / "notebooks.yml");
  EXPECT_GE(partition(example).size(), 2u);

  auto single = mapping::parse_yarrrml("mappings:\n  m:\n    sources: [x.csv~csv]\n    s: http://ex.org/$(id)\n"
                                       "    po:\n      - [http://ex.org/p, $(v)]\n");
  auto parts = partition(single);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0].key.subject_prefix, "http://ex.org/");
  EXPECT_EQ(parts[0].key.predicate, "http://ex.org/p");

  auto shared = mapping::parse_yarrrml(R"(
mappings:
  a:
    sources: [x.csv~csv]
    s: http://ex.org/item_$(id)
    po:
      - [http://ex.org/p, $(v)]
      - [http://ex.org/q, $(v)]
  b:
    sources: [y.csv~csv]
    s: http://ex.org/item_$(id)
    po:
      - [http://ex.org/p, $(v)]
  c:
    sources: [y.csv~csv]
    s: http://ex.org/$(id)
    po:
      - [http://ex.org/p, $(v)]
  d:
    sources: [y.csv~csv]
    s: http://other.org/$(id)
    po:
      - [http://ex.org/p, $(v)]
)");
  parts = partition(shared);
  ASSERT_EQ(parts.size(), 3u);
  // a.p, b.p and c.p can collide; q and d.p cannot.
  std::multiset<std::size_t> sizes;
  for (const auto& p : parts) sizes.insert(p.members.size());
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{1, 1, 3}));

  // Every rule belongs to exactly one partition.
  std::size_t total = 0;
  for (const auto& p : parts) total += p.members.size();
  EXPECT_EQ(total, shared.rule_count());
}

TEST(Partition, SharedSubjectsDeduplicateAcrossMaps) {
  TempDir tmp;
  write_file(tmp / "x.csv", "id,v\n1,a\n2,b\n");
  write_file(tmp / "y.csv", "id,v\n2,b\n3,c\n");
  auto doc = mapping::parse_yarrrml(R"(
mappings:
  a:
    sources: [x.csv~csv]
    s: http://ex.org/item_$(id)
    po:
      - [http://ex.org/p, $(v)]
  b:
    sources: [y.csv~csv]
    s: http://ex.org/item_$(id)
    po:
      - [http://ex.org/p, $(v)]
)");
  SourceCatalog sources(tmp.path());
  auto out = materialize_entities({{"E", doc}}, sources, 4);
  EXPECT_EQ(out[0].triples.size(), 3u);
}

TEST(Materialize, OutputIndependentOfJobs) {
  TempDir tmp;
  write_file(tmp / "data/repositories.csv", repositories_csv(20));
  write_file(tmp / "data/notebooks.csv", notebooks_csv(300, 20));
  write_file(tmp / "data/articles.csv", "id\n");
  std::vector<std::string> reference;
  for (unsigned jobs : {1u, 2u, 4u, 8u}) {
    SourceCatalog sources(tmp.path());
    auto lines = all_lines(materialize_entities(example_entities(), sources, jobs));
    if (reference.empty()) {
      reference = lines;
      std::set<std::string> unique(lines.begin(), lines.end());
      EXPECT_EQ(unique.size(), lines.size());
    } else {
      EXPECT_EQ(lines, reference) << "jobs=" << jobs;
    }
  }
}

TEST(Materialize, SuppressedColumnNeverReachesOutput) {
  TempDir tmp;
  write_file(tmp / "authors.csv", "id,name,email\n1,Ann,ann@example.org\n2,Bo,bo@example.org\n");
  auto doc = mapping::parse_yarrrml(R"(
mappings:
  author:
    sources: [authors.csv~csv]
    s: http://ex.org/author_$(id)
    po:
      - [http://ex.org/name, $(name)]
      - [http://ex.org/mbox, $(email)]
      - [http://ex.org/page, http://ex.org/by-mail/$(email)]
)");
  SourceCatalog sources(tmp.path(), {{"authors.csv", "email"}});
  auto lines = all_lines(materialize_entities({{"Author", doc}}, sources, 1));
  EXPECT_EQ(lines.size(), 2u);
  for (const auto& l : lines) EXPECT_EQ(l.find("example.org"), std::string::npos) << l;
}

TEST(Materialize, MissingSource) {
  TempDir tmp;
  SourceCatalog sources(tmp.path());
  try {
    materialize_entities(example_entities(), sources, 1);
    FAIL();
  } catch (const SourceNotFound& e) {
    EXPECT_EQ(e.path(), "data/repositories.csv");
  }
}

TEST(Materialize, FailureNamesThePartition) {
  TempDir tmp;
  write_file(tmp / "x.csv", "a,b\n1,2\n");
  auto doc = mapping::parse_yarrrml("mappings:\n  m:\n    sources: [x.csv~csv]\n    s: http://ex.org/$(a)\n"
                                    "    po:\n      - [http://ex.org/p, http://ex.org/$(a) $(b)]\n");
  SourceCatalog sources(tmp.path());
  try {
    materialize_entities({{"E", doc}}, sources, 1);
    FAIL();
  } catch (const MaterializationError& e) {
    EXPECT_NE(e.partition().find("http://ex.org/p"), std::string::npos);
  }
}

TEST(Report, WritesFilesAndTotals) {
  TempDir tmp;
  write_file(tmp / "data/repositories.csv", repositories_csv(4));
  write_file(tmp / "data/notebooks.csv", notebooks_csv(10, 4));
  write_file(tmp / "data/articles.csv", "id\n7\n");
  auto report = materialize_all(example_entities(), {tmp.path(), tmp / "out", 2, {}});
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].entity, "notebooks");
  EXPECT_EQ(report.rows[0].triples, 58u);
  EXPECT_EQ(report.rows[1].triples, 1u);
  EXPECT_EQ(kgforge::testing::lines_of(read_file(tmp / "out/notebooks.nt")).size(), 58u);
  EXPECT_EQ(report.rows[0].bytes, std::filesystem::file_size(tmp / "out/notebooks.nt"));
  auto total = report.total();
  EXPECT_EQ(total.entity, "Total");
  EXPECT_EQ(total.triples, 59u);
  EXPECT_EQ(total.mappings, 9u);
  EXPECT_EQ(total.bytes, report.rows[0].bytes + report.rows[1].bytes);

  std::ostringstream csv;
  report.write_csv(csv);
  auto rows = kgforge::testing::lines_of(csv.str());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "Entity,Time (in sec),No. of mappings,Triples generated,File Size");
  EXPECT_EQ(rows[3].rfind("Total,", 0), 0u);
  auto text = report.to_text();
  EXPECT_NE(text.find("Triples generated"), std::string::npos);
  EXPECT_NE(text.find("Total"), std::string::npos);
}

TEST(Report, SizeFormat) {
  EXPECT_EQ(format_size(490000), "0.49 MB");
  EXPECT_EQ(format_size(7800000), "7.8 MB");
  EXPECT_EQ(format_size(4200000000), "4.2 GB");
  EXPECT_EQ(format_size(0), "0.00 MB");
}

TEST(Report, InvalidMappingsAreRejectedBeforeOutput) {
  TempDir tmp;
  write_file(tmp / "data/repositories.csv", "id,repository\n1,x\n");
  write_file(tmp / "data/notebooks.csv", notebooks_csv(1, 1));
  write_file(tmp / "data/articles.csv", "id\n");
  EXPECT_THROW(materialize_all(example_entities(), {tmp.path(), tmp / "out", 1, {}}), std::runtime_error);
  EXPECT_FALSE(std::filesystem::exists(tmp / "out/notebooks.nt"));
}
