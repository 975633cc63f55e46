#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kgforge/rdf/iri.hpp"
#include "kgforge/rdf/ntriples.hpp"
#include "kgforge/rdf/prefix_map.hpp"
#include "kgforge/rdf/vocabulary.hpp"

using namespace kgforge::rdf;

namespace {

Triple T(Term s, std::string p, Term o) { return Triple(std::move(s), Term::iri(std::move(p)), std::move(o)); }

// Random but valid triples, including awkward literal content.
std::vector<Triple> random_triples(std::mt19937& rng, std::size_t n) {
  const std::vector<std::string> lexicals = {
      "", "plain", "with \"quotes\"", "back\\slash", "line\nbreak", "tab\there", "cr\rhere",
      "bell\x07", "del\x7F", "caf\xC3\xA9", "\xE0\xB4\xAE\xE0\xB4\xB2", "emoji \xF0\x9F\x98\x80", "# not a comment"};
  std::vector<Triple> out;
  for (std::size_t i = 0; i < n; ++i) {
    Term s = rng() % 4 == 0 ? Term::blank("b" + std::to_string(rng() % 50))
                            : Term::iri("https://w3id.org/reproduceme/n_" + std::to_string(rng() % 100));
    std::string p = "http://ex.org/p" + std::to_string(rng() % 5);
    Term o;
    switch (rng() % 5) {
      case 0: o = Term::iri("https://ex.org/caf\xC3\xA9/" + std::to_string(rng() % 10)); break;
      case 1: o = Term::blank("x-" + std::to_string(rng() % 10)); break;
      case 2: o = Term::lang(lexicals[rng() % lexicals.size()], "en-GB"); break;
      case 3: o = Term::typed(std::to_string(rng() % 1000), std::string(vocab::kXsdInteger)); break;
      default: o = Term::literal(lexicals[rng() % lexicals.size()]); break;
    }
    out.emplace_back(std::move(s), Term::iri(p), std::move(o));
  }
  return out;
}

}  // namespace

TEST(Term, Invariants) {
  EXPECT_THROW(Term::iri("http://a b"), TermError);
  EXPECT_THROW(Term::iri("http://a<b"), TermError);
  EXPECT_THROW(Term::iri(""), TermError);
  EXPECT_THROW(Term::iri("http://a\x01"), TermError);
  EXPECT_THROW(Term::blank("_bad"), TermError);
  EXPECT_THROW(Term::lang("x", "en_US"), TermError);
  EXPECT_NO_THROW(Term::blank("b1-x_2"));

  // xsd:string literals are the same term as simple literals.
  EXPECT_EQ(Term::typed("x", std::string(vocab::kXsdString)), Term::literal("x"));
  EXPECT_EQ(Term::literal("x").effective_datatype(), vocab::kXsdString);
  EXPECT_NE(Term::typed("01", std::string(vocab::kXsdInteger)), Term::typed("1", std::string(vocab::kXsdInteger)));

  EXPECT_THROW(Triple(Term::literal("x"), Term::iri("http://p"), Term::literal("y")), TermError);
  EXPECT_THROW(Triple(Term::iri("http://s"), Term::blank("p"), Term::literal("y")), TermError);
}

TEST(PrefixMap, ExpandCurie) {
  PrefixMap prefixes{{"repr", "https://w3id.org/reproduceme/"}, {"rdfs", std::string(vocab::kRdfs)}};
  EXPECT_EQ(expand_curie("repr:Notebook", prefixes), Term::iri("https://w3id.org/reproduceme/Notebook"));
  EXPECT_EQ(expand_curie("rdfs:", prefixes), Term::iri("http://www.w3.org/2000/01/rdf-schema#"));
  try {
    expand_curie("x:y", PrefixMap{});
    FAIL() << "expected UnknownPrefix";
  } catch (const UnknownPrefix& e) {
    EXPECT_EQ(e.label(), "x");
  }
  EXPECT_THROW(expand_curie("nocolon", prefixes), CurieSyntaxError);
  EXPECT_THROW(expand_curie("repr:has space", prefixes), CurieSyntaxError);
  EXPECT_THROW(prefixes.add("repr", "http://other/"), std::invalid_argument);
}

TEST(PrefixMap, ExpansionIsInjective) {
  PrefixMap prefixes{{"p", "http://ex.org/ns#"}};
  std::set<Term> seen;
  for (int i = 0; i < 200; ++i) {
    auto t = expand_curie("p:local" + std::to_string(i), prefixes);
    EXPECT_TRUE(seen.insert(t).second);
  }
}

TEST(Vocabulary, EveryConstantIsAnAbsoluteIri) {
  for (auto iri : {vocab::kFabioArticle, vocab::kFabioJournal, vocab::kDoapGitRepository, vocab::kReprNotebook,
                   vocab::kReprCell, vocab::kReprCellExecution, vocab::kReprFile, vocab::kProvSpecializationOf,
                   vocab::kProvGeneralizationOf, vocab::kPavRetrievedFrom, vocab::kPPlanIsStepOfPlan,
                   vocab::kPPlanIsVariableOfPlan, vocab::kRdfsLabel, vocab::kReprKernel, vocab::kReprLanguage,
                   vocab::kReprTotalCells, vocab::kReprDuration, vocab::kReprProcessed, vocab::kReprUrl}) {
    EXPECT_TRUE(is_valid_iri(iri)) << iri;
    EXPECT_TRUE(has_uri_scheme(iri)) << iri;
  }
  const auto& std_prefixes = vocab::standard_prefixes();
  EXPECT_EQ(expand_curie("p-plan:isStepOfPlan", std_prefixes).value(), vocab::kPPlanIsStepOfPlan);
  EXPECT_EQ(expand_curie("pav:retrievedFrom", std_prefixes).value(), vocab::kPavRetrievedFrom);
}

TEST(NTriples, SerializeExamples) {
  EXPECT_EQ(serialize_ntriples({T(Term::iri("a"), "b", Term::literal("x\"y"))}), "<a> <b> \"x\\\"y\" .\n");
  EXPECT_EQ(serialize_ntriples({T(Term::iri("https://w3id.org/reproduceme/repository_1"), std::string(vocab::kRdfType),
                                  Term::iri(std::string(vocab::kDoapGitRepository)))}),
            "<https://w3id.org/reproduceme/repository_1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> "
            "<http://usefulinc.com/ns/doap#GitRepository> .\n");
  EXPECT_EQ(serialize_ntriples({}), "");
  EXPECT_EQ(serialize_ntriples({T(Term::iri("a"), "b", Term::literal("1\n2\t\\\r"))}),
            "<a> <b> \"1\\n2\\t\\\\\\r\" .\n");
  EXPECT_EQ(serialize_ntriples({T(Term::iri("a"), "b", Term::lang("hi", "en"))}), "<a> <b> \"hi\"@en .\n");
}

TEST(NTriples, StrictAsciiEscapes) {
  auto t = T(Term::iri("http://ex.org/caf\xC3\xA9"), "b", Term::literal("\xF0\x9F\x98\x80 caf\xC3\xA9"));
  auto text = serialize_ntriples({t}, {.ascii_only = true});
  EXPECT_EQ(text, "<http://ex.org/caf\\u00E9> <b> \"\\U0001F600 caf\\u00E9\" .\n");
  EXPECT_EQ(parse_ntriples(text), std::vector<Triple>{t});
}

TEST(NTriples, ParseGrammarCases) {
  auto typed = parse_ntriples("<a> <b> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .");
  ASSERT_EQ(typed.size(), 1u);
  EXPECT_EQ(typed[0].object, Term::typed("1", std::string(vocab::kXsdInteger)));

  auto mixed = parse_ntriples("# comment\n\n_:b1 <p> <o> . # trailing\r\n<s> <p> \"caf\\u00E9\"@fr .\n");
  ASSERT_EQ(mixed.size(), 2u);
  EXPECT_EQ(mixed[0].subject, Term::blank("b1"));
  EXPECT_EQ(mixed[1].object, Term::lang("caf\xC3\xA9", "fr"));
}

TEST(NTriples, ParseErrorsCarryPosition) {
  try {
    parse_ntriples("<a> <b> .");
    FAIL();
  } catch (const NTriplesParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    parse_ntriples("<a> <b> <c> .\n<a> <b> \"open .\n");
    FAIL();
  } catch (const NTriplesParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GE(e.offset(), 14u);
  }
  EXPECT_THROW(parse_ntriples("\"lit\" <b> <c> ."), NTriplesParseError);
  EXPECT_THROW(parse_ntriples("<a> _:p <c> ."), NTriplesParseError);
  EXPECT_THROW(parse_ntriples("<a b> <p> <c> ."), NTriplesParseError);
  EXPECT_THROW(parse_ntriples("<a> <p> <c> . extra"), NTriplesParseError);
}

TEST(NTriples, RoundTripPreservesOrder) {
  std::mt19937 rng(7);
  for (int round = 0; round < 20; ++round) {
    auto triples = random_triples(rng, 100);
    for (bool ascii : {false, true}) {
      auto text = serialize_ntriples(triples, {.ascii_only = ascii});
      EXPECT_EQ(parse_ntriples(text), triples);
      std::istringstream in(text);
      std::vector<Triple> streamed;
      parse_ntriples(in, [&](Triple&& t) { streamed.push_back(std::move(t)); });
      EXPECT_EQ(streamed, triples);
    }
  }
}

TEST(NTriples, NoRawControlCharactersInOutput) {
  std::mt19937 rng(11);
  auto text = serialize_ntriples(random_triples(rng, 500));
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (c == '\n') continue;
    EXPECT_FALSE(u < 0x20 || u == 0x7F) << "raw control byte " << int(u);
  }
}

TEST(Iri, PercentEncodingKeepsUnreserved) {
  EXPECT_EQ(percent_encode("my nb"), "my%20nb");
  EXPECT_EQ(percent_encode("A-z_0.9~"), "A-z_0.9~");
  EXPECT_EQ(percent_encode("a/b?c#d"), "a%2Fb%3Fc%23d");
  EXPECT_EQ(percent_encode("\xC3\xA9"), "%C3%A9");
}
