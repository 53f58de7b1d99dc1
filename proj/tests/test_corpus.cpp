#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "evipath/corpus.hpp"
#include "evipath/errors.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace evipath;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// A minimal well-formed corpus used as the mutation baseline.
json minimal_corpus() {
  return json::parse(R"([
    {
      "title": "mini",
      "sents": [["Espoo", "is", "in", "Finland"]],
      "vertexSet": [
        [{"name": "Espoo", "sent_id": 0, "pos": [0, 1], "type": "LOC"}],
        [{"name": "Finland", "sent_id": 0, "pos": [3, 4], "type": "LOC"}]
      ],
      "labels": [{"h": 0, "t": 1, "r": "P17", "evidence": [0]}]
    }
  ])");
}

const std::string kEspooPath = std::string(EVIPATH_DATA_DIR) + "/espoo.json";

}  // namespace

TEST_CASE("parses a minimal well-formed corpus") {
  const std::vector<Document> docs = parse_docred(minimal_corpus().dump());
  REQUIRE(docs.size() == 1);
  const Document& doc = docs[0];
  CHECK(doc.doc_id == "mini");
  CHECK(doc.sentences.size() == 1);
  CHECK(doc.sentences[0].size() == 4);
  CHECK(doc.entities.size() == 2);
  CHECK(doc.instances.size() == 1);
  CHECK(doc.instances[0].head == 0);
  CHECK(doc.instances[0].tail == 1);
  CHECK(doc.instances[0].evidence == std::vector<int>{0});
}

TEST_CASE("rejects a mention span past the end of its sentence") {
  json corpus = minimal_corpus();
  corpus[0]["vertexSet"][1][0]["pos"] = {3, 5};  // sentence has 4 tokens
  CHECK_THROWS_WITH_AS(parse_docred(corpus.dump()),
                       doctest::Contains("span out of range"), ValidationError);
}

TEST_CASE("loads the espoo sample document") {
  const std::vector<Document> docs = parse_docred(read_file(kEspooPath));
  REQUIRE(docs.size() == 1);
  const Document& doc = docs[0];
  CHECK(doc.sentences.size() == 6);
  REQUIRE(doc.entities.size() >= 4);
  CHECK(doc.entities[0].mentions[0].surface == "Espoo");
  CHECK(doc.entities[1].mentions[0].surface == "Finland");
  CHECK(doc.entities[2].mentions[0].surface == "The Espoo Cathedral");
  CHECK(doc.entities[3].mentions[0].surface == "the EC Parish");
  CHECK(doc.instances.size() == 3);
}

TEST_CASE("occurrence index maps Finland to sentences 0 and 5 in the sample") {
  const std::vector<Document> docs = parse_docred(read_file(kEspooPath));
  const OccurrenceIndex index = OccurrenceIndex::build(docs[0]);
  CHECK(index.sentences_of(1) == std::vector<int>{0, 5});
}

TEST_CASE("occurrence index dedups repeated mentions in one sentence") {
  json corpus = minimal_corpus();
  corpus[0]["vertexSet"][0].push_back(
      {{"name", "Espoo"}, {"sent_id", 0}, {"pos", {0, 1}}, {"type", "LOC"}});
  const std::vector<Document> docs = parse_docred(corpus.dump());
  CHECK(docs[0].entities[0].mentions.size() == 2);  // duplicates stay in the model
  const OccurrenceIndex index = OccurrenceIndex::build(docs[0]);
  CHECK(index.sentences_of(0) == std::vector<int>{0});
}

TEST_CASE("occurrence index equals a brute-force mention scan") {
  std::mt19937 rng(20240601);
  for (int trial = 0; trial < 100; ++trial) {
    const Document doc = testing::random_document(rng);
    const OccurrenceIndex index = OccurrenceIndex::build(doc);
    CHECK(index.entity_sentences == testing::oracle_occurrence_sentences(doc));
    CHECK(index.sentence_entities == testing::oracle_occurrence_entities(doc));
  }
}

TEST_CASE("occurrence index is internally consistent") {
  std::mt19937 rng(20240602);
  for (int trial = 0; trial < 50; ++trial) {
    const Document doc = testing::random_document(rng);
    const OccurrenceIndex index = OccurrenceIndex::build(doc);
    for (std::size_t e = 0; e < doc.entities.size(); ++e) {
      for (int s : index.sentences_of(static_cast<int>(e))) {
        const auto& entities = index.entities_in(s);
        CHECK(std::find(entities.begin(), entities.end(), static_cast<int>(e)) != entities.end());
      }
    }
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      for (int e : index.entities_in(static_cast<int>(s))) {
        const auto& sentences = index.sentences_of(e);
        CHECK(std::find(sentences.begin(), sentences.end(), static_cast<int>(s)) != sentences.end());
      }
    }
  }
}

TEST_CASE("parse -> dump -> parse reproduces documents exactly") {
  SUBCASE("espoo sample") {
    const std::vector<Document> docs = parse_docred(read_file(kEspooPath));
    const std::vector<Document> again = parse_docred(dump_docred(docs));
    CHECK(docs == again);
  }
  SUBCASE("synthetic corpus") {
    std::mt19937 rng(20240603);
    const std::vector<Document> corpus = testing::random_corpus(rng, 40);
    const std::vector<Document> again = parse_docred(dump_docred(corpus));
    CHECK(corpus == again);
    // Dumping twice is byte-identical.
    CHECK(dump_docred(corpus) == dump_docred(again));
  }
}

TEST_CASE("validation rejects each broken invariant and nothing else") {
  auto expect_validation_error = [](const json& corpus, const char* needle) {
    CHECK_THROWS_WITH_AS(parse_docred(corpus.dump()), doctest::Contains(needle), ValidationError);
  };

  SUBCASE("baseline is accepted") {
    CHECK_NOTHROW(parse_docred(minimal_corpus().dump()));
  }
  SUBCASE("empty sentence list") {
    json corpus = minimal_corpus();
    corpus[0]["sents"] = json::array();
    corpus[0]["vertexSet"] = json::array();
    corpus[0]["labels"] = json::array();
    expect_validation_error(corpus, "no sentences");
  }
  SUBCASE("empty sentence") {
    json corpus = minimal_corpus();
    corpus[0]["sents"].push_back(json::array());
    expect_validation_error(corpus, "sentence 1 is empty");
  }
  SUBCASE("entity with no mentions") {
    json corpus = minimal_corpus();
    corpus[0]["vertexSet"].push_back(json::array());
    expect_validation_error(corpus, "mentions is empty");
  }
  SUBCASE("mention sentence out of range") {
    json corpus = minimal_corpus();
    corpus[0]["vertexSet"][0][0]["sent_id"] = 1;
    expect_validation_error(corpus, "sentence index 1 out of range");
  }
  SUBCASE("negative mention start") {
    json corpus = minimal_corpus();
    corpus[0]["vertexSet"][0][0]["pos"] = {-1, 1};
    expect_validation_error(corpus, "span out of range");
  }
  SUBCASE("empty span") {
    json corpus = minimal_corpus();
    corpus[0]["vertexSet"][0][0]["pos"] = {2, 2};
    expect_validation_error(corpus, "span out of range");
  }
  SUBCASE("label head equals tail") {
    json corpus = minimal_corpus();
    corpus[0]["labels"][0]["t"] = 0;
    expect_validation_error(corpus, "head and tail are the same entity");
  }
  SUBCASE("label head out of range") {
    json corpus = minimal_corpus();
    corpus[0]["labels"][0]["h"] = 7;
    expect_validation_error(corpus, "head index 7 out of range");
  }
  SUBCASE("evidence index out of range") {
    json corpus = minimal_corpus();
    corpus[0]["labels"][0]["evidence"] = {0, 3};
    expect_validation_error(corpus, "evidence index 3 out of range");
  }
  SUBCASE("zero labels are fine") {
    json corpus = minimal_corpus();
    corpus[0]["labels"] = json::array();
    const std::vector<Document> docs = parse_docred(corpus.dump());
    CHECK(docs[0].instances.empty());
  }
  SUBCASE("empty evidence is fine") {
    json corpus = minimal_corpus();
    corpus[0]["labels"][0]["evidence"] = json::array();
    const std::vector<Document> docs = parse_docred(corpus.dump());
    CHECK(docs[0].instances[0].evidence.empty());
  }
  SUBCASE("unknown extra keys are ignored") {
    json corpus = minimal_corpus();
    corpus[0]["extra_metadata"] = {{"split", "dev"}};
    corpus[0]["vertexSet"][0][0]["global_id"] = "Q47492";
    CHECK_NOTHROW(parse_docred(corpus.dump()));
  }
}

TEST_CASE("malformed JSON reports the byte offset") {
  CHECK_THROWS_WITH_AS(parse_docred("[{\"title\": }]"), doctest::Contains("byte"), ParseError);
}

TEST_CASE("schema errors name the missing key") {
  SUBCASE("top level must be an array") {
    CHECK_THROWS_AS(parse_docred("{}"), SchemaError);
  }
  SUBCASE("missing sents") {
    json corpus = minimal_corpus();
    corpus[0].erase("sents");
    CHECK_THROWS_WITH_AS(parse_docred(corpus.dump()), doctest::Contains("\"sents\""), SchemaError);
  }
  SUBCASE("missing mention pos") {
    json corpus = minimal_corpus();
    corpus[0]["vertexSet"][0][0].erase("pos");
    CHECK_THROWS_WITH_AS(parse_docred(corpus.dump()), doctest::Contains("\"pos\""), SchemaError);
  }
  SUBCASE("pos must have two elements") {
    json corpus = minimal_corpus();
    corpus[0]["vertexSet"][0][0]["pos"] = {1};
    CHECK_THROWS_AS(parse_docred(corpus.dump()), SchemaError);
  }
  SUBCASE("missing labels") {
    json corpus = minimal_corpus();
    corpus[0].erase("labels");
    CHECK_THROWS_WITH_AS(parse_docred(corpus.dump()), doctest::Contains("\"labels\""), SchemaError);
  }
  SUBCASE("sent_id must be an integer") {
    json corpus = minimal_corpus();
    corpus[0]["vertexSet"][0][0]["sent_id"] = "zero";
    CHECK_THROWS_AS(parse_docred(corpus.dump()), SchemaError);
  }
}

TEST_CASE("evidence lists are normalized to sorted unique sets") {
  json corpus = minimal_corpus();
  corpus[0]["sents"].push_back({"Second", "sentence", "."});
  corpus[0]["labels"][0]["evidence"] = {1, 0, 1};
  const std::vector<Document> docs = parse_docred(corpus.dump());
  CHECK(docs[0].instances[0].evidence == std::vector<int>{0, 1});
}
