#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const fs::path kWorkDir = fs::temp_directory_path() / "evipath_cli_test";

RunResult run(const std::string& args) {
  fs::create_directories(kWorkDir);
  const fs::path out_path = kWorkDir / "stdout.txt";
  const fs::path err_path = kWorkDir / "stderr.txt";
  const std::string command = std::string(EVIPATH_BIN) + " " + args + " > " +
                              out_path.string() + " 2> " + err_path.string();
  const int raw = std::system(command.c_str());
  RunResult result;
  result.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

const std::string kEspoo = std::string(EVIPATH_DATA_DIR) + "/espoo.json";
const std::string kVectors = std::string(EVIPATH_DATA_DIR) + "/toy_vectors.txt";
const std::string kWeights = std::string(EVIPATH_DATA_DIR) + "/toy_weights.json";

fs::path write_temp(const std::string& name, const std::string& content) {
  fs::create_directories(kWorkDir);
  const fs::path path = kWorkDir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("validate accepts the sample corpus") {
  const RunResult result = run("validate --input " + kEspoo);
  CHECK(result.code == 0);
  CHECK(result.out.find("1 documents") != std::string::npos);
  CHECK(result.out.find("4 entities") != std::string::npos);
  CHECK(result.out.find("3 instances") != std::string::npos);
}

TEST_CASE("a missing input file exits 2 and names the flag") {
  const RunResult result = run("validate --input /nonexistent/corpus.json");
  CHECK(result.code == 2);
  CHECK(result.err.find("--input") != std::string::npos);
}

TEST_CASE("malformed corpus content exits 1") {
  const fs::path bad = write_temp("bad.json", "[{]");
  const RunResult malformed = run("validate --input " + bad.string());
  CHECK(malformed.code == 1);
  CHECK(malformed.err.find("malformed JSON") != std::string::npos);

  const fs::path invalid = write_temp("invalid.json", R"([
    {"title": "x", "sents": [["a"]],
     "vertexSet": [[{"name": "a", "sent_id": 0, "pos": [0, 2], "type": "X"}]],
     "labels": []}
  ])");
  const RunResult bad_span = run("validate --input " + invalid.string());
  CHECK(bad_span.code == 1);
  CHECK(bad_span.err.find("span out of range") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("frobnicate").code == 2);
  CHECK(run("validate").code == 2);                                // missing --input
  CHECK(run("coverage --input " + kEspoo + " --rules xyz").code == 2);
  CHECK(run("coverage --input " + kEspoo + " --rules cmd --format yaml").code == 2);
  CHECK(run("paths --input " + kEspoo + " --doc 9 --head 0 --tail 1").code == 2);
  CHECK(run("paths --input " + kEspoo + " --doc 0 --head 0 --tail 0").code == 2);
  CHECK(run("score --input " + kEspoo + " --vectors " + kVectors + " --weights " +
            kWeights).code == 2);  // neither --threshold nor --fit-threshold
}

TEST_CASE("stats reports the evidence histogram") {
  const RunResult result = run("stats --input " + kEspoo);
  REQUIRE(result.code == 0);
  const json hist = json::parse(result.out);
  CHECK(hist["n_instances"] == 3);
  CHECK(hist["avg_doc_sentences"] == 6.0);
  CHECK(hist["buckets"]["1"] == 1);
  CHECK(hist["buckets"]["2"] == 2);

  const RunResult md = run("stats --input " + kEspoo + " --format md");
  REQUIRE(md.code == 0);
  CHECK(md.out.find("| 0 | 1 | 2 | 3 | >=4 | #Sent |") != std::string::npos);
}

TEST_CASE("stats writes the canonical file into an output directory") {
  fs::create_directories(kWorkDir / "reports");
  const RunResult result =
      run("stats --input " + kEspoo + " --output " + (kWorkDir / "reports").string());
  REQUIRE(result.code == 0);
  CHECK(fs::is_regular_file(kWorkDir / "reports" / "evidence_hist.json"));
}

TEST_CASE("paths finds the multi-hop connection in the sample document") {
  const RunResult result = run("paths --input " + kEspoo + " --doc 0 --head 2 --tail 3");
  REQUIRE(result.code == 0);
  const json out = json::parse(result.out);
  CHECK(out["doc_id"] == "Espoo Cathedral");
  CHECK(out["h"] == 2);
  CHECK(out["t"] == 3);
  bool found = false;
  for (const json& path : out["paths"]) {
    if (path["kind"] == "multihop" && path["sentences"] == json::array({0, 5})) {
      CHECK(path["bridges"] == json::array({1}));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("path extraction knobs narrow the rule windows") {
  // Window gap 0 keeps only the intra-sentence window for Espoo/Finland.
  const RunResult narrow =
      run("paths --input " + kEspoo + " --doc 0 --head 0 --tail 1 --rules c --max-gap 0");
  REQUIRE(narrow.code == 0);
  const json narrow_out = json::parse(narrow.out);
  REQUIRE(narrow_out["paths"].size() == 1);
  CHECK(narrow_out["paths"][0]["sentences"] == json::array({0}));

  // The default gap also admits the two-sentence window {0, 1}.
  const RunResult wide = run("paths --input " + kEspoo + " --doc 0 --head 0 --tail 1 --rules c");
  REQUIRE(wide.code == 0);
  CHECK(json::parse(wide.out)["paths"].size() == 2);

  // Multi-hop only: every emitted path carries that kind.
  const RunResult m_only = run("paths --input " + kEspoo + " --doc 0 --head 2 --tail 3 --rules m");
  REQUIRE(m_only.code == 0);
  const json m_out = json::parse(m_only.out);
  CHECK_FALSE(m_out["paths"].empty());
  for (const json& path : m_out["paths"]) {
    CHECK(path["kind"] == "multihop");
  }
  CHECK(run("paths --input " + kEspoo + " --doc 0 --head 2 --tail 3 --max-bridges 5").code == 2);
}

TEST_CASE("coverage reports full coverage of the sample document") {
  const RunResult result = run("coverage --input " + kEspoo + " --rules cmd --format md");
  REQUIRE(result.code == 0);
  CHECK(result.out.find("| Config | Coverage | #Sent | #Path |") != std::string::npos);
  CHECK(result.out.find("| C+M+D | 100.0% |") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical output") {
  const std::string cmd = "coverage --input " + kEspoo + " --rules cmd --format json --detail";
  const RunResult first = run(cmd);
  const RunResult second = run(cmd);
  REQUIRE(first.code == 0);
  CHECK(first.out == second.out);
  const RunResult jobs1 = run(cmd + " --jobs 1");
  const RunResult jobs4 = run(cmd + " --jobs 4");
  CHECK(jobs1.out == first.out);
  CHECK(jobs4.out == first.out);
}

TEST_CASE("export-segments emits parseable JSONL rows") {
  const RunResult result = run("export-segments --input " + kEspoo);
  REQUIRE(result.code == 0);
  std::istringstream lines(result.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const json row = json::parse(line);
    for (const char* key : {"doc_id", "h", "t", "kind", "sentences", "tokens",
                            "head_spans", "tail_spans", "relations"}) {
      CHECK(row.contains(key));
    }
    ++rows;
  }
  CHECK(rows >= 3);
}

TEST_CASE("score emits predictions and eval scores them") {
  const fs::path pred = kWorkDir / "pred.jsonl";
  const RunResult scored = run("score --input " + kEspoo + " --vectors " + kVectors +
                               " --weights " + kWeights + " --threshold 0.5 --output " +
                               pred.string());
  REQUIRE(scored.code == 0);
  std::istringstream lines(read_file(pred));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const json row = json::parse(line);
    CHECK(row.contains("doc_id"));
    CHECK(row.contains("r"));
    CHECK(row["score"].get<double>() > 0.5);
  }

  const RunResult fitted = run("score --input " + kEspoo + " --vectors " + kVectors +
                               " --weights " + kWeights + " --fit-threshold");
  CHECK(fitted.code == 0);
  CHECK(fitted.err.find("fitted threshold") != std::string::npos);
}

TEST_CASE("eval reports perfect F1 for gold predictions") {
  std::string pred_lines;
  pred_lines += R"({"doc_id":"Espoo Cathedral","h":0,"t":1,"r":"P17","score":0.9})" "\n";
  pred_lines += R"({"doc_id":"Espoo Cathedral","h":2,"t":0,"r":"P131","score":0.9})" "\n";
  pred_lines += R"({"doc_id":"Espoo Cathedral","h":3,"t":1,"r":"P17","score":0.9})" "\n";
  const fs::path pred = write_temp("gold_pred.jsonl", pred_lines);
  const RunResult result = run("eval --pred " + pred.string() + " --gold " + kEspoo);
  REQUIRE(result.code == 0);
  const json out = json::parse(result.out);
  CHECK(out["overall_f1"] == 1.0);
  CHECK(out["precision"] == 1.0);
  CHECK(out["recall"] == 1.0);
  // All three sample pairs are intra: each pair shares a sentence.
  CHECK(out["intra"]["tp"].get<int>() + out["inter"]["tp"].get<int>() == 3);
}

TEST_CASE("eval with a wrong prediction reports the exact micro metrics") {
  std::string pred_lines;
  pred_lines += R"({"doc_id":"Espoo Cathedral","h":0,"t":1,"r":"P17","score":0.9})" "\n";
  pred_lines += R"({"doc_id":"Espoo Cathedral","h":1,"t":0,"r":"P17","score":0.8})" "\n";
  const fs::path pred = write_temp("mixed_pred.jsonl", pred_lines);
  const RunResult result = run("eval --pred " + pred.string() + " --gold " + kEspoo);
  REQUIRE(result.code == 0);
  const json out = json::parse(result.out);
  CHECK(out["precision"] == 0.5);                       // 1 TP, 1 FP
  CHECK(out["recall"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("eval rejects an empty gold corpus") {
  const fs::path gold = write_temp("empty_gold.json", R"([
    {"title": "g", "sents": [["a", "b"]],
     "vertexSet": [[{"name": "a", "sent_id": 0, "pos": [0, 1], "type": "X"}],
                    [{"name": "b", "sent_id": 0, "pos": [1, 2], "type": "X"}]],
     "labels": []}
  ])");
  const fs::path pred = write_temp("some_pred.jsonl",
                                   R"({"doc_id":"g","h":0,"t":1,"r":"R0","score":0.9})" "\n");
  const RunResult result = run("eval --pred " + pred.string() + " --gold " + gold.string());
  CHECK(result.code == 2);  // empty gold is an argument error
  CHECK(result.err.find("recall is undefined") != std::string::npos);
}

TEST_CASE("jobs environment variable is accepted as a fallback") {
  const RunResult result = run("coverage --input " + kEspoo + " --rules cmd --format csv");
  REQUIRE(result.code == 0);
  fs::create_directories(kWorkDir);
  const fs::path out_path = kWorkDir / "stdout_env.txt";
  const std::string command = "EVIPATH_JOBS=2 " + std::string(EVIPATH_BIN) + " coverage --input " +
                              kEspoo + " --rules cmd --format csv > " + out_path.string() +
                              " 2> /dev/null";
  REQUIRE(std::system(command.c_str()) == 0);
  CHECK(read_file(out_path) == result.out);
}
