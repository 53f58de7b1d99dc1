#include "evipath/pathrel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

#include "evipath/errors.hpp"
#include "evipath/jobs.hpp"

namespace evipath {

using nlohmann::json;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return sigmoid(x);
  }
  return x;
}

std::vector<double> parse_double_vector(const json& value, const std::string& where) {
  if (!value.is_array()) throw SchemaError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (const json& v : value) {
    if (!v.is_number()) throw SchemaError(where + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// Flattens a row-major nested array and checks its shape.
std::vector<double> parse_matrix(const json& value, int rows, int cols, const std::string& where) {
  if (!value.is_array() || static_cast<int>(value.size()) != rows) {
    throw SchemaError(where + ": expected " + std::to_string(rows) + " rows");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    std::vector<double> row = parse_double_vector(value[r], where + "[" + std::to_string(r) + "]");
    if (static_cast<int>(row.size()) != cols) {
      throw SchemaError(where + "[" + std::to_string(r) + "]: expected " + std::to_string(cols) +
                        " columns, got " + std::to_string(row.size()));
    }
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

json span_list_json(const std::vector<std::pair<int, int>>& spans) {
  json out = json::array();
  for (const auto& [s, e] : spans) {
    out.push_back({s, e});
  }
  return out;
}

std::vector<std::pair<int, int>> parse_span_list(const json& value, const std::string& where) {
  if (!value.is_array()) throw SchemaError(where + ": expected an array of [start, end] pairs");
  std::vector<std::pair<int, int>> out;
  for (const json& jp : value) {
    if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number_integer() || !jp[1].is_number_integer()) {
      throw SchemaError(where + ": expected [start, end] integer pairs");
    }
    out.emplace_back(jp[0].get<int>(), jp[1].get<int>());
  }
  return out;
}

}  // namespace

Segment build_segment(const Document& doc, const Path& path, int head, int tail) {
  const int n_ent = static_cast<int>(doc.entities.size());
  const int n_sent = static_cast<int>(doc.sentences.size());
  if (head < 0 || head >= n_ent || tail < 0 || tail >= n_ent) {
    throw ArgumentError("entity index out of range");
  }
  if (head == tail) {
    throw ArgumentError("head and tail must be different entities");
  }
  if (path.sentences.empty()) {
    throw ArgumentError("path has no sentences");
  }
  for (std::size_t i = 0; i < path.sentences.size(); ++i) {
    const int s = path.sentences[i];
    if (s < 0 || s >= n_sent) {
      throw ArgumentError("path sentence index " + std::to_string(s) + " out of range");
    }
    if (i > 0 && path.sentences[i - 1] >= s) {
      throw ArgumentError("path sentences must be strictly ascending");
    }
  }

  Segment seg;
  seg.doc_id = doc.doc_id;
  seg.path = path;
  std::map<int, int> sentence_start;  // document sentence -> segment offset
  int offset = 0;
  for (int s : path.sentences) {
    seg.sentence_boundaries.push_back(offset);
    sentence_start[s] = offset;
    const auto& sent = doc.sentences[s];
    seg.tokens.insert(seg.tokens.end(), sent.begin(), sent.end());
    offset += static_cast<int>(sent.size());
  }

  auto remap = [&](int entity, std::vector<std::pair<int, int>>& spans) {
    for (const Mention& m : doc.entities[entity].mentions) {
      auto it = sentence_start.find(m.sentence_index);
      if (it == sentence_start.end()) continue;  // mention outside the path
      spans.emplace_back(m.start + it->second, m.end + it->second);
    }
  };
  remap(head, seg.head_spans);
  remap(tail, seg.tail_spans);
  if (seg.head_spans.empty() || seg.tail_spans.empty()) {
    throw ContractError("doc \"" + doc.doc_id + "\": path {" +
                        [&] {
                          std::string s;
                          for (int v : path.sentences) s += (s.empty() ? "" : ",") + std::to_string(v);
                          return s;
                        }() +
                        "} contains no mention of " +
                        (seg.head_spans.empty() ? "head" : "tail") + " entity");
  }
  return seg;
}

std::vector<SegmentRecord> export_segments(const Document& doc, const RuleConfig& config) {
  // Gold labels per pair, so every record carries the pair's full label set.
  std::map<std::pair<int, int>, std::vector<std::string>> pair_relations;
  for (const RelationInstance& inst : doc.instances) {
    pair_relations[{inst.head, inst.tail}].push_back(inst.relation);
  }
  for (auto& [pair, relations] : pair_relations) {
    std::sort(relations.begin(), relations.end());
    relations.erase(std::unique(relations.begin(), relations.end()), relations.end());
  }

  const OccurrenceIndex index = OccurrenceIndex::build(doc);
  std::vector<SegmentRecord> records;
  std::set<std::pair<int, int>> done;
  for (const RelationInstance& inst : doc.instances) {
    const std::pair<int, int> pair{inst.head, inst.tail};
    if (!done.insert(pair).second) continue;
    const PathSet paths = extract_paths(doc, index, inst.head, inst.tail, config);
    for (const Path& p : paths.paths) {
      SegmentRecord record;
      record.segment = build_segment(doc, p, inst.head, inst.tail);
      record.head = inst.head;
      record.tail = inst.tail;
      record.relations = pair_relations[pair];
      records.push_back(std::move(record));
    }
  }
  return records;
}

std::string dump_segments_jsonl(std::span<const SegmentRecord> records) {
  std::ostringstream out;
  for (const SegmentRecord& record : records) {
    const Segment& seg = record.segment;
    json row;
    row["doc_id"] = seg.doc_id;
    row["h"] = record.head;
    row["t"] = record.tail;
    row["kind"] = to_string(seg.path.kind);
    row["sentences"] = seg.path.sentences;
    row["bridges"] = seg.path.bridges;
    row["tokens"] = seg.tokens;
    row["head_spans"] = span_list_json(seg.head_spans);
    row["tail_spans"] = span_list_json(seg.tail_spans);
    row["sentence_boundaries"] = seg.sentence_boundaries;
    row["relations"] = record.relations;
    out << row.dump() << '\n';
  }
  return out.str();
}

std::vector<SegmentRecord> parse_segments_jsonl(const std::string& bytes) {
  std::vector<SegmentRecord> records;
  std::istringstream in(bytes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "segments line " + std::to_string(line_no);
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + ": malformed JSON: " + e.what());
    }
    auto require = [&](const char* key) -> const json& {
      auto it = row.find(key);
      if (it == row.end()) throw SchemaError(where + ": missing key \"" + key + "\"");
      return *it;
    };
    SegmentRecord record;
    Segment& seg = record.segment;
    seg.doc_id = require("doc_id").get<std::string>();
    record.head = require("h").get<int>();
    record.tail = require("t").get<int>();
    seg.path.kind = path_kind_from_string(require("kind").get<std::string>());
    seg.path.sentences = require("sentences").get<std::vector<int>>();
    seg.path.bridges = require("bridges").get<std::vector<int>>();
    seg.tokens = require("tokens").get<std::vector<std::string>>();
    seg.head_spans = parse_span_list(require("head_spans"), where + ".head_spans");
    seg.tail_spans = parse_span_list(require("tail_spans"), where + ".tail_spans");
    seg.sentence_boundaries = require("sentence_boundaries").get<std::vector<int>>();
    record.relations = require("relations").get<std::vector<std::string>>();
    records.push_back(std::move(record));
  }
  return records;
}

const std::vector<double>& VectorTable::lookup(const std::string& token) const {
  auto it = vectors.find(token);
  return it != vectors.end() ? it->second : fallback;
}

VectorTable VectorTable::parse(const std::string& bytes) {
  VectorTable table;
  std::istringstream in(bytes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> vec;
    double v;
    while (fields >> v) vec.push_back(v);
    if (token.empty() || vec.empty() || !fields.eof()) {
      throw ParseError("vectors line " + std::to_string(line_no) +
                       ": expected \"token v1 ... vd\"");
    }
    if (table.dimension == 0) {
      table.dimension = static_cast<int>(vec.size());
    } else if (static_cast<int>(vec.size()) != table.dimension) {
      throw ParseError("vectors line " + std::to_string(line_no) + ": dimension " +
                       std::to_string(vec.size()) + " does not match " +
                       std::to_string(table.dimension));
    }
    table.vectors[token] = std::move(vec);
  }
  if (table.dimension == 0) {
    throw ParseError("vectors file is empty");
  }
  table.fallback.assign(table.dimension, 0.0);
  return table;
}

VectorTable VectorTable::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw ArgumentError("unknown activation: \"" + s + "\" (expected relu, tanh or sigmoid)");
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "unknown";
}

MLPWeights MLPWeights::parse(const std::string& json_bytes) {
  json root;
  try {
    root = json::parse(json_bytes);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed weights JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  auto require = [&](const char* key) -> const json& {
    auto it = root.find(key);
    if (it == root.end()) throw SchemaError(std::string("weights: missing key \"") + key + "\"");
    return *it;
  };
  MLPWeights w;
  w.input_dim = require("input_dim").get<int>();
  w.hidden_dim = require("hidden_dim").get<int>();
  w.output_dim = require("output_dim").get<int>();
  if (w.input_dim <= 0 || w.hidden_dim <= 0 || w.output_dim <= 0) {
    throw SchemaError("weights: dimensions must be positive");
  }
  if (root.contains("activation")) {
    w.activation = activation_from_string(root["activation"].get<std::string>());
  }
  w.labels = require("labels").get<std::vector<std::string>>();
  if (static_cast<int>(w.labels.size()) != w.output_dim) {
    throw SchemaError("weights: labels length " + std::to_string(w.labels.size()) +
                      " does not match output_dim " + std::to_string(w.output_dim));
  }
  w.w1 = parse_matrix(require("w1"), w.hidden_dim, w.input_dim, "weights.w1");
  w.b1 = parse_double_vector(require("b1"), "weights.b1");
  if (static_cast<int>(w.b1.size()) != w.hidden_dim) {
    throw SchemaError("weights.b1: expected length " + std::to_string(w.hidden_dim));
  }
  w.w2 = parse_matrix(require("w2"), w.output_dim, w.hidden_dim, "weights.w2");
  w.b2 = parse_double_vector(require("b2"), "weights.b2");
  if (static_cast<int>(w.b2.size()) != w.output_dim) {
    throw SchemaError("weights.b2: expected length " + std::to_string(w.output_dim));
  }
  return w;
}

MLPWeights MLPWeights::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::vector<double> mention_rep(const std::vector<std::vector<double>>& context, int s, int t) {
  const int n = static_cast<int>(context.size());
  if (s < 0 || s > t || t >= n) {
    throw ArgumentError("mention span [" + std::to_string(s) + ", " + std::to_string(t) +
                        "] out of range for " + std::to_string(n) + " context vectors");
  }
  const std::size_t dim = context[s].size();
  std::vector<double> out(dim, 0.0);
  for (int j = s; j <= t; ++j) {
    if (context[j].size() != dim) {
      throw ArgumentError("context vectors have inconsistent dimensions");
    }
    for (std::size_t d = 0; d < dim; ++d) {
      out[d] += context[j][d];
    }
  }
  const double inv = 1.0 / static_cast<double>(t - s + 1);
  for (double& v : out) v *= inv;
  return out;
}

std::vector<double> entity_rep(const std::vector<std::vector<double>>& mention_reps) {
  if (mention_reps.empty()) {
    throw ArgumentError("entity has no mention representations");
  }
  const std::size_t dim = mention_reps.front().size();
  std::vector<double> out(dim, 0.0);
  for (const auto& rep : mention_reps) {
    if (rep.size() != dim) {
      throw ArgumentError("mention representations have inconsistent dimensions");
    }
    for (std::size_t d = 0; d < dim; ++d) {
      out[d] += rep[d];
    }
  }
  const double inv = 1.0 / static_cast<double>(mention_reps.size());
  for (double& v : out) v *= inv;
  return out;
}

std::vector<double> pair_features(const std::vector<double>& e_i, const std::vector<double>& e_j) {
  if (e_i.size() != e_j.size()) {
    throw ArgumentError("entity representations have different dimensions");
  }
  const std::size_t d = e_i.size();
  std::vector<double> out;
  out.reserve(4 * d);
  out.insert(out.end(), e_i.begin(), e_i.end());
  out.insert(out.end(), e_j.begin(), e_j.end());
  for (std::size_t k = 0; k < d; ++k) out.push_back(std::abs(e_i[k] - e_j[k]));
  for (std::size_t k = 0; k < d; ++k) out.push_back(e_i[k] * e_j[k]);
  return out;
}

PathScores mlp_score(const std::vector<double>& features, const MLPWeights& weights) {
  if (static_cast<int>(features.size()) != weights.input_dim) {
    throw ArgumentError("feature length " + std::to_string(features.size()) +
                        " does not match weights input_dim " + std::to_string(weights.input_dim));
  }
  std::vector<double> hidden(weights.hidden_dim);
  for (int h = 0; h < weights.hidden_dim; ++h) {
    double z = weights.b1[h];
    const double* row = weights.w1.data() + static_cast<std::size_t>(h) * weights.input_dim;
    for (int i = 0; i < weights.input_dim; ++i) {
      z += row[i] * features[i];
    }
    hidden[h] = activate(weights.activation, z);
  }
  PathScores out(weights.output_dim);
  for (int o = 0; o < weights.output_dim; ++o) {
    double z = weights.b2[o];
    const double* row = weights.w2.data() + static_cast<std::size_t>(o) * weights.hidden_dim;
    for (int h = 0; h < weights.hidden_dim; ++h) {
      z += row[h] * hidden[h];
    }
    out[o] = sigmoid(z);
  }
  return out;
}

PathScores aggregate_scores(const std::vector<PathScores>& per_path) {
  if (per_path.empty()) {
    throw ArgumentError("no path scores to aggregate");
  }
  PathScores out = per_path.front();
  for (std::size_t c = 1; c < per_path.size(); ++c) {
    if (per_path[c].size() != out.size()) {
      throw ArgumentError("path score vectors have different lengths");
    }
    for (std::size_t r = 0; r < out.size(); ++r) {
      out[r] = std::max(out[r], per_path[c][r]);
    }
  }
  return out;
}

std::vector<int> predict(const PathScores& scores, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw ArgumentError("threshold must be in [0, 1], got " + std::to_string(threshold));
  }
  std::vector<int> out;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    if (scores[r] > threshold) out.push_back(static_cast<int>(r));
  }
  return out;
}

std::vector<std::vector<double>> EmbeddingLookupEncoder::encode(
    const std::vector<std::string>& tokens) const {
  std::vector<std::vector<double>> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    out.push_back(table_->lookup(token));
  }
  return out;
}

PathScores score_pair(const Document& doc, const OccurrenceIndex& index,
                      int head, int tail, const RuleConfig& config,
                      const Encoder& encoder, const MLPWeights& weights) {
  if (weights.input_dim != 4 * encoder.dimension()) {
    throw ArgumentError("weights input_dim " + std::to_string(weights.input_dim) +
                        " does not match 4 x encoder dimension (" +
                        std::to_string(4 * encoder.dimension()) + ")");
  }
  const PathSet paths = extract_paths(doc, index, head, tail, config);
  if (paths.paths.empty()) {
    // No-path pairs predict nothing.
    return PathScores(weights.output_dim, 0.0);
  }
  std::vector<PathScores> per_path;
  per_path.reserve(paths.paths.size());
  for (const Path& p : paths.paths) {
    const Segment seg = build_segment(doc, p, head, tail);
    const std::vector<std::vector<double>> context = encoder.encode(seg.tokens);
    auto pool = [&](const std::vector<std::pair<int, int>>& spans) {
      std::vector<std::vector<double>> reps;
      reps.reserve(spans.size());
      for (const auto& [s, e] : spans) {
        reps.push_back(mention_rep(context, s, e - 1));
      }
      return entity_rep(reps);
    };
    const std::vector<double> features = pair_features(pool(seg.head_spans), pool(seg.tail_spans));
    per_path.push_back(mlp_score(features, weights));
  }
  return aggregate_scores(per_path);
}

namespace {

std::vector<ScoredPair> score_doc(const Document& doc, const RuleConfig& config,
                                  const Encoder& encoder, const MLPWeights& weights) {
  const OccurrenceIndex index = OccurrenceIndex::build(doc);
  const int n_ent = static_cast<int>(doc.entities.size());
  std::vector<ScoredPair> out;
  out.reserve(static_cast<std::size_t>(n_ent) * (n_ent > 0 ? n_ent - 1 : 0));
  for (int h = 0; h < n_ent; ++h) {
    for (int t = 0; t < n_ent; ++t) {
      if (h == t) continue;
      out.push_back({doc.doc_id, h, t, score_pair(doc, index, h, t, config, encoder, weights)});
    }
  }
  return out;
}

}  // namespace

std::vector<ScoredPair> score_corpus_serial(std::span<const Document> corpus,
                                            const RuleConfig& config,
                                            const Encoder& encoder,
                                            const MLPWeights& weights) {
  std::vector<ScoredPair> out;
  for (const Document& doc : corpus) {
    std::vector<ScoredPair> scored = score_doc(doc, config, encoder, weights);
    out.insert(out.end(), std::make_move_iterator(scored.begin()),
               std::make_move_iterator(scored.end()));
  }
  return out;
}

std::vector<ScoredPair> score_corpus(std::span<const Document> corpus,
                                     const RuleConfig& config,
                                     const Encoder& encoder,
                                     const MLPWeights& weights,
                                     int jobs) {
  const int workers = resolve_jobs(jobs);
  std::vector<std::vector<ScoredPair>> per_doc(corpus.size());
  std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
  for (std::int64_t d = 0; d < static_cast<std::int64_t>(corpus.size()); ++d) {
    try {
      per_doc[d] = score_doc(corpus[d], config, encoder, weights);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  (void)workers;
  if (failure) std::rethrow_exception(failure);
  std::vector<ScoredPair> out;
  for (std::vector<ScoredPair>& scored : per_doc) {
    out.insert(out.end(), std::make_move_iterator(scored.begin()),
               std::make_move_iterator(scored.end()));
  }
  return out;
}

std::vector<PredictionRow> threshold_predictions(std::span<const ScoredPair> scored,
                                                 const std::vector<std::string>& labels,
                                                 double threshold) {
  std::vector<PredictionRow> rows;
  for (const ScoredPair& pair : scored) {
    if (pair.scores.size() != labels.size()) {
      throw ArgumentError("score vector length does not match label list");
    }
    for (int r : predict(pair.scores, threshold)) {
      rows.push_back({pair.doc_id, pair.head, pair.tail, labels[r], pair.scores[r]});
    }
  }
  return rows;
}

std::string dump_predictions_jsonl(std::span<const PredictionRow> rows) {
  std::ostringstream out;
  for (const PredictionRow& row : rows) {
    json jr;
    jr["doc_id"] = row.doc_id;
    jr["h"] = row.head;
    jr["t"] = row.tail;
    jr["r"] = row.relation;
    jr["score"] = row.score;
    out << jr.dump() << '\n';
  }
  return out.str();
}

std::vector<PredictionRow> parse_predictions_jsonl(const std::string& bytes) {
  std::vector<PredictionRow> rows;
  std::istringstream in(bytes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "predictions line " + std::to_string(line_no);
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + ": malformed JSON: " + e.what());
    }
    auto require = [&](const char* key) -> const json& {
      auto it = row.find(key);
      if (it == row.end()) throw SchemaError(where + ": missing key \"" + key + "\"");
      return *it;
    };
    PredictionRow pr;
    pr.doc_id = require("doc_id").get<std::string>();
    pr.head = require("h").get<int>();
    pr.tail = require("t").get<int>();
    pr.relation = require("r").get<std::string>();
    pr.score = row.contains("score") ? row["score"].get<double>() : 0.0;
    rows.push_back(std::move(pr));
  }
  return rows;
}

std::set<RelationTuple> gold_tuples(std::span<const Document> corpus) {
  std::set<RelationTuple> out;
  for (const Document& doc : corpus) {
    for (const RelationInstance& inst : doc.instances) {
      out.insert({doc.doc_id, inst.head, inst.tail, inst.relation});
    }
  }
  return out;
}

std::map<PairKey, bool> build_locality(std::span<const Document> corpus) {
  std::map<PairKey, bool> out;
  for (const Document& doc : corpus) {
    const OccurrenceIndex index = OccurrenceIndex::build(doc);
    const int n_ent = static_cast<int>(doc.entities.size());
    for (int h = 0; h < n_ent; ++h) {
      for (int t = 0; t < n_ent; ++t) {
        if (h == t) continue;
        out[{doc.doc_id, h, t}] = !index.co_occurrences(h, t).empty();
      }
    }
  }
  return out;
}

namespace {

Prf micro_prf(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  Prf prf;
  prf.tp = tp;
  prf.fp = fp;
  prf.fn = fn;
  prf.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  prf.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  const double denom = prf.precision + prf.recall;
  prf.f1 = denom > 0.0 ? 2.0 * prf.precision * prf.recall / denom : 0.0;
  return prf;
}

}  // namespace

EvalResult evaluate_f1(const std::set<RelationTuple>& predictions,
                       const std::set<RelationTuple>& gold,
                       const std::map<PairKey, bool>& locality) {
  if (gold.empty()) {
    throw ArgumentError("gold set is empty: recall is undefined");
  }
  auto pair_is_intra = [&](const RelationTuple& tuple) {
    const PairKey key{std::get<0>(tuple), std::get<1>(tuple), std::get<2>(tuple)};
    auto it = locality.find(key);
    if (it == locality.end()) {
      throw ValidationError("tuple references unknown pair: doc \"" + std::get<0>(tuple) +
                            "\" h=" + std::to_string(std::get<1>(tuple)) +
                            " t=" + std::to_string(std::get<2>(tuple)));
    }
    return it->second;
  };

  std::int64_t tp = 0, fp = 0, fn = 0;
  std::int64_t tp_intra = 0, fp_intra = 0, fn_intra = 0;
  std::int64_t tp_inter = 0, fp_inter = 0, fn_inter = 0;
  for (const RelationTuple& pred : predictions) {
    const bool intra = pair_is_intra(pred);
    if (gold.count(pred)) {
      ++tp;
      ++(intra ? tp_intra : tp_inter);
    } else {
      ++fp;
      ++(intra ? fp_intra : fp_inter);
    }
  }
  for (const RelationTuple& g : gold) {
    if (!predictions.count(g)) {
      ++fn;
      ++(pair_is_intra(g) ? fn_intra : fn_inter);
    }
  }

  EvalResult result;
  result.overall = micro_prf(tp, fp, fn);
  result.intra = micro_prf(tp_intra, fp_intra, fn_intra);
  result.inter = micro_prf(tp_inter, fp_inter, fn_inter);
  return result;
}

double fit_threshold(std::span<const ScoredPair> scored,
                     const std::vector<std::string>& labels,
                     const std::set<RelationTuple>& gold) {
  if (gold.empty()) {
    throw ArgumentError("gold set is empty: cannot fit a threshold");
  }
  // Candidate = (score, is_gold) for every scored (pair, relation). Zero
  // scores can never be predicted at a threshold in [0, 1], so they are
  // skipped; their gold tuples still count as misses via |gold|.
  std::vector<std::pair<double, bool>> candidates;
  for (const ScoredPair& pair : scored) {
    if (pair.scores.size() != labels.size()) {
      throw ArgumentError("score vector length does not match label list");
    }
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (pair.scores[r] <= 0.0) continue;
      const bool is_gold = gold.count({pair.doc_id, pair.head, pair.tail, labels[r]}) > 0;
      candidates.emplace_back(pair.scores[r], is_gold);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const double n_gold = static_cast<double>(gold.size());
  double best_f1 = 0.0;  // empty prediction set scores F1 = 0
  double best_threshold = 1.0;
  std::int64_t tp = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k].second) ++tp;
    // Only cut between distinct score values; `score > threshold` cannot
    // separate ties.
    if (k + 1 < candidates.size() && candidates[k + 1].first == candidates[k].first) continue;
    const double f1 = 2.0 * static_cast<double>(tp) / (static_cast<double>(k + 1) + n_gold);
    if (f1 > best_f1) {
      best_f1 = f1;
      const double next = k + 1 < candidates.size() ? candidates[k + 1].first : 0.0;
      best_threshold = (candidates[k].first + next) / 2.0;
    }
  }
  return best_threshold;
}

}  // namespace evipath
