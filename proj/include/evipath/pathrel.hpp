#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "evipath/corpus.hpp"
#include "evipath/pathfinder.hpp"

namespace evipath {

// The concatenation of a path's sentences in original document order, with
// head/tail mention spans remapped to segment token offsets (half-open).
// Mentions outside the path's sentences are dropped.
struct Segment {
  std::string doc_id;
  Path path;
  std::vector<std::string> tokens;
  std::vector<std::pair<int, int>> head_spans;
  std::vector<std::pair<int, int>> tail_spans;
  std::vector<int> sentence_boundaries;  // segment offset of each path sentence

  bool operator==(const Segment&) const = default;
};

Segment build_segment(const Document& doc, const Path& path, int head, int tail);

// A segment plus the gold relation labels of its entity pair; the exchange
// format for external trainers.
struct SegmentRecord {
  Segment segment;
  int head = 0;
  int tail = 0;
  std::vector<std::string> relations;  // sorted, unique

  bool operator==(const SegmentRecord&) const = default;
};

// One record per (labeled entity pair, path), in corpus order.
std::vector<SegmentRecord> export_segments(const Document& doc, const RuleConfig& config = {});
std::string dump_segments_jsonl(std::span<const SegmentRecord> records);
std::vector<SegmentRecord> parse_segments_jsonl(const std::string& bytes);

// Token -> vector lookup ("token v1 ... vd" per line). Unknown tokens map to
// the fallback vector (zeros unless replaced).
struct VectorTable {
  int dimension = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
  std::vector<double> fallback;

  const std::vector<double>& lookup(const std::string& token) const;

  static VectorTable parse(const std::string& bytes);
  static VectorTable load_file(const std::string& path);
};

enum class Activation { Relu, Tanh, Sigmoid };

Activation activation_from_string(const std::string& s);
const char* to_string(Activation a);

// Two-layer perceptron weights: layer 1 is hidden_dim x input_dim, layer 2 is
// output_dim x hidden_dim, both row-major. `labels` names the relation for
// each output coordinate.
struct MLPWeights {
  int input_dim = 0;
  int hidden_dim = 0;
  int output_dim = 0;
  Activation activation = Activation::Relu;
  std::vector<std::string> labels;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;

  static MLPWeights parse(const std::string& json_bytes);
  static MLPWeights load_file(const std::string& path);
};

// Per-relation probabilities, each in [0, 1].
using PathScores = std::vector<double>;

// Mean of context vectors over the inclusive token span [s, t].
std::vector<double> mention_rep(const std::vector<std::vector<double>>& context, int s, int t);

// Mean of mention representations; errors on an empty list.
std::vector<double> entity_rep(const std::vector<std::vector<double>>& mention_reps);

// [e_i; e_j; |e_i - e_j|; e_i * e_j], length 4 * d_e.
std::vector<double> pair_features(const std::vector<double>& e_i, const std::vector<double>& e_j);

// Sigmoid over the two-layer perceptron output; every entry lands in (0, 1).
PathScores mlp_score(const std::vector<double>& features, const MLPWeights& weights);

// Elementwise maximum across paths.
PathScores aggregate_scores(const std::vector<PathScores>& per_path);

// Indices of relations with score strictly above the threshold.
std::vector<int> predict(const PathScores& scores, double threshold);

// Source of per-token context vectors for a segment.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual int dimension() const = 0;
  virtual std::vector<std::vector<double>> encode(const std::vector<std::string>& tokens) const = 0;
};

// Reference encoder: a pure per-token embedding lookup.
class EmbeddingLookupEncoder final : public Encoder {
 public:
  explicit EmbeddingLookupEncoder(const VectorTable& table) : table_(&table) {}
  int dimension() const override { return table_->dimension; }
  std::vector<std::vector<double>> encode(const std::vector<std::string>& tokens) const override;

 private:
  const VectorTable* table_;
};

// Scores one entity pair: per-path probabilities combined by elementwise max.
// Entity representations average the mentions inside the path only. Pairs
// with no extracted paths score all-zero.
PathScores score_pair(const Document& doc, const OccurrenceIndex& index,
                      int head, int tail, const RuleConfig& config,
                      const Encoder& encoder, const MLPWeights& weights);

struct ScoredPair {
  std::string doc_id;
  int head = 0;
  int tail = 0;
  PathScores scores;

  bool operator==(const ScoredPair&) const = default;
};

// Scores every ordered entity pair (head != tail) of every document.
std::vector<ScoredPair> score_corpus_serial(std::span<const Document> corpus,
                                            const RuleConfig& config,
                                            const Encoder& encoder,
                                            const MLPWeights& weights);
std::vector<ScoredPair> score_corpus(std::span<const Document> corpus,
                                     const RuleConfig& config,
                                     const Encoder& encoder,
                                     const MLPWeights& weights,
                                     int jobs = 0);

struct PredictionRow {
  std::string doc_id;
  int head = 0;
  int tail = 0;
  std::string relation;
  double score = 0.0;

  bool operator==(const PredictionRow&) const = default;
};

std::vector<PredictionRow> threshold_predictions(std::span<const ScoredPair> scored,
                                                 const std::vector<std::string>& labels,
                                                 double threshold);
std::string dump_predictions_jsonl(std::span<const PredictionRow> rows);
std::vector<PredictionRow> parse_predictions_jsonl(const std::string& bytes);

// (doc_id, head, tail, relation) tuples.
using RelationTuple = std::tuple<std::string, int, int, std::string>;
using PairKey = std::tuple<std::string, int, int>;

std::set<RelationTuple> gold_tuples(std::span<const Document> corpus);

// True for pairs some single sentence mentions both entities of.
std::map<PairKey, bool> build_locality(std::span<const Document> corpus);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

struct EvalResult {
  Prf overall;
  Prf intra;
  Prf inter;
};

// Micro precision/recall/F1 over (doc, h, t, r) tuples, overall and split by
// pair locality. Errors when gold is empty (recall undefined).
EvalResult evaluate_f1(const std::set<RelationTuple>& predictions,
                       const std::set<RelationTuple>& gold,
                       const std::map<PairKey, bool>& locality);

// Picks the global threshold maximizing overall micro-F1 on the given gold
// set, preferring the larger threshold on ties.
double fit_threshold(std::span<const ScoredPair> scored,
                     const std::vector<std::string>& labels,
                     const std::set<RelationTuple>& gold);

}  // namespace evipath
