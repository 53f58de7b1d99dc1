#pragma once

#include <string>
#include <vector>

#include "evipath/corpus.hpp"

namespace evipath {

enum class PathKind { Consecutive, MultiHop, Default };

const char* to_string(PathKind kind);
PathKind path_kind_from_string(const std::string& s);

// A set of sentences connecting one (head, tail) query. `sentences` is
// strictly ascending; `bridges` is populated for MultiHop paths only and
// lists the intermediate entities of the chain that produced the path.
struct Path {
  PathKind kind = PathKind::Consecutive;
  std::vector<int> sentences;
  std::vector<int> bridges;

  bool operator==(const Path&) const = default;
};

// Deduplicated paths for one entity pair, in canonical order
// (Consecutive < MultiHop < Default, then by sentence list).
struct PathSet {
  int head = 0;
  int tail = 0;
  std::vector<Path> paths;

  bool operator==(const PathSet&) const = default;
};

// Which extraction rules run and their window/chain limits. The defaults are
// the reported configuration: window gap 2 (paths of at most 3 consecutive
// sentences) and at most 2 bridge entities.
struct RuleConfig {
  bool consecutive = true;
  bool multihop = true;
  bool default_fallback = true;
  int max_gap = 2;
  int max_bridges = 2;

  // "C", "M", "C+M", "C+M+D", "D", ... ("none" when nothing is enabled).
  std::string label() const;
  // Parses a compact rules string: any of the letters c, m, d at most once
  // each, e.g. "c", "cm", "cmd". Throws ArgumentError otherwise.
  static RuleConfig from_rules(const std::string& rules);
};

// All contiguous windows [min(i,j), max(i,j)] over sentence pairs where i
// mentions the head, j mentions the tail and |i-j| <= max_gap. The i == j
// case yields the single-sentence (intra-sentence) path.
std::vector<Path> consecutive_paths(const Document& doc, const OccurrenceIndex& index,
                                    int head, int tail, int max_gap = 2);

// All sentence sets realizing a chain head -> b_1 [-> b_2] -> tail where each
// adjacent pair of the chain co-occurs in the chosen hop sentence. Bridges are
// pairwise distinct and never equal to head or tail.
std::vector<Path> multihop_paths(const Document& doc, const OccurrenceIndex& index,
                                 int head, int tail, int max_bridges = 2);

// All 2-sentence sets {S_h, S_t} with S_h mentioning the head, S_t the tail,
// S_h != S_t. Ungated here; extract_paths applies the fallback gate.
std::vector<Path> default_paths(const Document& doc, const OccurrenceIndex& index,
                                int head, int tail);

// Union of the enabled rules, deduplicated across kinds by sentence set with
// Consecutive taking priority over MultiHop. Default paths are used only when
// the union is empty and default_fallback is set.
PathSet extract_paths(const Document& doc, const OccurrenceIndex& index,
                      int head, int tail, const RuleConfig& config = {});

// Convenience overloads building the occurrence index internally.
std::vector<Path> consecutive_paths(const Document& doc, int head, int tail, int max_gap = 2);
std::vector<Path> multihop_paths(const Document& doc, int head, int tail, int max_bridges = 2);
std::vector<Path> default_paths(const Document& doc, int head, int tail);
PathSet extract_paths(const Document& doc, int head, int tail, const RuleConfig& config = {});

// Path dump for one (doc, head, tail): {doc_id, h, t, paths:[{kind, sentences, bridges}]}.
std::string dump_pathset_json(const Document& doc, const PathSet& set);

}  // namespace evipath
