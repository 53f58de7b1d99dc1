#include "evipath/pathfinder.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>

#include "json.hpp"

#include "evipath/errors.hpp"

namespace evipath {

namespace {

int kind_rank(PathKind kind) {
  switch (kind) {
    case PathKind::Consecutive: return 0;
    case PathKind::MultiHop: return 1;
    case PathKind::Default: return 2;
  }
  return 3;
}

bool path_less(const Path& a, const Path& b) {
  if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
  return a.sentences < b.sentences;
}

void check_pair(const Document& doc, int head, int tail) {
  const int n = static_cast<int>(doc.entities.size());
  if (head < 0 || head >= n) {
    throw ArgumentError("head entity index " + std::to_string(head) + " out of range (document has " +
                        std::to_string(n) + " entities)");
  }
  if (tail < 0 || tail >= n) {
    throw ArgumentError("tail entity index " + std::to_string(tail) + " out of range (document has " +
                        std::to_string(n) + " entities)");
  }
  if (head == tail) {
    throw ArgumentError("head and tail must be different entities (both " + std::to_string(head) + ")");
  }
}

std::vector<int> contiguous_range(int lo, int hi) {
  std::vector<int> out(static_cast<std::size_t>(hi - lo + 1));
  std::iota(out.begin(), out.end(), lo);
  return out;
}

std::vector<int> sentence_set(std::initializer_list<int> sentences) {
  std::vector<int> out(sentences);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

const char* to_string(PathKind kind) {
  switch (kind) {
    case PathKind::Consecutive: return "consecutive";
    case PathKind::MultiHop: return "multihop";
    case PathKind::Default: return "default";
  }
  return "unknown";
}

PathKind path_kind_from_string(const std::string& s) {
  if (s == "consecutive") return PathKind::Consecutive;
  if (s == "multihop") return PathKind::MultiHop;
  if (s == "default") return PathKind::Default;
  throw ArgumentError("unknown path kind: \"" + s + "\"");
}

std::string RuleConfig::label() const {
  std::string out;
  if (consecutive) out = "C";
  if (multihop) out += out.empty() ? "M" : "+M";
  if (default_fallback) out += out.empty() ? "D" : "+D";
  return out.empty() ? "none" : out;
}

RuleConfig RuleConfig::from_rules(const std::string& rules) {
  RuleConfig config;
  config.consecutive = false;
  config.multihop = false;
  config.default_fallback = false;
  if (rules.empty()) {
    throw ArgumentError("rules string is empty (expected letters from {c, m, d})");
  }
  for (char c : rules) {
    switch (c) {
      case 'c':
        if (config.consecutive) throw ArgumentError("rules string repeats 'c'");
        config.consecutive = true;
        break;
      case 'm':
        if (config.multihop) throw ArgumentError("rules string repeats 'm'");
        config.multihop = true;
        break;
      case 'd':
        if (config.default_fallback) throw ArgumentError("rules string repeats 'd'");
        config.default_fallback = true;
        break;
      default:
        throw ArgumentError(std::string("unknown rule letter '") + c + "' (expected c, m or d)");
    }
  }
  return config;
}

std::vector<Path> consecutive_paths(const Document& doc, const OccurrenceIndex& index,
                                    int head, int tail, int max_gap) {
  check_pair(doc, head, tail);
  if (max_gap < 0) {
    throw ArgumentError("max_gap must be >= 0, got " + std::to_string(max_gap));
  }
  std::vector<Path> out;
  std::set<std::vector<int>> seen;
  for (int i : index.sentences_of(head)) {
    for (int j : index.sentences_of(tail)) {
      if (std::abs(i - j) > max_gap) continue;
      std::vector<int> sents = contiguous_range(std::min(i, j), std::max(i, j));
      if (seen.insert(sents).second) {
        out.push_back({PathKind::Consecutive, std::move(sents), {}});
      }
    }
  }
  std::sort(out.begin(), out.end(), path_less);
  return out;
}

std::vector<Path> multihop_paths(const Document& doc, const OccurrenceIndex& index,
                                 int head, int tail, int max_bridges) {
  check_pair(doc, head, tail);
  if (max_bridges < 1 || max_bridges > 2) {
    throw ArgumentError("max_bridges must be 1 or 2, got " + std::to_string(max_bridges));
  }
  const int n_ent = static_cast<int>(doc.entities.size());
  std::vector<Path> out;
  std::set<std::vector<int>> seen;
  auto emit = [&](std::vector<int> sents, std::vector<int> bridges) {
    if (sents.empty() || sents.size() > 3) return;
    if (seen.insert(sents).second) {
      out.push_back({PathKind::MultiHop, std::move(sents), std::move(bridges)});
    }
  };

  // One bridge: head -(s1)- b -(s2)- tail.
  for (int b = 0; b < n_ent; ++b) {
    if (b == head || b == tail) continue;
    const std::vector<int> hop1 = index.co_occurrences(head, b);
    if (hop1.empty()) continue;
    const std::vector<int> hop2 = index.co_occurrences(b, tail);
    for (int s1 : hop1) {
      for (int s2 : hop2) {
        emit(sentence_set({s1, s2}), {b});
      }
    }
  }

  // Two bridges: head -(s1)- b1 -(s2)- b2 -(s3)- tail.
  if (max_bridges >= 2) {
    for (int b1 = 0; b1 < n_ent; ++b1) {
      if (b1 == head || b1 == tail) continue;
      const std::vector<int> hop1 = index.co_occurrences(head, b1);
      if (hop1.empty()) continue;
      for (int b2 = 0; b2 < n_ent; ++b2) {
        if (b2 == head || b2 == tail || b2 == b1) continue;
        const std::vector<int> hop2 = index.co_occurrences(b1, b2);
        if (hop2.empty()) continue;
        const std::vector<int> hop3 = index.co_occurrences(b2, tail);
        for (int s1 : hop1) {
          for (int s2 : hop2) {
            for (int s3 : hop3) {
              emit(sentence_set({s1, s2, s3}), {b1, b2});
            }
          }
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), path_less);
  return out;
}

std::vector<Path> default_paths(const Document& doc, const OccurrenceIndex& index,
                                int head, int tail) {
  check_pair(doc, head, tail);
  std::vector<Path> out;
  std::set<std::vector<int>> seen;
  for (int i : index.sentences_of(head)) {
    for (int j : index.sentences_of(tail)) {
      if (i == j) continue;
      std::vector<int> sents = sentence_set({i, j});
      if (seen.insert(sents).second) {
        out.push_back({PathKind::Default, std::move(sents), {}});
      }
    }
  }
  std::sort(out.begin(), out.end(), path_less);
  return out;
}

PathSet extract_paths(const Document& doc, const OccurrenceIndex& index,
                      int head, int tail, const RuleConfig& config) {
  check_pair(doc, head, tail);
  std::vector<Path> paths;
  std::set<std::vector<int>> seen;
  if (config.consecutive) {
    for (Path& p : consecutive_paths(doc, index, head, tail, config.max_gap)) {
      seen.insert(p.sentences);
      paths.push_back(std::move(p));
    }
  }
  if (config.multihop) {
    // Cross-kind dedup: a multi-hop candidate whose sentence set already
    // appears as a consecutive path is dropped.
    for (Path& p : multihop_paths(doc, index, head, tail, config.max_bridges)) {
      if (seen.insert(p.sentences).second) {
        paths.push_back(std::move(p));
      }
    }
  }
  if (paths.empty() && config.default_fallback) {
    paths = default_paths(doc, index, head, tail);
  }
  std::sort(paths.begin(), paths.end(), path_less);
  return {head, tail, std::move(paths)};
}

std::vector<Path> consecutive_paths(const Document& doc, int head, int tail, int max_gap) {
  return consecutive_paths(doc, OccurrenceIndex::build(doc), head, tail, max_gap);
}

std::vector<Path> multihop_paths(const Document& doc, int head, int tail, int max_bridges) {
  return multihop_paths(doc, OccurrenceIndex::build(doc), head, tail, max_bridges);
}

std::vector<Path> default_paths(const Document& doc, int head, int tail) {
  return default_paths(doc, OccurrenceIndex::build(doc), head, tail);
}

PathSet extract_paths(const Document& doc, int head, int tail, const RuleConfig& config) {
  return extract_paths(doc, OccurrenceIndex::build(doc), head, tail, config);
}

std::string dump_pathset_json(const Document& doc, const PathSet& set) {
  nlohmann::json out;
  out["doc_id"] = doc.doc_id;
  out["h"] = set.head;
  out["t"] = set.tail;
  nlohmann::json paths = nlohmann::json::array();
  for (const Path& p : set.paths) {
    nlohmann::json jp;
    jp["kind"] = to_string(p.kind);
    jp["sentences"] = p.sentences;
    jp["bridges"] = p.bridges;
    paths.push_back(std::move(jp));
  }
  out["paths"] = std::move(paths);
  return out.dump(2) + "\n";
}

}  // namespace evipath
