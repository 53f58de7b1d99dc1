#pragma once

#include <span>
#include <string>
#include <vector>

namespace evipath {

// One occurrence of an entity in a sentence. Token offsets are half-open
// [start, end) within the owning sentence, matching the DocRED `pos` field.
struct Mention {
  int sentence_index = 0;
  int start = 0;
  int end = 0;
  std::string surface;
  std::string type_tag;

  bool operator==(const Mention&) const = default;
};

// An entity cluster; the entity index is its position in Document::entities.
// Duplicate mentions from the source file are kept as-is.
struct Entity {
  std::vector<Mention> mentions;  // never empty in a valid document

  bool operator==(const Entity&) const = default;
};

// A gold (head, tail, relation) triple with its annotated evidence sentences.
struct RelationInstance {
  int head = 0;
  int tail = 0;
  std::string relation;
  std::vector<int> evidence;  // sorted, unique; may be empty

  bool operator==(const RelationInstance&) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::vector<std::string>> sentences;
  std::vector<Entity> entities;
  std::vector<RelationInstance> instances;

  bool operator==(const Document&) const = default;
};

// Entity/sentence co-occurrence maps derived purely from mentions.
// Immutable once built; safe to share read-only across threads.
struct OccurrenceIndex {
  std::vector<std::vector<int>> entity_sentences;   // entity -> sorted sentences
  std::vector<std::vector<int>> sentence_entities;  // sentence -> sorted entities

  static OccurrenceIndex build(const Document& doc);

  const std::vector<int>& sentences_of(int entity) const;
  const std::vector<int>& entities_in(int sentence) const;
  // Sentences mentioning both entities, ascending.
  std::vector<int> co_occurrences(int a, int b) const;
};

// Parses a DocRED-format JSON array (objects with title/sents/vertexSet/labels)
// and validates every document invariant. Unknown extra keys are ignored.
std::vector<Document> parse_docred(const std::string& bytes);

// Canonical JSON dump of the same schema plus an explicit doc_id field.
// parse_docred(dump_docred(docs)) reproduces the documents exactly.
std::string dump_docred(std::span<const Document> docs);

// Throws ValidationError naming the document, entity/mention or label index,
// and the violated rule.
void validate_document(const Document& doc);

std::vector<Document> load_docred_file(const std::string& path);

}  // namespace evipath
