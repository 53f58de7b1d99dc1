#include "evipath/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "evipath/errors.hpp"

namespace evipath {

using nlohmann::json;

namespace {

std::string doc_label(std::size_t position, const json& jdoc) {
  std::ostringstream out;
  out << "doc[" << position << "]";
  if (jdoc.is_object()) {
    auto it = jdoc.find("title");
    if (it != jdoc.end() && it->is_string()) {
      out << " (\"" << it->get<std::string>() << "\")";
    }
  }
  return out.str();
}

const json& require_key(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) {
    throw SchemaError(where + ": expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(where + ": missing key \"" + key + "\"");
  }
  return *it;
}

int require_int(const json& value, const std::string& where) {
  if (!value.is_number_integer()) {
    throw SchemaError(where + ": expected an integer");
  }
  return value.get<int>();
}

std::string require_string(const json& value, const std::string& where) {
  if (!value.is_string()) {
    throw SchemaError(where + ": expected a string");
  }
  return value.get<std::string>();
}

const json& require_array(const json& value, const std::string& where) {
  if (!value.is_array()) {
    throw SchemaError(where + ": expected an array");
  }
  return value;
}

Mention parse_mention(const json& jm, const std::string& where) {
  Mention m;
  m.surface = require_string(require_key(jm, "name", where), where + ".name");
  m.sentence_index = require_int(require_key(jm, "sent_id", where), where + ".sent_id");
  m.type_tag = require_string(require_key(jm, "type", where), where + ".type");
  const json& pos = require_array(require_key(jm, "pos", where), where + ".pos");
  if (pos.size() != 2) {
    throw SchemaError(where + ".pos: expected [start, end]");
  }
  m.start = require_int(pos[0], where + ".pos[0]");
  m.end = require_int(pos[1], where + ".pos[1]");
  return m;
}

Document parse_document(const json& jdoc, std::size_t position) {
  const std::string where = doc_label(position, jdoc);
  Document doc;
  doc.doc_id = require_string(require_key(jdoc, "title", where), where + ".title");

  const json& sents = require_array(require_key(jdoc, "sents", where), where + ".sents");
  for (std::size_t s = 0; s < sents.size(); ++s) {
    const std::string sw = where + ".sents[" + std::to_string(s) + "]";
    const json& jsent = require_array(sents[s], sw);
    std::vector<std::string> tokens;
    tokens.reserve(jsent.size());
    for (std::size_t t = 0; t < jsent.size(); ++t) {
      tokens.push_back(require_string(jsent[t], sw + "[" + std::to_string(t) + "]"));
    }
    doc.sentences.push_back(std::move(tokens));
  }

  const json& vertex_set = require_array(require_key(jdoc, "vertexSet", where), where + ".vertexSet");
  for (std::size_t e = 0; e < vertex_set.size(); ++e) {
    const std::string ew = where + ".vertexSet[" + std::to_string(e) + "]";
    const json& jent = require_array(vertex_set[e], ew);
    Entity entity;
    for (std::size_t m = 0; m < jent.size(); ++m) {
      entity.mentions.push_back(parse_mention(jent[m], ew + "[" + std::to_string(m) + "]"));
    }
    doc.entities.push_back(std::move(entity));
  }

  const json& labels = require_array(require_key(jdoc, "labels", where), where + ".labels");
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const std::string lw = where + ".labels[" + std::to_string(k) + "]";
    const json& jl = labels[k];
    RelationInstance inst;
    inst.head = require_int(require_key(jl, "h", lw), lw + ".h");
    inst.tail = require_int(require_key(jl, "t", lw), lw + ".t");
    inst.relation = require_string(require_key(jl, "r", lw), lw + ".r");
    const json& ev = require_array(require_key(jl, "evidence", lw), lw + ".evidence");
    for (std::size_t i = 0; i < ev.size(); ++i) {
      inst.evidence.push_back(require_int(ev[i], lw + ".evidence[" + std::to_string(i) + "]"));
    }
    std::sort(inst.evidence.begin(), inst.evidence.end());
    inst.evidence.erase(std::unique(inst.evidence.begin(), inst.evidence.end()), inst.evidence.end());
    doc.instances.push_back(std::move(inst));
  }

  return doc;
}

}  // namespace

void validate_document(const Document& doc) {
  const std::string who = "doc \"" + doc.doc_id + "\"";
  const int n_sent = static_cast<int>(doc.sentences.size());
  const int n_ent = static_cast<int>(doc.entities.size());

  if (doc.sentences.empty()) {
    throw ValidationError(who + ": document has no sentences");
  }
  for (int s = 0; s < n_sent; ++s) {
    if (doc.sentences[s].empty()) {
      throw ValidationError(who + ": sentence " + std::to_string(s) + " is empty");
    }
  }

  for (int e = 0; e < n_ent; ++e) {
    const Entity& entity = doc.entities[e];
    const std::string ew = who + ": entity " + std::to_string(e);
    if (entity.mentions.empty()) {
      throw ValidationError(ew + ": mentions is empty");
    }
    for (std::size_t m = 0; m < entity.mentions.size(); ++m) {
      const Mention& men = entity.mentions[m];
      const std::string mw = ew + " mention " + std::to_string(m);
      if (men.sentence_index < 0 || men.sentence_index >= n_sent) {
        throw ValidationError(mw + ": sentence index " + std::to_string(men.sentence_index) +
                              " out of range (document has " + std::to_string(n_sent) + " sentences)");
      }
      const int len = static_cast<int>(doc.sentences[men.sentence_index].size());
      if (men.start < 0 || men.start >= men.end || men.end > len) {
        throw ValidationError(mw + ": span out of range ([" + std::to_string(men.start) + ", " +
                              std::to_string(men.end) + ") in a sentence of " + std::to_string(len) +
                              " tokens)");
      }
    }
  }

  for (std::size_t k = 0; k < doc.instances.size(); ++k) {
    const RelationInstance& inst = doc.instances[k];
    const std::string lw = who + ": label " + std::to_string(k);
    if (inst.head < 0 || inst.head >= n_ent) {
      throw ValidationError(lw + ": head index " + std::to_string(inst.head) +
                            " out of range (document has " + std::to_string(n_ent) + " entities)");
    }
    if (inst.tail < 0 || inst.tail >= n_ent) {
      throw ValidationError(lw + ": tail index " + std::to_string(inst.tail) +
                            " out of range (document has " + std::to_string(n_ent) + " entities)");
    }
    if (inst.head == inst.tail) {
      throw ValidationError(lw + ": head and tail are the same entity (" + std::to_string(inst.head) + ")");
    }
    for (int ev : inst.evidence) {
      if (ev < 0 || ev >= n_sent) {
        throw ValidationError(lw + ": evidence index " + std::to_string(ev) +
                              " out of range (document has " + std::to_string(n_sent) + " sentences)");
      }
    }
  }
}

std::vector<Document> parse_docred(const std::string& bytes) {
  json root;
  try {
    root = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_array()) {
    throw SchemaError("top level: expected a JSON array of documents");
  }
  std::vector<Document> docs;
  docs.reserve(root.size());
  for (std::size_t i = 0; i < root.size(); ++i) {
    Document doc = parse_document(root[i], i);
    validate_document(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string dump_docred(std::span<const Document> docs) {
  json root = json::array();
  for (const Document& doc : docs) {
    json jd;
    jd["doc_id"] = doc.doc_id;
    jd["title"] = doc.doc_id;
    json sents = json::array();
    for (const auto& sent : doc.sentences) {
      sents.push_back(sent);
    }
    jd["sents"] = std::move(sents);
    json vertex_set = json::array();
    for (const Entity& entity : doc.entities) {
      json jent = json::array();
      for (const Mention& m : entity.mentions) {
        json jm;
        jm["name"] = m.surface;
        jm["sent_id"] = m.sentence_index;
        jm["pos"] = {m.start, m.end};
        jm["type"] = m.type_tag;
        jent.push_back(std::move(jm));
      }
      vertex_set.push_back(std::move(jent));
    }
    jd["vertexSet"] = std::move(vertex_set);
    json labels = json::array();
    for (const RelationInstance& inst : doc.instances) {
      json jl;
      jl["h"] = inst.head;
      jl["t"] = inst.tail;
      jl["r"] = inst.relation;
      jl["evidence"] = inst.evidence;
      labels.push_back(std::move(jl));
    }
    jd["labels"] = std::move(labels);
    root.push_back(std::move(jd));
  }
  return root.dump(2) + "\n";
}

std::vector<Document> load_docred_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_docred(buffer.str());
}

OccurrenceIndex OccurrenceIndex::build(const Document& doc) {
  OccurrenceIndex index;
  index.entity_sentences.resize(doc.entities.size());
  index.sentence_entities.resize(doc.sentences.size());
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    auto& sents = index.entity_sentences[e];
    for (const Mention& m : doc.entities[e].mentions) {
      sents.push_back(m.sentence_index);
    }
    std::sort(sents.begin(), sents.end());
    sents.erase(std::unique(sents.begin(), sents.end()), sents.end());
    for (int s : sents) {
      index.sentence_entities[s].push_back(static_cast<int>(e));
    }
  }
  // Entities were appended in ascending order, so each sentence list is
  // already sorted and unique.
  return index;
}

const std::vector<int>& OccurrenceIndex::sentences_of(int entity) const {
  if (entity < 0 || entity >= static_cast<int>(entity_sentences.size())) {
    throw ArgumentError("entity index " + std::to_string(entity) + " out of range");
  }
  return entity_sentences[entity];
}

const std::vector<int>& OccurrenceIndex::entities_in(int sentence) const {
  if (sentence < 0 || sentence >= static_cast<int>(sentence_entities.size())) {
    throw ArgumentError("sentence index " + std::to_string(sentence) + " out of range");
  }
  return sentence_entities[sentence];
}

std::vector<int> OccurrenceIndex::co_occurrences(int a, int b) const {
  const std::vector<int>& sa = sentences_of(a);
  const std::vector<int>& sb = sentences_of(b);
  std::vector<int> out;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
  return out;
}

}  // namespace evipath
