// Copyright 2026 The vrdeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File formats.
//
// Canonical dataset file (one split per file), UTF-8, LF line endings:
//
//   {
//     "name": "...",
//     "labels": ["question", "answer", ...],
//     "relation_labels": ["link"],
//     "provenance": {...},                      <- only when present
//     "documents": [
//       {
//         "id": "...",
//         "width": 762,
//         "height": 1000,
//         "words": [
//           {"text": "DATE:", "box": [10, 20, 58, 32]},
//           ...
//         ],
//         "segments": [
//           {"words": [0, 1], "box": [10, 20, 120, 32]},
//           ...
//         ],
//         "entities": [
//           {"type": "question", "start": 0, "end": 1},
//           ...
//         ],
//         "relations": [
//           {"type": "link", "subject": 0, "object": 1},
//           ...
//         ]
//       }
//     ]
//   }
//
// Key order is fixed as shown. Empty arrays are written "[]". Coordinates
// with an integral value are written as integers, all others in the shortest
// decimal form that reads back to the same double.
//
// Canonical prediction file:
//
//   {
//     "task": "ser",
//     "documents": [
//       {"id": "...", "entities": [{"type": ..., "start": ..., "end": ...}]},
//       {"id": "...", "tags": ["B-question", "I-question", "O"]},
//       {"id": "...", "relations": [{"type": ..., "subject": ..., "object": ...}]}
//     ]
//   }
//
// Within a document record the optional keys appear in the order
// id, entities | tags, relations.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vrdeval/core.hpp"
#include "vrdeval/metrics.hpp"
#include "vrdeval/predictions.hpp"

namespace vrdeval {

// --------------------------------------------------------------------------
// Errors

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public CodecError {
 public:
  using CodecError::CodecError;
};

/// The input is not well-formed JSON.
class SyntaxError : public CodecError {
 public:
  using CodecError::CodecError;
};

/// Well-formed JSON that does not follow the file layout.
class SchemaError : public CodecError {
 public:
  using CodecError::CodecError;
};

/// Layout is fine but the decoded values break model invariants.
class InvariantError : public CodecError {
 public:
  InvariantError(const std::string& what, ValidationReport violations)
      : CodecError(what), violations_(std::move(violations)) {}
  const ValidationReport& violations() const { return violations_; }

 private:
  ValidationReport violations_;
};

// --------------------------------------------------------------------------
// Low-level writing helpers

namespace detail {

inline void write_string(std::string& out, const std::string& s) {
  out += nlohmann::json(s).dump();
}

inline void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite number");
  if (v == std::floor(v) && std::fabs(v) < 9007199254740992.0) {
    out += std::to_string(static_cast<long long>(v));
    return;
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void write_box(std::string& out, const BoundingBox& b) {
  out += '[';
  write_number(out, b.x0);
  out += ", ";
  write_number(out, b.y0);
  out += ", ";
  write_number(out, b.x1);
  out += ", ";
  write_number(out, b.y1);
  out += ']';
}

inline void write_string_list(std::string& out, const std::vector<std::string>& xs) {
  out += '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    write_string(out, xs[i]);
  }
  out += ']';
}

inline void write_entity(std::string& out, const Entity& e) {
  out += "{\"type\": ";
  write_string(out, e.etype);
  out += ", \"start\": " + std::to_string(e.start) + ", \"end\": " + std::to_string(e.end) + "}";
}

inline void write_relation(std::string& out, const RelationTriplet& t) {
  out += "{\"type\": ";
  write_string(out, t.rtype);
  out += ", \"subject\": " + std::to_string(t.subject) +
         ", \"object\": " + std::to_string(t.object) + "}";
}

// Writes `items` one per line at `indent`, or "[]" when empty.
template <typename T, typename Fn>
void write_block(std::string& out, const std::vector<T>& items, const std::string& indent,
                 Fn&& write_one) {
  if (items.empty()) {
    out += "[]";
    return;
  }
  out += "[\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += indent + "  ";
    write_one(out, items[i]);
    out += i + 1 < items.size() ? ",\n" : "\n";
  }
  out += indent + "]";
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << bytes;
  if (!out) throw IoError("write failed for " + path.string());
}

// --------------------------------------------------------------------------
// Canonical dataset

/// Canonical bytes of one split together with the dataset header.
inline std::string serialize_split(const Dataset& ds, const Split& split) {
  using namespace detail;
  std::string out;
  out += "{\n  \"name\": ";
  write_string(out, ds.name);
  out += ",\n  \"labels\": ";
  write_string_list(out, ds.label_set);
  out += ",\n  \"relation_labels\": ";
  write_string_list(out, ds.relation_label_set);
  if (!ds.provenance.empty()) {
    out += ",\n  \"provenance\": ";
    out += nlohmann::ordered_json::parse(ds.provenance).dump();
  }
  out += ",\n  \"documents\": ";
  write_block(out, split.documents, "  ", [](std::string& o, const Document& d) {
    const std::string in = "      ";
    o += "{\n" + in + "\"id\": ";
    write_string(o, d.id);
    o += ",\n" + in + "\"width\": ";
    write_number(o, d.width);
    o += ",\n" + in + "\"height\": ";
    write_number(o, d.height);
    o += ",\n" + in + "\"words\": ";
    write_block(o, d.words, in, [](std::string& w, const Word& word) {
      w += "{\"text\": ";
      write_string(w, word.text);
      w += ", \"box\": ";
      write_box(w, word.box);
      w += "}";
    });
    o += ",\n" + in + "\"segments\": ";
    write_block(o, d.segments, in, [](std::string& w, const Segment& seg) {
      w += "{\"words\": [";
      for (std::size_t i = 0; i < seg.word_indices.size(); ++i) {
        if (i) w += ", ";
        w += std::to_string(seg.word_indices[i]);
      }
      w += "], \"box\": ";
      write_box(w, seg.box);
      w += "}";
    });
    o += ",\n" + in + "\"entities\": ";
    write_block(o, d.entities, in, write_entity);
    o += ",\n" + in + "\"relations\": ";
    write_block(o, d.relations, in, write_relation);
    o += "\n    }";
  });
  out += "\n}\n";
  return out;
}

/// Canonical bytes of a single-split dataset.
inline std::string serialize_dataset(const Dataset& ds) {
  if (ds.splits.size() != 1)
    throw std::invalid_argument("canonical files hold exactly one split, dataset has " +
                                std::to_string(ds.splits.size()));
  return serialize_split(ds, ds.splits.front());
}

/// Content hash used to identify data independently of file names.
inline std::string fingerprint(const Dataset& ds, const Split& split) {
  return "fnv1a64:" + hex64(fnv1a64(serialize_split(ds, split)));
}

namespace detail {

// Ordered so provenance objects keep their key order.
using json = nlohmann::ordered_json;

// Schema helpers. `where` is a JSON-pointer-like path for messages.
inline const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError(where + ": missing key \"" + key + "\"");
  return *it;
}

inline void only_keys(const json& obj, std::initializer_list<const char*> keys,
                      const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected object");
  for (const auto& item : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return item.key() == k; }))
      throw SchemaError(where + ": unexpected key \"" + item.key() + "\"");
  }
}

inline const json& as_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + ": expected array");
  return v;
}

inline std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + ": expected string");
  return v.get<std::string>();
}

inline std::size_t as_index(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) throw SchemaError(where + ": expected non-negative integer");
  return v.get<std::size_t>();
}

inline double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + ": expected number");
  return v.get<double>();
}

inline BoundingBox as_box(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) throw SchemaError(where + ": expected [x0, y0, x1, y1]");
  return {as_number(v[0], where + "/0"), as_number(v[1], where + "/1"),
          as_number(v[2], where + "/2"), as_number(v[3], where + "/3")};
}

inline std::vector<std::string> as_string_list(const json& v, const std::string& where) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < as_array(v, where).size(); ++i)
    out.push_back(as_string(v[i], where + "/" + std::to_string(i)));
  return out;
}

inline Entity as_entity(const json& v, const std::string& where) {
  only_keys(v, {"type", "start", "end"}, where);
  return {as_string(require(v, "type", where), where + "/type"),
          as_index(require(v, "start", where), where + "/start"),
          as_index(require(v, "end", where), where + "/end")};
}

inline RelationTriplet as_relation(const json& v, const std::string& where) {
  only_keys(v, {"type", "subject", "object"}, where);
  return {as_string(require(v, "type", where), where + "/type"),
          as_index(require(v, "subject", where), where + "/subject"),
          as_index(require(v, "object", where), where + "/object")};
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(e.what());
  }
}

inline Document as_document(const json& v, const std::string& where) {
  only_keys(v, {"id", "width", "height", "words", "segments", "entities", "relations"}, where);
  Document d;
  d.id = as_string(require(v, "id", where), where + "/id");
  d.width = as_number(require(v, "width", where), where + "/width");
  d.height = as_number(require(v, "height", where), where + "/height");

  const auto& words = as_array(require(v, "words", where), where + "/words");
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string w = where + "/words/" + std::to_string(i);
    only_keys(words[i], {"text", "box"}, w);
    d.words.push_back({as_string(require(words[i], "text", w), w + "/text"),
                       as_box(require(words[i], "box", w), w + "/box")});
  }
  const auto& segs = as_array(require(v, "segments", where), where + "/segments");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string w = where + "/segments/" + std::to_string(i);
    only_keys(segs[i], {"words", "box"}, w);
    Segment s;
    const auto& idx = as_array(require(segs[i], "words", w), w + "/words");
    for (std::size_t k = 0; k < idx.size(); ++k)
      s.word_indices.push_back(as_index(idx[k], w + "/words/" + std::to_string(k)));
    s.box = as_box(require(segs[i], "box", w), w + "/box");
    d.segments.push_back(std::move(s));
  }
  const auto& ents = as_array(require(v, "entities", where), where + "/entities");
  for (std::size_t i = 0; i < ents.size(); ++i)
    d.entities.push_back(as_entity(ents[i], where + "/entities/" + std::to_string(i)));
  const auto& rels = as_array(require(v, "relations", where), where + "/relations");
  for (std::size_t i = 0; i < rels.size(); ++i)
    d.relations.push_back(as_relation(rels[i], where + "/relations/" + std::to_string(i)));
  return d;
}

}  // namespace detail

/// Decodes canonical dataset text into a dataset with one split named
/// `split_name`. Fails with SyntaxError, SchemaError (first problem found) or
/// InvariantError (every violation of every document).
inline Dataset parse_dataset_text(std::string_view text, const std::string& split_name = "all") {
  using namespace detail;
  const json root = parse_json(text);
  only_keys(root, {"name", "labels", "relation_labels", "provenance", "documents"}, "");
  Dataset ds;
  ds.name = as_string(require(root, "name", ""), "/name");
  ds.label_set = as_string_list(require(root, "labels", ""), "/labels");
  ds.relation_label_set = as_string_list(require(root, "relation_labels", ""), "/relation_labels");
  if (auto it = root.find("provenance"); it != root.end()) {
    if (!it->is_object()) throw SchemaError("/provenance: expected object");
    ds.provenance = it->dump();
  }
  Split split{split_name, {}};
  const auto& docs = as_array(require(root, "documents", ""), "/documents");
  for (std::size_t i = 0; i < docs.size(); ++i)
    split.documents.push_back(as_document(docs[i], "/documents/" + std::to_string(i)));
  ds.splits.push_back(std::move(split));

  ValidationReport violations = validate_dataset(ds);
  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " invariant violation(s):";
    for (const auto& v : violations) msg += "\n  " + v.rule + " at " + v.location + ": " + v.message;
    throw InvariantError(msg, std::move(violations));
  }
  return ds;
}

inline Dataset parse_dataset(const std::filesystem::path& path,
                             const std::string& split_name = "all") {
  return parse_dataset_text(detail::read_file(path), split_name);
}

/// Concatenates the named splits (in dataset order) into one split.
inline Dataset merge_splits(const Dataset& ds, const std::string& name) {
  Dataset out = ds;
  out.splits.clear();
  Split merged{name, {}};
  for (const auto& s : ds.splits)
    merged.documents.insert(merged.documents.end(), s.documents.begin(), s.documents.end());
  out.splits.push_back(std::move(merged));
  return out;
}

// --------------------------------------------------------------------------
// Predictions

inline std::string serialize_predictions(const PredictionSet& preds) {
  using namespace detail;
  std::string out = "{\n  \"task\": \"";
  out += task_name(preds.task);
  out += "\",\n  \"documents\": ";
  write_block(out, preds.documents, "  ", [](std::string& o, const PredictionRecord& r) {
    o += "{\"id\": ";
    write_string(o, r.id);
    auto list = [&o](const char* key, const auto& items, auto&& one) {
      o += std::string(", \"") + key + "\": [";
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) o += ", ";
        one(o, items[i]);
      }
      o += "]";
    };
    if (r.entities) list("entities", *r.entities, write_entity);
    if (r.tags) list("tags", *r.tags, write_string);
    if (r.relations) list("relations", *r.relations, write_relation);
    o += "}";
  });
  out += "\n}\n";
  return out;
}

/// Decodes a prediction file. Tags are checked against the BIO grammar and
/// predicted triplets must not repeat a (subject, object) pair; label and
/// length checks need the gold data, see check_predictions.
inline PredictionSet parse_predictions_text(std::string_view text) {
  using namespace detail;
  const json root = parse_json(text);
  only_keys(root, {"task", "documents"}, "");
  PredictionSet preds;
  const std::string task = as_string(require(root, "task", ""), "/task");
  if (task == "ser")
    preds.task = Task::kSer;
  else if (task == "el")
    preds.task = Task::kEl;
  else
    throw SchemaError("/task: expected \"ser\" or \"el\"");

  const auto& docs = as_array(require(root, "documents", ""), "/documents");
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::string w = "/documents/" + std::to_string(i);
    only_keys(docs[i], {"id", "entities", "tags", "relations"}, w);
    PredictionRecord rec;
    rec.id = as_string(require(docs[i], "id", w), w + "/id");
    if (docs[i].contains("entities") && docs[i].contains("tags"))
      throw SchemaError(w + ": \"entities\" and \"tags\" are mutually exclusive");
    if (auto it = docs[i].find("entities"); it != docs[i].end()) {
      rec.entities.emplace();
      for (std::size_t k = 0; k < as_array(*it, w + "/entities").size(); ++k)
        rec.entities->push_back(as_entity((*it)[k], w + "/entities/" + std::to_string(k)));
    }
    if (auto it = docs[i].find("tags"); it != docs[i].end()) {
      rec.tags = as_string_list(*it, w + "/tags");
      for (std::size_t k = 0; k < rec.tags->size(); ++k) {
        try {
          parse_bio_tag((*rec.tags)[k]);
        } catch (const ScoringError& e) {
          throw SchemaError(w + "/tags/" + std::to_string(k) + ": " + e.what());
        }
      }
    }
    if (auto it = docs[i].find("relations"); it != docs[i].end()) {
      rec.relations.emplace();
      std::set<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t k = 0; k < as_array(*it, w + "/relations").size(); ++k) {
        const std::string rw = w + "/relations/" + std::to_string(k);
        RelationTriplet t = as_relation((*it)[k], rw);
        if (!pairs.insert({t.subject, t.object}).second)
          throw InvariantError(rw + ": duplicate-relation (" + std::to_string(t.subject) + "," +
                                   std::to_string(t.object) + ")",
                               {{rules::kRelationDuplicate, rw, "duplicate predicted triplet"}});
        rec.relations->push_back(std::move(t));
      }
    }
    preds.documents.push_back(std::move(rec));
  }
  return preds;
}

inline PredictionSet parse_predictions(const std::filesystem::path& path) {
  return parse_predictions_text(detail::read_file(path));
}

/// Checks predictions against the gold split: every id exists once, tag
/// labels belong to the label set, tag sequences have one tag per word and
/// entity spans stay in range. Throws SchemaError describing the first issue.
inline void check_predictions(const PredictionSet& preds, const Dataset& ds, const Split& split) {
  std::map<std::string, const Document*> docs;
  for (const auto& d : split.documents) docs.emplace(d.id, &d);
  std::set<std::string> seen;
  for (const auto& rec : preds.documents) {
    auto it = docs.find(rec.id);
    if (it == docs.end()) throw SchemaError("prediction for unknown document '" + rec.id + "'");
    if (!seen.insert(rec.id).second)
      throw SchemaError("duplicate prediction record for '" + rec.id + "'");
    const Document& doc = *it->second;
    if (rec.tags) {
      if (rec.tags->size() != doc.words.size())
        throw SchemaError("document '" + rec.id + "': " + std::to_string(rec.tags->size()) +
                          " tags for " + std::to_string(doc.words.size()) + " words");
      try {
        for (const auto& t : *rec.tags) parse_bio_tag(t, &ds.label_set);
      } catch (const ScoringError& e) {
        throw SchemaError("document '" + rec.id + "': " + e.what());
      }
    }
    if (rec.entities) {
      for (const auto& e : *rec.entities) {
        if (std::find(ds.label_set.begin(), ds.label_set.end(), e.etype) == ds.label_set.end())
          throw SchemaError("document '" + rec.id + "': unknown label '" + e.etype + "'");
        if (!(e.start < e.end && e.end <= doc.words.size()))
          throw SchemaError("document '" + rec.id + "': span [" + std::to_string(e.start) + "," +
                            std::to_string(e.end) + ") out of range");
      }
    }
    if (rec.relations) {
      for (const auto& t : *rec.relations) {
        if (t.subject >= doc.entities.size() || t.object >= doc.entities.size())
          throw SchemaError("document '" + rec.id + "': triplet references a missing entity");
      }
    }
  }
}

// --------------------------------------------------------------------------
// FUNSD import

struct ImportOptions {
  bool drop_invalid_links = true;
  // "question-to-answer": the question-labeled side is the subject when
  // exactly one side is a question, otherwise pair order. "file-order":
  // always pair order.
  std::string relation_direction = "question-to-answer";
  // FUNSD "other" blocks become segments only; set to also make them
  // entities.
  bool other_as_entity = false;
};

struct ImportResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

inline const std::vector<std::string>& funsd_labels() {
  static const std::vector<std::string> kLabels = {"question", "answer", "header", "other"};
  return kLabels;
}

namespace detail {

// Width and height from a PNG IHDR chunk, if the file is a PNG.
inline std::optional<std::pair<double, double>> png_size(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char buf[24];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof buf)) return std::nullopt;
  static constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (!std::equal(kSig, kSig + 8, buf) || std::string_view(reinterpret_cast<char*>(buf + 12), 4) != "IHDR")
    return std::nullopt;
  auto be32 = [&](int off) {
    return (std::uint32_t{buf[off]} << 24) | (std::uint32_t{buf[off + 1]} << 16) |
           (std::uint32_t{buf[off + 2]} << 8) | std::uint32_t{buf[off + 3]};
  };
  return std::pair{static_cast<double>(be32(16)), static_cast<double>(be32(20))};
}

inline BoundingBox normalized_box(const json& v, const std::string& where) {
  BoundingBox b = as_box(v, where);
  return {std::min(b.x0, b.x1), std::min(b.y0, b.y1), std::max(b.x0, b.x1),
          std::max(b.y0, b.y1)};
}

inline bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

}  // namespace detail

/// Converts one FUNSD annotation (the "form" block list) into a document.
/// Each block with words becomes one segment and, unless labeled "other"
/// (see ImportOptions), one entity. Links are directed and de-duplicated.
inline Document import_funsd_document(std::string_view text, const std::string& id,
                                      std::optional<std::pair<double, double>> page_size,
                                      const ImportOptions& options,
                                      std::vector<std::string>& warnings) {
  using namespace detail;
  if (options.relation_direction != "question-to-answer" &&
      options.relation_direction != "file-order")
    throw std::invalid_argument("unknown relation direction rule '" +
                                options.relation_direction + "'");
  const json root = parse_json(text);
  const std::string where = id;
  const json& form = as_array(require(root, "form", where), where + "/form");

  Document doc;
  doc.id = id;
  struct BlockInfo {
    std::string label;
    std::optional<std::size_t> entity;
  };
  std::map<long long, BlockInfo> blocks;
  std::vector<std::pair<long long, long long>> pairs;
  BoundingBox extent{0, 0, 1, 1};

  for (std::size_t b = 0; b < form.size(); ++b) {
    const std::string bw = where + "/form/" + std::to_string(b);
    const json& block = form[b];
    if (!block.is_object()) throw SchemaError(bw + ": expected object");
    const json& idv = require(block, "id", bw);
    if (!idv.is_number_integer()) throw SchemaError(bw + "/id: expected integer");
    const long long block_id = idv.get<long long>();
    const std::string label = as_string(require(block, "label", bw), bw + "/label");
    if (std::find(funsd_labels().begin(), funsd_labels().end(), label) == funsd_labels().end())
      throw SchemaError(bw + "/label: unknown label '" + label + "'");

    if (auto lk = block.find("linking"); lk != block.end()) {
      for (std::size_t k = 0; k < as_array(*lk, bw + "/linking").size(); ++k) {
        const json& p = (*lk)[k];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
          throw SchemaError(bw + "/linking/" + std::to_string(k) + ": expected [id, id]");
        pairs.emplace_back(p[0].get<long long>(), p[1].get<long long>());
      }
    }

    const std::size_t first = doc.words.size();
    const json& words = as_array(require(block, "words", bw), bw + "/words");
    BoundingBox seg_box;
    bool has_box = block.contains("box");
    if (has_box) seg_box = normalized_box(block["box"], bw + "/box");
    for (std::size_t w = 0; w < words.size(); ++w) {
      const std::string ww = bw + "/words/" + std::to_string(w);
      std::string wtext = as_string(require(words[w], "text", ww), ww + "/text");
      const BoundingBox wbox = normalized_box(require(words[w], "box", ww), ww + "/box");
      if (blank(wtext)) continue;
      seg_box = has_box ? seg_box.united(wbox) : wbox;
      has_box = true;
      doc.words.push_back({std::move(wtext), wbox});
    }
    const std::size_t last = doc.words.size();
    if (last == first) {
      warnings.push_back(id + ": block " + std::to_string(block_id) +
                         " has no words after cleanup, dropped");
      if (!blocks.emplace(block_id, BlockInfo{label, std::nullopt}).second)
        throw SchemaError(bw + "/id: duplicate block id " + std::to_string(block_id));
      continue;
    }
    extent = extent.united(seg_box);
    Segment seg{{}, seg_box};
    for (std::size_t i = first; i < last; ++i) seg.word_indices.push_back(i);
    doc.segments.push_back(std::move(seg));
    BlockInfo info{label, std::nullopt};
    if (label != "other" || options.other_as_entity) {
      info.entity = doc.entities.size();
      doc.entities.push_back({label, first, last});
    }
    if (!blocks.emplace(block_id, info).second)
      throw SchemaError(bw + "/id: duplicate block id " + std::to_string(block_id));
  }

  std::set<std::pair<long long, long long>> seen;
  for (auto [a, b] : pairs) {
    const auto key = std::minmax(a, b);
    if (!seen.insert(key).second) continue;
    auto ia = blocks.find(a), ib = blocks.find(b);
    const bool valid = a != b && ia != blocks.end() && ib != blocks.end() &&
                       ia->second.entity && ib->second.entity;
    if (!valid) {
      if (!options.drop_invalid_links)
        throw SchemaError(id + ": invalid link [" + std::to_string(a) + ", " + std::to_string(b) +
                          "]");
      continue;
    }
    std::size_t subject = *ia->second.entity, object = *ib->second.entity;
    if (options.relation_direction == "question-to-answer" &&
        (ia->second.label == "question") != (ib->second.label == "question") &&
        ib->second.label == "question")
      std::swap(subject, object);
    doc.relations.push_back({"link", subject, object});
  }

  if (page_size) {
    doc.width = page_size->first;
    doc.height = page_size->second;
  } else {
    doc.width = std::ceil(extent.x1);
    doc.height = std::ceil(extent.y1);
  }
  return doc;
}

namespace detail {

inline std::vector<std::filesystem::path> json_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

inline Split import_funsd_split(const std::filesystem::path& annotations,
                                const std::string& name, const ImportOptions& options,
                                std::vector<std::string>& warnings) {
  Split split{name, {}};
  const auto images = annotations.parent_path() / "images";
  for (const auto& file : json_files(annotations)) {
    const std::string stem = file.stem().string();
    auto size = png_size(images / (stem + ".png"));
    split.documents.push_back(
        import_funsd_document(read_file(file), stem, size, options, warnings));
  }
  return split;
}

}  // namespace detail

/// Imports FUNSD annotations. `directory` may be the release root (holding
/// training_data/ and testing_data/, optionally under dataset/), giving
/// splits "train" and "test", or a flat directory of annotation files,
/// giving split "all". Page sizes come from images/<id>.png next to the
/// annotations when present, else from the extent of the boxes. Documents
/// are ordered by file name.
inline ImportResult import_funsd(const std::filesystem::path& directory,
                                 const ImportOptions& options = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) throw IoError("not a directory: " + directory.string());
  fs::path root = directory;
  if (fs::is_directory(root / "dataset" / "training_data")) root /= "dataset";

  ImportResult result;
  Dataset& ds = result.dataset;
  ds.name = "FUNSD";
  ds.label_set = funsd_labels();
  ds.relation_label_set = {"link"};
  const std::pair<const char*, const char*> layout[] = {{"training_data", "train"},
                                                        {"testing_data", "test"}};
  for (auto [sub, name] : layout) {
    fs::path ann = root / sub / "annotations";
    if (fs::is_directory(ann))
      ds.splits.push_back(detail::import_funsd_split(ann, name, options, result.warnings));
  }
  if (ds.splits.empty()) {
    fs::path ann = fs::is_directory(root / "annotations") ? root / "annotations" : root;
    ds.splits.push_back(detail::import_funsd_split(ann, "all", options, result.warnings));
  }
  ValidationReport violations = validate_dataset(ds);
  if (!violations.empty()) {
    std::string msg = "imported data breaks " + std::to_string(violations.size()) + " invariant(s):";
    for (const auto& v : violations) msg += "\n  " + v.rule + " at " + v.location + ": " + v.message;
    throw InvariantError(msg, std::move(violations));
  }
  return result;
}

}  // namespace vrdeval
