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

// Exact-match entity scoring (SER), directed triplet scoring (EL), recall
// restricted to an entity subset, and BIO tag conversion.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vrdeval/core.hpp"
#include "vrdeval/predictions.hpp"

namespace vrdeval {

class ScoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Micro-averaged precision/recall/F1 with the raw counts it came from.
/// Zero denominators give 0 rather than NaN.
struct PRF {
  std::size_t true_positives = 0;
  std::size_t predicted_count = 0;
  std::size_t gold_count = 0;

  double precision() const {
    return predicted_count == 0
               ? 0.0
               : static_cast<double>(true_positives) / static_cast<double>(predicted_count);
  }
  double recall() const {
    return gold_count == 0
               ? 0.0
               : static_cast<double>(true_positives) / static_cast<double>(gold_count);
  }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }

  PRF& operator+=(const PRF& o) {
    true_positives += o.true_positives;
    predicted_count += o.predicted_count;
    gold_count += o.gold_count;
    return *this;
  }
  friend PRF operator+(PRF a, const PRF& b) { return a += b; }
  bool operator==(const PRF&) const = default;
};

// --------------------------------------------------------------------------
// BIO

struct BioTag {
  char prefix = 'O';  // 'O', 'B' or 'I'
  std::string label;
};

/// Splits "B-X" / "I-X" / "O". Throws ScoringError on anything else, or on a
/// label outside `labels` when a label set is given.
inline BioTag parse_bio_tag(std::string_view tag,
                            const std::vector<std::string>* labels = nullptr) {
  if (tag == "O") return {};
  if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-')
    throw ScoringError("malformed BIO tag '" + std::string(tag) + "'");
  BioTag out{tag[0], std::string(tag.substr(2))};
  if (labels && std::find(labels->begin(), labels->end(), out.label) == labels->end())
    throw ScoringError("unknown label in tag '" + std::string(tag) + "'");
  return out;
}

/// Decodes a tag sequence into half-open spans. An I-X that does not
/// continue an open X span starts a new span of type X.
inline std::vector<Entity> decode_bio(const std::vector<std::string>& tags,
                                      const std::vector<std::string>* labels = nullptr) {
  std::vector<Entity> spans;
  std::optional<Entity> open;
  auto close = [&] {
    if (open) spans.push_back(*open);
    open.reset();
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    BioTag t = parse_bio_tag(tags[i], labels);
    if (t.prefix == 'O') {
      close();
    } else if (t.prefix == 'I' && open && open->etype == t.label) {
      open->end = i + 1;
    } else {
      close();
      open = Entity{std::move(t.label), i, i + 1};
    }
  }
  close();
  return spans;
}

/// Encodes disjoint spans as BIO tags; uncovered positions are "O".
inline std::vector<std::string> encode_bio(const std::vector<Entity>& spans,
                                           std::size_t word_count) {
  std::vector<std::string> tags(word_count, "O");
  std::vector<bool> used(word_count, false);
  for (const auto& s : spans) {
    if (!(s.start < s.end && s.end <= word_count))
      throw ScoringError("span [" + std::to_string(s.start) + "," +
                         std::to_string(s.end) + ") out of range");
    for (std::size_t i = s.start; i < s.end; ++i) {
      if (used[i]) throw ScoringError("overlapping spans at word " + std::to_string(i));
      used[i] = true;
      tags[i] = (i == s.start ? "B-" : "I-") + s.etype;
    }
  }
  return tags;
}

// --------------------------------------------------------------------------
// Matching

/// Exact-match SER counts for one document; duplicate predictions count once.
inline PRF ser_counts(const std::vector<Entity>& gold, const std::vector<Entity>& predicted) {
  const std::set<Entity> g(gold.begin(), gold.end());
  const std::set<Entity> p(predicted.begin(), predicted.end());
  PRF out;
  out.gold_count = g.size();
  out.predicted_count = p.size();
  for (const auto& e : p) out.true_positives += g.count(e);
  return out;
}

/// Direction- and type-sensitive triplet counts for one document.
inline PRF el_counts(const std::vector<RelationTriplet>& gold,
                     const std::vector<RelationTriplet>& predicted) {
  const std::set<RelationTriplet> g(gold.begin(), gold.end());
  const std::set<RelationTriplet> p(predicted.begin(), predicted.end());
  PRF out;
  out.gold_count = g.size();
  out.predicted_count = p.size();
  for (const auto& t : p) out.true_positives += g.count(t);
  return out;
}

/// Maps each prediction record to its gold document, failing on ids that do
/// not exist in the split or appear twice.
inline std::unordered_map<std::string, const PredictionRecord*> index_predictions(
    const Split& gold, const PredictionSet& preds) {
  std::unordered_map<std::string, const Document*> docs;
  for (const auto& d : gold.documents) docs.emplace(d.id, &d);
  std::unordered_map<std::string, const PredictionRecord*> out;
  for (const auto& rec : preds.documents) {
    if (!docs.count(rec.id))
      throw ScoringError("prediction for unknown document '" + rec.id + "'");
    if (!out.emplace(rec.id, &rec).second)
      throw ScoringError("duplicate prediction record for '" + rec.id + "'");
  }
  return out;
}

/// Predicted spans of a record: explicit spans, else decoded tags, else none.
inline std::vector<Entity> predicted_entities(const PredictionRecord& rec,
                                              const Document& doc,
                                              const std::vector<std::string>* labels = nullptr) {
  if (rec.entities) return *rec.entities;
  if (rec.tags) {
    if (rec.tags->size() != doc.words.size())
      throw ScoringError("document '" + doc.id + "': " + std::to_string(rec.tags->size()) +
                         " tags for " + std::to_string(doc.words.size()) + " words");
    return decode_bio(*rec.tags, labels);
  }
  return {};
}

/// Micro SER scores over a split, also returning per-document counts in
/// split order when `per_doc` is given.
inline PRF ser_prf(const Split& gold, const PredictionSet& preds,
                   const std::vector<std::string>* labels = nullptr,
                   std::vector<PRF>* per_doc = nullptr) {
  const auto index = index_predictions(gold, preds);
  PRF total;
  for (const auto& doc : gold.documents) {
    auto it = index.find(doc.id);
    const PRF c = it == index.end()
                      ? ser_counts(doc.entities, {})
                      : ser_counts(doc.entities, predicted_entities(*it->second, doc, labels));
    if (per_doc) per_doc->push_back(c);
    total += c;
  }
  return total;
}

/// Micro EL scores given gold entities. Predicted triplets must reference
/// valid gold entity indices.
inline PRF el_prf(const Split& gold, const PredictionSet& preds,
                  std::vector<PRF>* per_doc = nullptr) {
  const auto index = index_predictions(gold, preds);
  PRF total;
  for (const auto& doc : gold.documents) {
    std::vector<RelationTriplet> predicted;
    if (auto it = index.find(doc.id); it != index.end() && it->second->relations)
      predicted = *it->second->relations;
    for (const auto& t : predicted)
      if (t.subject >= doc.entities.size() || t.object >= doc.entities.size())
        throw ScoringError("document '" + doc.id + "': triplet references entity " +
                           std::to_string(std::max(t.subject, t.object)) + " of " +
                           std::to_string(doc.entities.size()));
    const PRF c = el_counts(doc.relations, predicted);
    if (per_doc) per_doc->push_back(c);
    total += c;
  }
  return total;
}

/// Gold entity indices per document id.
using EntitySubset = std::map<std::string, std::vector<std::size_t>>;

struct SubsetRecall {
  std::size_t recalled = 0;
  std::size_t total = 0;
  // Set when the subset holds no entities; recall is then 0 by convention.
  bool empty_subset = true;
  double recall() const {
    return total == 0 ? 0.0 : static_cast<double>(recalled) / static_cast<double>(total);
  }
};

/// Recall counting only the gold entities listed in `subset`.
inline SubsetRecall subset_recall(const Split& gold, const PredictionSet& preds,
                                  const EntitySubset& subset,
                                  const std::vector<std::string>* labels = nullptr) {
  const auto index = index_predictions(gold, preds);
  std::unordered_map<std::string, const Document*> docs;
  for (const auto& d : gold.documents) docs.emplace(d.id, &d);

  SubsetRecall out;
  for (const auto& [id, indices] : subset) {
    auto dit = docs.find(id);
    if (dit == docs.end()) throw ScoringError("subset names unknown document '" + id + "'");
    const Document& doc = *dit->second;
    std::set<Entity> predicted;
    if (auto pit = index.find(id); pit != index.end()) {
      auto ents = predicted_entities(*pit->second, doc, labels);
      predicted.insert(ents.begin(), ents.end());
    }
    for (std::size_t i : std::set<std::size_t>(indices.begin(), indices.end())) {
      if (i >= doc.entities.size())
        throw ScoringError("subset index " + std::to_string(i) + " invalid for document '" +
                           id + "'");
      ++out.total;
      out.recalled += predicted.count(doc.entities[i]);
    }
  }
  out.empty_subset = out.total == 0;
  return out;
}

}  // namespace vrdeval
