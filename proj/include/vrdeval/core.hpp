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

// Canonical document model: words with boxes, segments (text lines),
// typed entity spans and directed relation triplets. Everything here is a
// plain value type; all operations are pure.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vrdeval {

// --------------------------------------------------------------------------
// Hashing

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return out;
}

/// Axis-aligned rectangle in page pixels. Origin is the top-left corner of
/// the page, x grows right and y grows down.
struct BoundingBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }

  bool is_valid() const {
    return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) &&
           std::isfinite(y1) && x0 <= x1 && y0 <= y1;
  }

  // Closed containment, so a point on the border counts as inside.
  bool contains(double x, double y) const {
    return x0 <= x && x <= x1 && y0 <= y && y <= y1;
  }

  BoundingBox united(const BoundingBox& o) const {
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1),
            std::max(y1, o.y1)};
  }

  bool operator==(const BoundingBox&) const = default;
};

struct Word {
  std::string text;
  BoundingBox box;
  bool operator==(const Word&) const = default;
};

struct Segment {
  std::vector<std::size_t> word_indices;
  BoundingBox box;
  bool operator==(const Segment&) const = default;
};

/// Typed half-open word span [start, end).
struct Entity {
  std::string etype;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Entity&) const = default;
  auto operator<=>(const Entity&) const = default;
};

/// Directed, typed link between two entities of the same document.
struct RelationTriplet {
  std::string rtype;
  std::size_t subject = 0;
  std::size_t object = 0;
  bool operator==(const RelationTriplet&) const = default;
  auto operator<=>(const RelationTriplet&) const = default;
};

struct Document {
  std::string id;
  double width = 0;
  double height = 0;
  std::vector<Word> words;
  std::vector<Segment> segments;
  std::vector<Entity> entities;
  std::vector<RelationTriplet> relations;
  bool operator==(const Document&) const = default;
};

struct Split {
  std::string name;
  std::vector<Document> documents;
  bool operator==(const Split&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<std::string> label_set;
  std::vector<std::string> relation_label_set;
  std::vector<Split> splits;
  // Compact JSON object describing how the data was derived (transform,
  // parameters, seed); empty when the data is original.
  std::string provenance;

  const Split* find_split(const std::string& split) const {
    for (const auto& s : splits)
      if (s.name == split) return &s;
    return nullptr;
  }

  const Split& split(const std::string& split_name) const {
    if (const Split* s = find_split(split_name)) return *s;
    throw std::out_of_range("unknown split '" + split_name + "'");
  }

  bool operator==(const Dataset&) const = default;
};

// --------------------------------------------------------------------------
// Validation

namespace rules {
inline constexpr const char* kPageSize = "page-size";
inline constexpr const char* kBoxInvalid = "box-invalid";
inline constexpr const char* kWordText = "word-empty-text";
inline constexpr const char* kSegmentEmpty = "segment-empty";
inline constexpr const char* kSegmentOrder = "segment-unordered";
inline constexpr const char* kSegmentWordIndex = "segment-word-index";
inline constexpr const char* kSegmentBox = "segment-box";
inline constexpr const char* kSegmentPartition = "segment-partition";
inline constexpr const char* kEntitySpan = "entity-span";
inline constexpr const char* kEntityOverlap = "entity-overlap";
inline constexpr const char* kEntityLabel = "entity-label";
inline constexpr const char* kRelationSelf = "relation-self";
inline constexpr const char* kRelationIndex = "relation-index";
inline constexpr const char* kRelationDuplicate = "duplicate-relation";
inline constexpr const char* kRelationLabel = "relation-label";
inline constexpr const char* kDuplicateDocument = "duplicate-document";
}  // namespace rules

struct Violation {
  std::string rule;
  std::string location;
  std::string message;
  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

namespace detail {

inline std::string fmt_num(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  return std::to_string(v);
}

inline std::string fmt_box(const BoundingBox& b) {
  return "[" + fmt_num(b.x0) + "," + fmt_num(b.y0) + "," + fmt_num(b.x1) +
         "," + fmt_num(b.y1) + "]";
}

inline std::string at(const char* field, std::size_t i) {
  return std::string(field) + "[" + std::to_string(i) + "]";
}

}  // namespace detail

/// Checks every structural invariant of a document and reports all
/// violations. Label membership is only checked when the corresponding set
/// is given.
inline ValidationReport validate_document(
    const Document& doc, const std::vector<std::string>* labels = nullptr,
    const std::vector<std::string>* relation_labels = nullptr) {
  using detail::at;
  ValidationReport out;
  auto add = [&](const char* rule, std::string loc, std::string msg) {
    out.push_back({rule, std::move(loc), std::move(msg)});
  };
  const std::size_t n = doc.words.size();

  if (!(std::isfinite(doc.width) && std::isfinite(doc.height) &&
        doc.width > 0 && doc.height > 0))
    add(rules::kPageSize, "page",
        "page size must be positive, got " + detail::fmt_num(doc.width) + "x" +
            detail::fmt_num(doc.height));

  for (std::size_t i = 0; i < n; ++i) {
    const Word& w = doc.words[i];
    if (w.text.empty()) add(rules::kWordText, at("words", i), "empty word text");
    if (!w.box.is_valid())
      add(rules::kBoxInvalid, at("words", i),
          "invalid box " + detail::fmt_box(w.box));
  }

  std::vector<int> owners(n, 0);
  for (std::size_t s = 0; s < doc.segments.size(); ++s) {
    const Segment& seg = doc.segments[s];
    const std::string loc = at("segments", s);
    if (!seg.box.is_valid())
      add(rules::kBoxInvalid, loc, "invalid box " + detail::fmt_box(seg.box));
    if (seg.word_indices.empty()) {
      add(rules::kSegmentEmpty, loc, "segment has no words");
      continue;
    }
    for (std::size_t k = 0; k < seg.word_indices.size(); ++k) {
      const std::size_t wi = seg.word_indices[k];
      if (k > 0 && wi <= seg.word_indices[k - 1])
        add(rules::kSegmentOrder, loc,
            "word indices not strictly increasing at position " +
                std::to_string(k));
      if (wi >= n) {
        add(rules::kSegmentWordIndex, loc,
            "word index " + std::to_string(wi) + " out of range");
        continue;
      }
      ++owners[wi];
      const BoundingBox& wb = doc.words[wi].box;
      if (seg.box.is_valid() && wb.is_valid() &&
          !seg.box.contains(wb.center_x(), wb.center_y()))
        add(rules::kSegmentBox, loc,
            "box " + detail::fmt_box(seg.box) + " misses center of word " +
                std::to_string(wi));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (owners[i] != 1)
      add(rules::kSegmentPartition, at("words", i),
          "word belongs to " + std::to_string(owners[i]) +
              " segments, expected 1");
  }

  const auto& ents = doc.entities;
  std::vector<std::size_t> valid_ents;
  for (std::size_t e = 0; e < ents.size(); ++e) {
    const Entity& ent = ents[e];
    if (!(ent.start < ent.end && ent.end <= n)) {
      add(rules::kEntitySpan, at("entities", e),
          "span [" + std::to_string(ent.start) + "," + std::to_string(ent.end) +
              ") invalid for " + std::to_string(n) + " words");
    } else {
      valid_ents.push_back(e);
    }
    if (labels && std::find(labels->begin(), labels->end(), ent.etype) ==
                      labels->end())
      add(rules::kEntityLabel, at("entities", e),
          "unknown entity type '" + ent.etype + "'");
  }
  std::sort(valid_ents.begin(), valid_ents.end(),
            [&](std::size_t a, std::size_t b) {
              return std::pair(ents[a].start, a) < std::pair(ents[b].start, b);
            });
  // After sorting by start, any overlap shows up against the furthest-reaching
  // predecessor.
  std::optional<std::size_t> reach;
  for (std::size_t e : valid_ents) {
    if (reach && ents[*reach].end > ents[e].start)
      add(rules::kEntityOverlap, at("entities", e),
          "overlaps entities[" + std::to_string(*reach) + "]");
    if (!reach || ents[e].end > ents[*reach].end) reach = e;
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t r = 0; r < doc.relations.size(); ++r) {
    const RelationTriplet& t = doc.relations[r];
    const std::string loc = at("relations", r);
    if (t.subject >= ents.size() || t.object >= ents.size())
      add(rules::kRelationIndex, loc, "entity index out of range");
    if (t.subject == t.object)
      add(rules::kRelationSelf, loc, "subject equals object");
    if (!seen.insert({t.subject, t.object}).second)
      add(rules::kRelationDuplicate, loc,
          "duplicate triplet for pair (" + std::to_string(t.subject) + "," +
              std::to_string(t.object) + ")");
    if (relation_labels &&
        std::find(relation_labels->begin(), relation_labels->end(),
                  t.rtype) == relation_labels->end())
      add(rules::kRelationLabel, loc, "unknown relation type '" + t.rtype + "'");
  }
  return out;
}

/// Validates every document of every split, including id uniqueness within
/// a split. Locations are prefixed with split and document id.
inline ValidationReport validate_dataset(const Dataset& ds) {
  ValidationReport out;
  for (const auto& split : ds.splits) {
    std::set<std::string> ids;
    for (const auto& doc : split.documents) {
      const std::string prefix = split.name + "/" + doc.id + ":";
      if (!ids.insert(doc.id).second)
        out.push_back({rules::kDuplicateDocument, prefix + "id",
                       "document id repeated in split"});
      for (auto v : validate_document(doc, &ds.label_set,
                                      &ds.relation_label_set)) {
        v.location = prefix + v.location;
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Geometry

/// Union of the member word boxes of an entity.
inline BoundingBox entity_box(const Document& doc, std::size_t entity_index) {
  if (entity_index >= doc.entities.size())
    throw std::invalid_argument("entity index " + std::to_string(entity_index) +
                                " out of range");
  const Entity& e = doc.entities[entity_index];
  if (!(e.start < e.end && e.end <= doc.words.size()))
    throw std::invalid_argument("entity span out of range");
  BoundingBox box = doc.words[e.start].box;
  for (std::size_t i = e.start + 1; i < e.end; ++i)
    box = box.united(doc.words[i].box);
  return box;
}

/// Minimal union-find with path halving.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Two vertical intervals belong to the same row when their overlap is at
/// least half the height of the shorter one.
inline bool same_row(const BoundingBox& a, const BoundingBox& b) {
  const double overlap = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (overlap < 0) return false;
  return overlap >= 0.5 * std::min(a.height(), b.height());
}

/// Assigns each word a row id. Rows are the transitive closure of same_row
/// and are numbered by ascending mean word-center y (ties: lowest word index).
inline std::vector<std::size_t> row_clusters(const Document& doc) {
  const std::size_t n = doc.words.size();
  DisjointSets sets(n);
  // Sweep in order of y0 so a pair is only compared while intervals can
  // still intersect.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(doc.words[a].box.y0, a) < std::pair(doc.words[b].box.y0, b);
  });
  for (std::size_t i = 0; i < n; ++i) {
    const BoundingBox& a = doc.words[order[i]].box;
    for (std::size_t j = i + 1; j < n; ++j) {
      const BoundingBox& b = doc.words[order[j]].box;
      if (b.y0 > a.y1) break;
      if (same_row(a, b)) sets.unite(order[i], order[j]);
    }
  }

  struct Acc {
    double sum = 0;
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::map<std::size_t, Acc> acc;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = acc.try_emplace(sets.find(i));
    if (fresh) it->second.first = i;
    it->second.sum += doc.words[i].box.center_y();
    ++it->second.count;
  }
  std::vector<std::pair<std::pair<double, std::size_t>, std::size_t>> keyed;
  for (const auto& [root, a] : acc)
    keyed.push_back({{a.sum / static_cast<double>(a.count), a.first}, root});
  std::sort(keyed.begin(), keyed.end());
  std::map<std::size_t, std::size_t> row_of_root;
  for (std::size_t r = 0; r < keyed.size(); ++r) row_of_root[keyed[r].second] = r;

  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = row_of_root[sets.find(i)];
  return rows;
}

// --------------------------------------------------------------------------
// Statistics

/// Counts and per-sample averages for one split. The complex-entity fields
/// are filled in by analysis::annotate_complexity.
struct StatsReport {
  std::size_t samples = 0;
  std::size_t segments = 0;
  std::size_t words = 0;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t segment_words = 0;
  std::size_t entity_words = 0;

  double segments_per_sample = 0;
  double words_per_sample = 0;
  double avg_segment_length = 0;
  double entities_per_sample = 0;
  double avg_entity_length = 0;
  double relations_per_sample = 0;

  std::optional<std::size_t> complex_count;
  std::optional<double> complex_proportion;
};

/// Rounds half away from zero to two decimals.
inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline StatsReport stats_of(const std::vector<Document>& docs) {
  StatsReport r;
  r.samples = docs.size();
  for (const auto& d : docs) {
    r.segments += d.segments.size();
    r.words += d.words.size();
    r.entities += d.entities.size();
    r.relations += d.relations.size();
    for (const auto& s : d.segments) r.segment_words += s.word_indices.size();
    for (const auto& e : d.entities) r.entity_words += e.length();
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : round2(static_cast<double>(a) / static_cast<double>(b));
  };
  r.segments_per_sample = ratio(r.segments, r.samples);
  r.words_per_sample = ratio(r.words, r.samples);
  r.avg_segment_length = ratio(r.segment_words, r.segments);
  r.entities_per_sample = ratio(r.entities, r.samples);
  r.avg_entity_length = ratio(r.entity_words, r.entities);
  r.relations_per_sample = ratio(r.relations, r.samples);
  return r;
}

/// Statistics of one split. Throws std::out_of_range for an unknown split.
inline StatsReport dataset_stats(const Dataset& ds, const std::string& split) {
  return stats_of(ds.split(split).documents);
}

}  // namespace vrdeval
