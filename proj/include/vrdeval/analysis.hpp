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

// Dataset diagnostics: how tightly entity boundaries follow segment
// boundaries (the block-annotation shortcut), and which entities are
// complex (multi-row, or whose region contains words of other entities).

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vrdeval/core.hpp"
#include "vrdeval/metrics.hpp"

namespace vrdeval::analysis {

/// Count-backed fraction; `value()` is 0 when nothing was counted.
struct Fraction {
  std::size_t hits = 0;
  std::size_t total = 0;
  double value() const {
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
  }
  Fraction& operator+=(const Fraction& o) {
    hits += o.hits;
    total += o.total;
    return *this;
  }
};

// Segment id of every word; words outside all segments get SIZE_MAX.
inline std::vector<std::size_t> segment_of_words(const Document& doc) {
  std::vector<std::size_t> seg_of(doc.words.size(), static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < doc.segments.size(); ++s)
    for (std::size_t wi : doc.segments[s].word_indices)
      if (wi < seg_of.size()) seg_of[wi] = s;
  return seg_of;
}

/// Multi-word entities whose words all sit in one segment, over all
/// multi-word entities.
inline Fraction entity_layout_uniformity(const Document& doc) {
  const auto seg_of = segment_of_words(doc);
  Fraction f;
  for (const Entity& e : doc.entities) {
    if (e.length() < 2) continue;
    ++f.total;
    bool same = true;
    for (std::size_t i = e.start + 1; i < e.end && same; ++i) same = seg_of[i] == seg_of[e.start];
    f.hits += same;
  }
  return f;
}

/// Entity start/end positions that coincide with a segment start/end, over
/// all 2 * |entities| positions.
inline Fraction boundary_alignment(const Document& doc) {
  std::vector<bool> seg_start(doc.words.size() + 1, false), seg_end(doc.words.size() + 1, false);
  for (const Segment& s : doc.segments) {
    if (s.word_indices.empty()) continue;
    seg_start[s.word_indices.front()] = true;
    seg_end[s.word_indices.back() + 1] = true;
  }
  Fraction f;
  for (const Entity& e : doc.entities) {
    f.total += 2;
    f.hits += seg_start[e.start];
    f.hits += seg_end[e.end];
  }
  return f;
}

inline Fraction entity_layout_uniformity(const Dataset& ds, const std::string& split) {
  Fraction f;
  for (const auto& d : ds.split(split).documents) f += entity_layout_uniformity(d);
  return f;
}

inline Fraction boundary_alignment(const Dataset& ds, const std::string& split) {
  Fraction f;
  for (const auto& d : ds.split(split).documents) f += boundary_alignment(d);
  return f;
}

// --------------------------------------------------------------------------
// Complex entities

struct Complexity {
  bool multi_row = false;  // words on two or more rows
  bool intruded = false;   // region contains a word center of another entity
  bool complex() const { return multi_row || intruded; }
};

/// Evaluates both clauses for every entity of a document with one row
/// clustering pass.
inline std::vector<Complexity> complexity_of(const Document& doc) {
  const auto rows = row_clusters(doc);
  std::vector<std::size_t> owner(doc.words.size(), static_cast<std::size_t>(-1));
  for (std::size_t e = 0; e < doc.entities.size(); ++e)
    for (std::size_t i = doc.entities[e].start; i < doc.entities[e].end; ++i) owner[i] = e;

  std::vector<Complexity> out(doc.entities.size());
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    const Entity& ent = doc.entities[e];
    for (std::size_t i = ent.start + 1; i < ent.end; ++i)
      if (rows[i] != rows[ent.start]) out[e].multi_row = true;
    const BoundingBox box = entity_box(doc, e);
    for (std::size_t i = 0; i < doc.words.size() && !out[e].intruded; ++i) {
      if (owner[i] == e || owner[i] == static_cast<std::size_t>(-1)) continue;
      const BoundingBox& wb = doc.words[i].box;
      out[e].intruded = box.contains(wb.center_x(), wb.center_y());
    }
  }
  return out;
}

inline bool is_complex(const Document& doc, std::size_t entity_index) {
  if (entity_index >= doc.entities.size())
    throw std::invalid_argument("entity index " + std::to_string(entity_index) + " out of range");
  return complexity_of(doc)[entity_index].complex();
}

struct DocumentDiagnostics {
  std::string id;
  Fraction layout_uniformity;
  Fraction boundary_alignment;
  std::vector<std::size_t> complex_entities;
  std::size_t entity_count = 0;
};

struct DiagnosticsReport {
  Fraction layout_uniformity;
  Fraction boundary_alignment;
  std::size_t entity_count = 0;
  std::size_t complex_count = 0;
  std::size_t multi_row_only = 0;
  std::size_t intruded_only = 0;
  std::size_t both_clauses = 0;
  std::vector<DocumentDiagnostics> documents;

  double complex_proportion() const {
    return entity_count == 0
               ? 0.0
               : static_cast<double>(complex_count) / static_cast<double>(entity_count);
  }

  EntitySubset subset() const {
    EntitySubset out;
    for (const auto& d : documents) out[d.id] = d.complex_entities;
    return out;
  }
};

/// Diagnostics and complex-entity subset for one split.
inline DiagnosticsReport diagnose(const Dataset& ds, const std::string& split) {
  DiagnosticsReport r;
  for (const auto& doc : ds.split(split).documents) {
    DocumentDiagnostics d;
    d.id = doc.id;
    d.layout_uniformity = entity_layout_uniformity(doc);
    d.boundary_alignment = boundary_alignment(doc);
    d.entity_count = doc.entities.size();
    const auto cx = complexity_of(doc);
    for (std::size_t e = 0; e < cx.size(); ++e) {
      if (!cx[e].complex()) continue;
      d.complex_entities.push_back(e);
      if (cx[e].multi_row && cx[e].intruded)
        ++r.both_clauses;
      else if (cx[e].multi_row)
        ++r.multi_row_only;
      else
        ++r.intruded_only;
    }
    r.layout_uniformity += d.layout_uniformity;
    r.boundary_alignment += d.boundary_alignment;
    r.entity_count += d.entity_count;
    r.complex_count += d.complex_entities.size();
    r.documents.push_back(std::move(d));
  }
  return r;
}

inline EntitySubset complex_subset(const Dataset& ds, const std::string& split) {
  return diagnose(ds, split).subset();
}

/// Fills the complex-entity fields of a stats report.
inline void annotate_complexity(StatsReport& stats, const Dataset& ds, const std::string& split) {
  const DiagnosticsReport r = diagnose(ds, split);
  stats.complex_count = r.complex_count;
  stats.complex_proportion = r.complex_proportion();
}

}  // namespace vrdeval::analysis
