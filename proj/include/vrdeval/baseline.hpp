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

// Rule-based SER tagger and EL linker. They exist so the whole
// transform -> predict -> score pipeline runs without a neural model; their
// scores carry no quality claim.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrdeval/core.hpp"
#include "vrdeval/predictions.hpp"

namespace vrdeval::baseline {

struct BaselineConfig {
  double header_band = 0.10;
  // Unset means the page diagonal.
  std::optional<double> link_max_distance;

  void check() const {
    if (!(header_band > 0 && header_band <= 1))
      throw std::invalid_argument("header_band must be in (0, 1]");
    if (link_max_distance && !(*link_max_distance >= 0))
      throw std::invalid_argument("link_max_distance must be non-negative");
  }
};

namespace detail {

inline bool ends_with_colon(const Document& doc, const Segment& seg) {
  const std::string& last = doc.words[seg.word_indices.back()].text;
  return !last.empty() && last.back() == ':';
}

}  // namespace detail

/// One predicted entity per segment, in segment order. Rules in priority
/// order: last word ends in ':' -> question; box center in the top
/// header_band of the page -> header; nearest segment to the right on the
/// same row, or nearest overlapping segment below, of a question -> answer;
/// anything else -> other.
inline std::vector<Entity> tag_ser(const Document& doc, const BaselineConfig& config = {}) {
  config.check();
  const auto rows = row_clusters(doc);
  const std::size_t n = doc.segments.size();
  enum Kind { kOther, kQuestion, kHeader, kAnswer };
  std::vector<Kind> kind(n, kOther);
  auto row_of = [&](std::size_t s) { return rows[doc.segments[s].word_indices.front()]; };

  for (std::size_t s = 0; s < n; ++s) {
    const Segment& seg = doc.segments[s];
    if (detail::ends_with_colon(doc, seg))
      kind[s] = kQuestion;
    else if (seg.box.center_y() < config.header_band * doc.height)
      kind[s] = kHeader;
  }

  for (std::size_t q = 0; q < n; ++q) {
    if (kind[q] != kQuestion) continue;
    const BoundingBox& qb = doc.segments[q].box;
    std::optional<std::size_t> right, below;
    for (std::size_t s = 0; s < n; ++s) {
      if (s == q) continue;
      const BoundingBox& sb = doc.segments[s].box;
      if (row_of(s) == row_of(q)) {
        if (sb.center_x() > qb.center_x() &&
            (!right || sb.x0 < doc.segments[*right].box.x0))
          right = s;
      } else if (sb.center_y() > qb.center_y() &&
                 std::min(sb.x1, qb.x1) > std::max(sb.x0, qb.x0)) {
        if (!below || sb.y0 < doc.segments[*below].box.y0) below = s;
      }
    }
    for (auto cand : {right, below})
      if (cand && kind[*cand] == kOther) kind[*cand] = kAnswer;
  }

  static const char* const kNames[] = {"other", "question", "header", "answer"};
  std::vector<Entity> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Segment& seg = doc.segments[s];
    out.push_back({kNames[kind[s]], seg.word_indices.front(), seg.word_indices.back() + 1});
  }
  return out;
}

/// For every gold answer, links the nearest gold question (center to
/// center) lying above or left of it, within link_max_distance. Ties go to
/// the lower question index.
inline std::vector<RelationTriplet> link_el(const Document& doc, const std::vector<Entity>& entities,
                                            const BaselineConfig& config = {}) {
  config.check();
  const double limit =
      config.link_max_distance.value_or(std::hypot(doc.width, doc.height));
  std::vector<BoundingBox> boxes;
  Document view = doc;
  view.entities = entities;
  for (std::size_t e = 0; e < entities.size(); ++e) boxes.push_back(entity_box(view, e));

  std::vector<RelationTriplet> out;
  for (std::size_t a = 0; a < entities.size(); ++a) {
    if (entities[a].etype != "answer") continue;
    const double ax = boxes[a].center_x(), ay = boxes[a].center_y();
    std::optional<std::size_t> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < entities.size(); ++q) {
      if (entities[q].etype != "question") continue;
      const double qx = boxes[q].center_x(), qy = boxes[q].center_y();
      if (!(qy < ay || qx < ax)) continue;
      const double d = std::hypot(qx - ax, qy - ay);
      if (d <= limit && d < best_dist) {
        best = q;
        best_dist = d;
      }
    }
    if (best) out.push_back({"link", *best, a});
  }
  return out;
}

/// Predictions for a whole split in split order.
inline PredictionSet predict(const Split& split, Task task, const BaselineConfig& config = {}) {
  PredictionSet preds;
  preds.task = task;
  for (const auto& doc : split.documents) {
    PredictionRecord rec;
    rec.id = doc.id;
    if (task == Task::kSer)
      rec.entities = tag_ser(doc, config);
    else
      rec.relations = link_el(doc, doc.entities, config);
    preds.documents.push_back(std::move(rec));
  }
  return preds;
}

}  // namespace vrdeval::baseline
