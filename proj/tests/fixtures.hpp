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

// Hand-built documents and random generators shared by the test binaries.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "vrdeval/core.hpp"

namespace vrdeval {

// Readable gtest failure output for boxes.
inline void PrintTo(const BoundingBox& b, std::ostream* os) {
  *os << '[' << b.x0 << ", " << b.y0 << ", " << b.x1 << ", " << b.y1 << ']';
}

}  // namespace vrdeval

namespace vrdeval::testing {

inline Word word(std::string text, double x0, double y0, double x1, double y1) {
  return {std::move(text), {x0, y0, x1, y1}};
}

inline BoundingBox union_of(const Document& d, const std::vector<std::size_t>& idx) {
  BoundingBox b = d.words[idx.front()].box;
  for (std::size_t i : idx) b = b.united(d.words[i].box);
  return b;
}

inline Segment segment_over(const Document& d, std::vector<std::size_t> idx) {
  Segment s{std::move(idx), {}};
  s.box = union_of(d, s.word_indices);
  return s;
}

/// Two words, one segment, one entity.
inline Document two_word_doc() {
  Document d;
  d.id = "two-word";
  d.width = 100;
  d.height = 100;
  d.words = {word("DATE:", 10, 10, 40, 20), word("today", 50, 10, 90, 20)};
  d.segments = {segment_over(d, {0, 1})};
  d.entities = {{"question", 0, 2}};
  return d;
}

/// Four words, three segments, a question/answer pair plus a second
/// question, and one link.
inline Document form_doc() {
  Document d;
  d.id = "form";
  d.width = 200;
  d.height = 100;
  d.words = {word("DATE:", 10, 10, 40, 20), word("March", 50, 10, 80, 20),
             word("3,", 85, 10, 95, 20), word("NAME:", 10, 40, 50, 50)};
  d.segments = {segment_over(d, {0}), segment_over(d, {1, 2}), segment_over(d, {3})};
  d.entities = {{"question", 0, 1}, {"answer", 1, 3}, {"question", 3, 4}};
  d.relations = {{"link", 0, 1}};
  return d;
}

inline const std::vector<std::string>& labels() {
  static const std::vector<std::string> kLabels = {"question", "answer", "header", "other"};
  return kLabels;
}

inline Dataset dataset_of(std::vector<Document> docs, std::string split = "all") {
  Dataset ds;
  ds.name = "fixture";
  ds.label_set = labels();
  ds.relation_label_set = {"link", "kv"};
  ds.splits.push_back({std::move(split), std::move(docs)});
  return ds;
}

struct RandomDocOptions {
  std::size_t max_words = 40;
  std::size_t max_entities = 12;
  std::size_t max_relations = 8;
  bool fractional = false;
};

/// Random valid document laid out in rows of words. Segments are runs of
/// words within a row; entities are disjoint random spans; relations are
/// distinct ordered pairs.
inline Document random_document(std::mt19937_64& rng, const std::string& id,
                                const RandomDocOptions& opt = {}) {
  auto uni = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  Document d;
  d.id = id;
  d.width = 1000;
  d.height = 1400;
  const std::size_t n = uni(1, opt.max_words);
  double x = 20, y = 40;
  std::vector<std::size_t> row_start_flags;
  for (std::size_t i = 0; i < n; ++i) {
    double w = opt.fractional ? real(8, 90) : static_cast<double>(uni(8, 90));
    double h = opt.fractional ? real(10, 18) : static_cast<double>(uni(10, 18));
    bool new_row = i == 0 || x + w > 960 || uni(0, 7) == 0;
    if (new_row && i > 0) {
      x = 20 + static_cast<double>(uni(0, 200));
      y += static_cast<double>(uni(22, 60));
    }
    d.words.push_back(word("w" + std::to_string(i), x, y, x + w, y + h));
    row_start_flags.push_back(new_row);
    x += w + static_cast<double>(uni(3, 25));
  }
  for (std::size_t i = 0; i < n;) {
    std::size_t len = uni(1, 4);
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < len && i < n; ++k, ++i) {
      if (k > 0 && row_start_flags[i]) break;
      idx.push_back(i);
    }
    d.segments.push_back(segment_over(d, idx));
  }
  std::size_t pos = uni(0, 2);
  while (pos < n && d.entities.size() < opt.max_entities) {
    std::size_t len = std::min(uni(1, 5), n - pos);
    d.entities.push_back({labels()[uni(0, 3)], pos, pos + len});
    pos += len + uni(0, 3);
  }
  const std::size_t e = d.entities.size();
  if (e >= 2) {
    const std::size_t want = uni(0, opt.max_relations);
    for (std::size_t tries = 0; d.relations.size() < want && tries < 50; ++tries) {
      RelationTriplet t{uni(0, 1) ? "link" : "kv", uni(0, e - 1), uni(0, e - 1)};
      if (t.subject == t.object) continue;
      if (std::any_of(d.relations.begin(), d.relations.end(), [&](const RelationTriplet& r) {
            return r.subject == t.subject && r.object == t.object;
          }))
        continue;
      d.relations.push_back(t);
    }
  }
  return d;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vrdeval-" + name + "-" +
                                                      std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace vrdeval::testing
