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

// Label-preserving layout transforms.
//
// Segment masking replaces segment-level layout with word-level layout.
// The perturbation pipeline runs three seeded stages in this order:
//
//   1. split_segments    chunk every segment into runs of
//                        k = max(1, round(c)) words, c ~ Exp(rate)
//   2. rotate_regions    rotate every segment, with its words, by
//                        theta ~ U(rot_min, rot_max) degrees about the
//                        segment box center, then re-box to the AABB
//   3. offset_boundaries per region (segments first, then words, each in
//                        index order) draw sigma ~ U(sigma_min, sigma_max)
//                        then add N(0, sigma^2) to x0, y0, x1, y1 in the
//                        order left, top, right, bottom
//
// followed by repair_boxes. All randomness comes from one SeededStream per
// document, so output depends only on (master seed, document id, input).
//
// SeededStream: std::mt19937_64 seeded with
//   splitmix64(fnv1a64(id bytes, fnv1a64(master seed as 8 little-endian bytes)))
// uniform u = (next >> 11) * 2^-53 in [0, 1); Exp(rate) = -log1p(-u) / rate;
// N(0, 1) = sqrt(-2 ln(1 - u1)) * cos(2 pi u2), two uniforms per normal.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vrdeval/core.hpp"
#include "vrdeval/parallel.hpp"

namespace vrdeval {

struct PerturbParams {
  double split_rate = 0.1;
  double rot_min = -5.0;
  double rot_max = 5.0;
  double sigma_min = 5.0;
  double sigma_max = 20.0;

  void check() const {
    if (!(split_rate > 0) || !std::isfinite(split_rate))
      throw std::invalid_argument("split rate must be positive");
    if (!(rot_min <= rot_max)) throw std::invalid_argument("rot_min must not exceed rot_max");
    if (!(0 <= sigma_min && sigma_min <= sigma_max))
      throw std::invalid_argument("need 0 <= sigma_min <= sigma_max");
  }
};

/// Source of the three draw kinds the transforms consume.
template <typename S>
concept DrawStream = requires(S& s, double a, double b) {
  { s.exponential(a) } -> std::convertible_to<double>;
  { s.uniform(a, b) } -> std::convertible_to<double>;
  { s.normal() } -> std::convertible_to<double>;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the substream for one document.
inline std::uint64_t document_seed(std::uint64_t master_seed, std::string_view document_id) {
  char le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<char>((master_seed >> (8 * i)) & 0xff);
  return splitmix64(fnv1a64(document_id, fnv1a64(std::string_view(le, 8))));
}

class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : engine_(seed) {}
  SeededStream(std::uint64_t master_seed, std::string_view document_id)
      : engine_(document_seed(master_seed, document_id)) {}

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double exponential(double rate) { return -std::log1p(-unit()) / rate; }
  double normal() {
    const double u1 = 1.0 - unit();  // (0, 1]
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

static_assert(DrawStream<SeededStream>);

// --------------------------------------------------------------------------
// Geometry

/// Rotates the rectangle about (cx, cy) by `degrees` (counter-clockwise on
/// screen for positive angles, since y grows down) and returns the AABB of
/// the four rotated corners.
inline BoundingBox rotate_box(const BoundingBox& b, double cx, double cy, double degrees) {
  if (degrees == 0.0) return b;
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double xs[2] = {b.x0, b.x1}, ys[2] = {b.y0, b.y1};
  BoundingBox out{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (double x : xs) {
    for (double y : ys) {
      const double dx = x - cx, dy = y - cy;
      const double rx = cx + dx * c + dy * s;
      const double ry = cy - dx * s + dy * c;
      out.x0 = std::min(out.x0, rx);
      out.x1 = std::max(out.x1, rx);
      out.y0 = std::min(out.y0, ry);
      out.y1 = std::max(out.y1, ry);
    }
  }
  return out;
}

/// Number of words in the next chunk for a cutoff draw `c`, capped at what
/// is left.
inline std::size_t chunk_length(double c, std::size_t remaining) {
  const double k = std::max(1.0, std::round(c));
  return k >= static_cast<double>(remaining) ? remaining : static_cast<std::size_t>(k);
}

// --------------------------------------------------------------------------
// Transforms

/// One singleton segment per word, boxed like the word.
inline Document mask_segments(const Document& doc) {
  Document out = doc;
  out.segments.clear();
  out.segments.reserve(doc.words.size());
  for (std::size_t i = 0; i < doc.words.size(); ++i) out.segments.push_back({{i}, doc.words[i].box});
  return out;
}

template <DrawStream S>
Document split_segments(const Document& doc, double rate, S& stream) {
  if (!(rate > 0)) throw std::invalid_argument("split rate must be positive");
  Document out = doc;
  out.segments.clear();
  for (const Segment& seg : doc.segments) {
    std::size_t pos = 0;
    const std::size_t n = seg.word_indices.size();
    while (pos < n) {
      const std::size_t k = chunk_length(stream.exponential(rate), n - pos);
      Segment piece;
      piece.word_indices.assign(seg.word_indices.begin() + static_cast<std::ptrdiff_t>(pos),
                                seg.word_indices.begin() + static_cast<std::ptrdiff_t>(pos + k));
      piece.box = doc.words[piece.word_indices.front()].box;
      for (std::size_t wi : piece.word_indices) piece.box = piece.box.united(doc.words[wi].box);
      out.segments.push_back(std::move(piece));
      pos += k;
    }
  }
  return out;
}

template <DrawStream S>
Document rotate_regions(const Document& doc, double rot_min, double rot_max, S& stream) {
  if (!(rot_min <= rot_max)) throw std::invalid_argument("rot_min must not exceed rot_max");
  Document out = doc;
  for (Segment& seg : out.segments) {
    const double theta = stream.uniform(rot_min, rot_max);
    const double cx = seg.box.center_x(), cy = seg.box.center_y();
    seg.box = rotate_box(seg.box, cx, cy, theta);
    for (std::size_t wi : seg.word_indices)
      out.words[wi].box = rotate_box(out.words[wi].box, cx, cy, theta);
  }
  return out;
}

template <DrawStream S>
Document offset_boundaries(const Document& doc, double sigma_min, double sigma_max, S& stream) {
  if (!(0 <= sigma_min && sigma_min <= sigma_max))
    throw std::invalid_argument("need 0 <= sigma_min <= sigma_max");
  Document out = doc;
  auto jitter = [&](BoundingBox& b) {
    const double sigma = stream.uniform(sigma_min, sigma_max);
    const double left = sigma * stream.normal();
    const double top = sigma * stream.normal();
    const double right = sigma * stream.normal();
    const double bottom = sigma * stream.normal();
    b.x0 += left;
    b.y0 += top;
    b.x1 += right;
    b.y1 += bottom;
  };
  for (Segment& seg : out.segments) jitter(seg.box);
  for (Word& w : out.words) jitter(w.box);
  return out;
}

namespace detail {

// Clamps [lo, hi] into [0, limit]; an inverted interval collapses to a
// 1 px interval around its midpoint, kept inside the page.
inline void repair_interval(double& lo, double& hi, double limit) {
  lo = std::clamp(lo, 0.0, limit);
  hi = std::clamp(hi, 0.0, limit);
  if (lo <= hi) return;
  const double mid = 0.5 * (lo + hi);
  lo = mid - 0.5;
  hi = mid + 0.5;
  if (lo < 0) {
    lo = 0;
    hi = std::min(1.0, limit);
  } else if (hi > limit) {
    hi = limit;
    lo = std::max(0.0, limit - 1.0);
  }
}

inline void repair_box(BoundingBox& b, double width, double height) {
  repair_interval(b.x0, b.x1, width);
  repair_interval(b.y0, b.y1, height);
}

}  // namespace detail

/// Clamps every box to the page and fixes inverted boxes, then grows each
/// segment box just enough to contain its member word centers.
inline Document repair_boxes(const Document& doc) {
  Document out = doc;
  for (Word& w : out.words) detail::repair_box(w.box, out.width, out.height);
  for (Segment& seg : out.segments) {
    detail::repair_box(seg.box, out.width, out.height);
    for (std::size_t wi : seg.word_indices) {
      if (wi >= out.words.size()) continue;
      const BoundingBox& wb = out.words[wi].box;
      const double cx = wb.center_x(), cy = wb.center_y();
      seg.box = {std::min(seg.box.x0, cx), std::min(seg.box.y0, cy), std::max(seg.box.x1, cx),
                 std::max(seg.box.y1, cy)};
    }
  }
  return out;
}

/// The full three-stage perturbation on an explicit stream.
template <DrawStream S>
Document perturb_with(const Document& doc, const PerturbParams& params, S& stream) {
  params.check();
  Document d = split_segments(doc, params.split_rate, stream);
  d = rotate_regions(d, params.rot_min, params.rot_max, stream);
  d = offset_boundaries(d, params.sigma_min, params.sigma_max, stream);
  return repair_boxes(d);
}

inline Document perturb(const Document& doc, const PerturbParams& params,
                        std::uint64_t master_seed) {
  SeededStream stream(master_seed, doc.id);
  return perturb_with(doc, params, stream);
}

inline std::vector<Document> perturb_all(const std::vector<Document>& docs,
                                         const PerturbParams& params, std::uint64_t master_seed,
                                         unsigned threads = 1) {
  params.check();
  return parallel_map(
      docs.size(), [&](std::size_t i) { return perturb(docs[i], params, master_seed); }, threads);
}

inline std::vector<Document> mask_all(const std::vector<Document>& docs, unsigned threads = 1) {
  return parallel_map(docs.size(), [&](std::size_t i) { return mask_segments(docs[i]); }, threads);
}

}  // namespace vrdeval
