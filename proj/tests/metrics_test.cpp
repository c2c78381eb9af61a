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

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vrdeval/metrics.hpp"

namespace vrdeval {
namespace {

using Tags = std::vector<std::string>;
using Spans = std::vector<Entity>;

TEST(DecodeBio, TextbookSequence) {
  EXPECT_EQ(decode_bio({"B-q", "I-q", "O", "B-a", "I-a"}), (Spans{{"q", 0, 2}, {"a", 3, 5}}));
}

TEST(DecodeBio, OrphanInsideOpensSpan) {
  EXPECT_EQ(decode_bio({"O", "I-q"}), (Spans{{"q", 1, 2}}));
}

TEST(DecodeBio, TypeSwitchClosesAndReopens) {
  EXPECT_EQ(decode_bio({"B-q", "I-a"}), (Spans{{"q", 0, 1}, {"a", 1, 2}}));
}

TEST(DecodeBio, BeginAlwaysStartsNewSpan) {
  EXPECT_EQ(decode_bio({"B-q", "B-q", "I-q"}), (Spans{{"q", 0, 1}, {"q", 1, 3}}));
}

TEST(DecodeBio, RejectsUnknownAndMalformedTags) {
  const std::vector<std::string> labels = {"answer"};
  EXPECT_THROW(decode_bio({"I-question"}, &labels), ScoringError);
  EXPECT_THROW(decode_bio({"X-answer"}), ScoringError);
  EXPECT_THROW(decode_bio({"B-"}), ScoringError);
  EXPECT_NO_THROW(decode_bio({"B-answer", "O"}, &labels));
}

TEST(EncodeBio, Examples) {
  EXPECT_EQ(encode_bio({{"q", 0, 2}}, 3), (Tags{"B-q", "I-q", "O"}));
  EXPECT_EQ(encode_bio({}, 2), (Tags{"O", "O"}));
  EXPECT_THROW(encode_bio({{"q", 0, 2}, {"a", 1, 3}}, 3), ScoringError);
  EXPECT_THROW(encode_bio({{"q", 2, 4}}, 3), ScoringError);
}

TEST(EncodeBio, RoundTripsRandomDisjointSpans) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> types = {"question", "answer", "header", "other"};
  for (int iter = 0; iter < 2000; ++iter) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 30)(rng);
    Spans spans;
    for (std::size_t pos = 0; pos < n;) {
      const std::size_t gap = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
      const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
      if (pos + gap + len > n) break;
      spans.push_back({types[rng() % types.size()], pos + gap, pos + gap + len});
      pos += gap + len;
    }
    ASSERT_EQ(decode_bio(encode_bio(spans, n)), spans);
  }
}

TEST(PRF, ZeroDenominatorConventions) {
  PRF p;
  EXPECT_EQ(p.precision(), 0.0);
  EXPECT_EQ(p.recall(), 0.0);
  EXPECT_EQ(p.f1(), 0.0);
  p.gold_count = 3;
  EXPECT_EQ(p.f1(), 0.0);
}

Split split_with(std::vector<Document> docs) { return {"all", std::move(docs)}; }

PredictionSet ser_preds(const std::string& id, Spans spans) {
  PredictionSet p;
  p.documents.push_back({id, std::move(spans), std::nullopt, std::nullopt});
  return p;
}

PredictionSet el_preds(const std::string& id, std::vector<RelationTriplet> rels) {
  PredictionSet p;
  p.task = Task::kEl;
  p.documents.push_back({id, std::nullopt, std::nullopt, std::move(rels)});
  return p;
}

Document doc_with(Spans ents, std::size_t words = 10) {
  Document d;
  d.id = "d";
  d.width = d.height = 100;
  for (std::size_t i = 0; i < words; ++i)
    d.words.push_back({"w", {double(i), 0, double(i) + 1, 1}});
  d.entities = std::move(ents);
  return d;
}

TEST(SerPrf, IdentityPredictions) {
  const Document d = doc_with({{"q", 0, 2}, {"a", 3, 5}});
  const PRF p = ser_prf(split_with({d}), ser_preds("d", d.entities));
  EXPECT_EQ(p.precision(), 1.0);
  EXPECT_EQ(p.recall(), 1.0);
  EXPECT_EQ(p.f1(), 1.0);
}

TEST(SerPrf, PartialMatch) {
  const Document d = doc_with({{"q", 0, 2}, {"a", 3, 5}, {"h", 6, 7}});
  const PRF p = ser_prf(split_with({d}), ser_preds("d", {{"q", 0, 2}, {"a", 3, 4}, {"o", 8, 9}}));
  EXPECT_EQ(p.true_positives, 1u);
  EXPECT_DOUBLE_EQ(p.precision(), 1.0 / 3);
  EXPECT_DOUBLE_EQ(p.recall(), 1.0 / 3);
  EXPECT_DOUBLE_EQ(p.f1(), 1.0 / 3);
}

TEST(SerPrf, EmptyPredictionsAndMissingRecords) {
  const Document d = doc_with({{"q", 0, 2}});
  const PRF p = ser_prf(split_with({d}), ser_preds("d", {}));
  EXPECT_EQ(p.precision(), 0.0);
  EXPECT_EQ(p.recall(), 0.0);
  EXPECT_EQ(p.f1(), 0.0);
  const PRF missing = ser_prf(split_with({d}), PredictionSet{});
  EXPECT_EQ(missing.gold_count, 1u);
  EXPECT_EQ(missing.recall(), 0.0);
}

TEST(SerPrf, DuplicatePredictionsCountOnce) {
  const Document d = doc_with({{"q", 0, 2}});
  const PRF p = ser_prf(split_with({d}), ser_preds("d", {{"q", 0, 2}, {"q", 0, 2}}));
  EXPECT_EQ(p.true_positives, 1u);
  EXPECT_EQ(p.predicted_count, 1u);
}

TEST(SerPrf, TagFormDecodesFirst) {
  const Document d = doc_with({{"q", 0, 2}, {"a", 3, 5}}, 5);
  PredictionSet p;
  p.documents.push_back({"d", std::nullopt, Tags{"B-q", "I-q", "O", "B-a", "I-a"}, std::nullopt});
  EXPECT_EQ(ser_prf(split_with({d}), p).f1(), 1.0);
  p.documents[0].tags->pop_back();
  EXPECT_THROW(ser_prf(split_with({d}), p), ScoringError);
}

TEST(SerPrf, DanglingDocumentId) {
  EXPECT_THROW(ser_prf(split_with({doc_with({})}), ser_preds("nope", {})), ScoringError);
}

TEST(ElPrf, DirectionSensitive) {
  Document d = doc_with({{"q", 0, 1}, {"a", 1, 2}, {"a", 2, 3}});
  d.relations = {{"link", 0, 1}, {"link", 0, 2}};
  const PRF p = el_prf(split_with({d}), el_preds("d", {{"link", 0, 1}, {"link", 2, 0}}));
  EXPECT_EQ(p.true_positives, 1u);
  EXPECT_DOUBLE_EQ(p.precision(), 0.5);
  EXPECT_DOUBLE_EQ(p.recall(), 0.5);
  EXPECT_DOUBLE_EQ(p.f1(), 0.5);
  EXPECT_EQ(el_prf(split_with({d}), el_preds("d", d.relations)).f1(), 1.0);
}

TEST(ElPrf, EmptyGoldAndPredictions) {
  const PRF p = el_prf(split_with({doc_with({{"q", 0, 1}})}), el_preds("d", {}));
  EXPECT_EQ(p.true_positives + p.predicted_count + p.gold_count, 0u);
  EXPECT_EQ(p.f1(), 0.0);
}

TEST(ElPrf, IndexOutOfRange) {
  EXPECT_THROW(el_prf(split_with({doc_with({{"q", 0, 1}})}), el_preds("d", {{"link", 0, 4}})),
               ScoringError);
}

TEST(SubsetRecall, Examples) {
  const Document d = doc_with({{"q", 0, 1}, {"a", 1, 2}, {"q", 2, 3}, {"a", 3, 4}, {"h", 5, 6}});
  const auto preds = ser_preds("d", {{"q", 0, 1}, {"a", 1, 2}, {"q", 2, 3}, {"a", 3, 5}});
  const Split s = split_with({d});

  const SubsetRecall r = subset_recall(s, preds, {{"d", {0, 1, 2, 3}}});
  EXPECT_EQ(r.total, 4u);
  EXPECT_EQ(r.recalled, 3u);
  EXPECT_DOUBLE_EQ(r.recall(), 0.75);

  const SubsetRecall all = subset_recall(s, preds, {{"d", {0, 1, 2, 3, 4}}});
  EXPECT_DOUBLE_EQ(all.recall(), ser_prf(s, preds).recall());

  const SubsetRecall empty = subset_recall(s, preds, {});
  EXPECT_TRUE(empty.empty_subset);
  EXPECT_EQ(empty.recall(), 0.0);

  EXPECT_THROW(subset_recall(s, preds, {{"d", {9}}}), ScoringError);
}

struct RandomPair {
  Document gold;
  PredictionRecord pred;
};

// Gold document plus a prediction that shares some spans and triplets.
RandomPair random_pair(std::mt19937_64& rng, const std::string& id) {
  RandomPair rp;
  rp.gold = testing::random_document(rng, id);
  rp.pred.id = id;
  rp.pred.entities.emplace();
  rp.pred.relations.emplace();
  const std::size_t n = rp.gold.words.size();
  const std::size_t e = rp.gold.entities.size();
  for (const auto& ent : rp.gold.entities) {
    const auto roll = rng() % 4;
    if (roll == 0) continue;
    Entity copy = ent;
    if (roll == 2) copy.etype = testing::labels()[rng() % 4];
    if (roll == 3 && copy.end < n) ++copy.end;
    rp.pred.entities->push_back(copy);
    if (rng() % 6 == 0) rp.pred.entities->push_back(copy);
  }
  for (const auto& t : rp.gold.relations)
    if (rng() % 3) rp.pred.relations->push_back(rng() % 4 ? t : RelationTriplet{t.rtype, t.object, t.subject});
  if (e >= 2)
    for (int k = 0; k < 3; ++k) {
      RelationTriplet t{rng() % 2 ? "link" : "kv", rng() % e, rng() % e};
      if (t.subject != t.object) rp.pred.relations->push_back(t);
    }
  return rp;
}

TEST(Oracle, MatchesBruteForceOnRandomPairs) {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 1000; ++iter) {
    RandomPair rp = random_pair(rng, "doc");
    PredictionSet preds;
    preds.documents.push_back(rp.pred);
    const PRF ser = ser_prf(split_with({rp.gold}), preds);
    const auto want = oracle::ser(rp.gold.entities, *rp.pred.entities);
    ASSERT_EQ(ser.true_positives, want.tp);
    ASSERT_EQ(ser.predicted_count, want.predicted);
    ASSERT_EQ(ser.gold_count, want.gold);
    const PRF el = el_prf(split_with({rp.gold}), preds);
    const auto want_el = oracle::el(rp.gold.relations, *rp.pred.relations);
    ASSERT_EQ(el.true_positives, want_el.tp);
    ASSERT_EQ(el.predicted_count, want_el.predicted);
    ASSERT_EQ(el.gold_count, want_el.gold);
  }
}

TEST(Properties, SwapSymmetryMonotonicityAndPooling) {
  std::mt19937_64 rng(29);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<Document> golds;
    PredictionSet preds;
    for (int k = 0; k < 3; ++k) {
      RandomPair rp = random_pair(rng, "d" + std::to_string(k));
      golds.push_back(rp.gold);
      preds.documents.push_back(rp.pred);
    }
    const Split split = split_with(golds);
    std::vector<PRF> per_doc;
    const PRF total = ser_prf(split, preds, nullptr, &per_doc);

    PRF pooled;
    for (const auto& p : per_doc) pooled += p;
    ASSERT_EQ(pooled, total);

    // Swap gold and predictions.
    std::vector<Document> swapped_gold = golds;
    PredictionSet swapped_preds;
    for (std::size_t k = 0; k < golds.size(); ++k) {
      swapped_gold[k].entities = *preds.documents[k].entities;
      swapped_gold[k].relations.clear();
      swapped_preds.documents.push_back({golds[k].id, golds[k].entities, std::nullopt, std::nullopt});
    }
    const PRF sw = ser_prf(split_with(swapped_gold), swapped_preds);
    ASSERT_DOUBLE_EQ(sw.precision(), total.recall());
    ASSERT_DOUBLE_EQ(sw.recall(), total.precision());
    ASSERT_DOUBLE_EQ(sw.f1(), total.f1());

    // One extra exact match never lowers recall; one extra miss never
    // raises precision.
    if (!golds[0].entities.empty()) {
      PredictionSet more = preds;
      more.documents[0].entities->push_back(golds[0].entities.front());
      ASSERT_GE(ser_prf(split, more).recall(), total.recall());
    }
    PredictionSet miss = preds;
    miss.documents[0].entities->push_back({"no-such-type", 0, 1});
    ASSERT_LE(ser_prf(split, miss).precision(), total.precision());
  }
}

}  // namespace
}  // namespace vrdeval
