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

#include <cstdlib>
#include <sstream>

#include "fixtures.hpp"
#include "vrdeval/cli.hpp"

namespace vrdeval {
namespace {

namespace fs = std::filesystem;
using cli::ojson;

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return vrdeval::detail::read_file(p); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::temp_dir("cli");
    data_ = (dir_ / "data.json").string();
    const Result r = run({"import-funsd", "--dataset", VRDEVAL_FIXTURE_DIR, "--out", data_});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Gold annotations written as SER predictions.
  std::string gold_predictions() const {
    const Dataset ds = parse_dataset(data_);
    PredictionSet p;
    for (const auto& d : ds.splits[0].documents) p.documents.push_back({d.id, d.entities, std::nullopt, std::nullopt});
    const std::string file = path("gold_preds.json");
    write_file(file, serialize_predictions(p));
    return file;
  }

  fs::path dir_;
  std::string data_;
};

TEST_F(CliTest, ImportWritesValidCanonicalFile) {
  const Result v = run({"validate", "--dataset", data_});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "ok: 3 document(s) valid\n");
  EXPECT_EQ(serialize_dataset(parse_dataset(data_)), slurp(data_));

  const Result train = run({"import-funsd", "--dataset", VRDEVAL_FIXTURE_DIR, "--split", "train"});
  EXPECT_EQ(train.code, 0);
  EXPECT_EQ(parse_dataset_text(train.out).splits[0].documents.size(), 2u);
  EXPECT_NE(train.err.find("warning:"), std::string::npos);
}

TEST_F(CliTest, StatsReport) {
  const Result r = run({"stats", "--dataset", data_});
  ASSERT_EQ(r.code, 0) << r.err;
  const ojson j = ojson::parse(r.out);
  EXPECT_EQ(j["command"], "stats");
  EXPECT_EQ(j["tool_version"], cli::kToolVersion);
  EXPECT_EQ(j["stats"]["words"], 35);
  EXPECT_EQ(j["stats"]["entities"], 18);
  EXPECT_EQ(j["stats"]["complex_entities"], 2);
  EXPECT_EQ(j["dataset_fingerprint"], fingerprint(parse_dataset(data_), parse_dataset(data_).splits[0]));
}

TEST_F(CliTest, MarkdownFormat) {
  const Result r = run({"stats", "--dataset", data_, "--format", "markdown"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("# stats\n\n| key | value |\n", 0), 0u);
  EXPECT_NE(r.out.find("| stats.words | 35 |"), std::string::npos);
}

TEST_F(CliTest, EvalSerOnGoldIsPerfect) {
  const Result r = run({"eval-ser", "--dataset", data_, "--predictions", gold_predictions()});
  ASSERT_EQ(r.code, 0) << r.err;
  const ojson j = ojson::parse(r.out);
  EXPECT_EQ(j["metrics"]["ser"]["f1"], 1.0);
  EXPECT_EQ(j["metrics"]["ser"]["true_positives"], 18);
  EXPECT_TRUE(j.contains("predictions_fingerprint"));
}

TEST_F(CliTest, BaselineThenEvaluate) {
  const std::string ser = path("ser.json"), el = path("el.json");
  ASSERT_EQ(run({"baseline", "--dataset", data_, "--task", "ser", "--out", ser}).code, 0);
  ASSERT_EQ(run({"baseline", "--dataset", data_, "--task", "el", "--out", el}).code, 0);
  const Result s = run({"eval-ser", "--dataset", data_, "--predictions", ser});
  const Result e = run({"eval-el", "--dataset", data_, "--predictions", el});
  ASSERT_EQ(s.code, 0) << s.err;
  ASSERT_EQ(e.code, 0) << e.err;
  const double f1 = ojson::parse(s.out)["metrics"]["ser"]["f1"];
  EXPECT_GT(f1, 0.0);
  EXPECT_LE(f1, 1.0);
  EXPECT_EQ(run({"baseline", "--dataset", data_, "--task", "re"}).code, cli::exit_code::kUsage);
}

TEST_F(CliTest, PerturbIsReproducible) {
  const std::string a = path("a.json"), b = path("b.json"), c = path("c.json");
  ASSERT_EQ(run({"perturb", "--dataset", data_, "--seed", "42", "--threads", "1", "--out", a}).code, 0);
  ASSERT_EQ(run({"perturb", "--dataset", data_, "--seed", "42", "--threads", "4", "--out", b}).code, 0);
  ASSERT_EQ(run({"perturb", "--dataset", data_, "--seed", "43", "--out", c}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
  EXPECT_EQ(run({"validate", "--dataset", a}).code, 0);
}

TEST_F(CliTest, ReplayFromProvenance) {
  const std::string first = path("first.json");
  ASSERT_EQ(run({"perturb", "--dataset", data_, "--seed", "7", "--rot-min", "-2", "--rot-max", "3",
                 "--sigma-min", "1", "--sigma-max", "4", "--split-rate", "0.5", "--out", first})
                .code,
            0);
  const ojson prov = ojson::parse(parse_dataset(first).provenance);
  EXPECT_EQ(prov["transform"], "perturb");
  EXPECT_EQ(prov["source_fingerprint"], fingerprint(parse_dataset(data_), parse_dataset(data_).splits[0]));
  const auto& p = prov["params"];
  auto num = [](const ojson& v) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  };
  const std::string again = path("again.json");
  ASSERT_EQ(run({"perturb", "--dataset", data_, "--seed", std::to_string(prov["master_seed"].get<std::uint64_t>()),
                 "--rot-min", num(p["rot_min"]), "--rot-max", num(p["rot_max"]), "--sigma-min",
                 num(p["sigma_min"]), "--sigma-max", num(p["sigma_max"]), "--split-rate",
                 num(p["split_rate"]), "--out", again})
                .code,
            0);
  EXPECT_EQ(slurp(first), slurp(again));

  // A second transform nests the first one's provenance.
  const Result masked = run({"mask-segments", "--dataset", first});
  ASSERT_EQ(masked.code, 0);
  const ojson nested = ojson::parse(parse_dataset_text(masked.out).provenance);
  EXPECT_EQ(nested["transform"], "mask-segments");
  EXPECT_EQ(nested["source"]["master_seed"], 7);
}

TEST_F(CliTest, FairnessWithComputedAndFileSubset) {
  const std::string preds = gold_predictions();
  const Result computed = run({"fairness", "--dataset", data_, "--predictions", preds});
  ASSERT_EQ(computed.code, 0) << computed.err;
  const std::string subset = path("subset.json");
  ASSERT_EQ(run({"fairness-subset", "--dataset", data_, "--out", subset}).code, 0);
  const ojson s = ojson::parse(slurp(subset));
  EXPECT_EQ(s["complex"]["count"], 2);
  const Result from_file =
      run({"fairness", "--dataset", data_, "--predictions", preds, "--subset", subset});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(ojson::parse(computed.out)["metrics"], ojson::parse(from_file.out)["metrics"]);
  EXPECT_EQ(ojson::parse(computed.out)["metrics"]["recall_complex"]["recall"], 1.0);
}

TEST_F(CliTest, FairnessOnEmptySubsetWarns) {
  const std::string simple = path("simple.json");
  write_file(simple, serialize_dataset(testing::dataset_of({testing::form_doc()})));
  const std::string preds = path("p.json");
  write_file(preds, R"({"task": "ser", "documents": []})");
  const Result r = run({"fairness", "--dataset", simple, "--predictions", preds});
  ASSERT_EQ(r.code, 0) << r.err;
  const ojson j = ojson::parse(r.out);
  EXPECT_EQ(j["metrics"]["recall_complex"]["empty_subset"], true);
  EXPECT_EQ(j["metrics"]["recall_complex"]["recall"], 0.0);
  EXPECT_EQ(j["warnings"].size(), 1u);
}

TEST_F(CliTest, DiagnoseReport) {
  const Result r = run({"diagnose", "--dataset", data_});
  ASSERT_EQ(r.code, 0);
  const ojson j = ojson::parse(r.out);
  EXPECT_EQ(j["diagnostics"]["entity_layout_uniformity"]["value"], 1.0);
  EXPECT_EQ(j["diagnostics"]["boundary_alignment"]["value"], 1.0);
}

TEST_F(CliTest, NamedSplits) {
  const std::string test_file = path("test.json");
  ASSERT_EQ(run({"import-funsd", "--dataset", VRDEVAL_FIXTURE_DIR, "--split", "test", "--out", test_file}).code, 0);
  const Result two = run({"stats", "--dataset", "all=" + data_, "--dataset", "test=" + test_file});
  EXPECT_EQ(two.code, cli::exit_code::kUsage);
  const Result picked = run({"stats", "--dataset", "all=" + data_, "--dataset", "test=" + test_file,
                             "--split", "test"});
  ASSERT_EQ(picked.code, 0) << picked.err;
  EXPECT_EQ(ojson::parse(picked.out)["stats"]["samples"], 1);
  EXPECT_EQ(run({"stats", "--dataset", data_, "--split", "dev"}).code, cli::exit_code::kUsage);
}

TEST_F(CliTest, ExitCodes) {
  using namespace cli::exit_code;
  // 1: validation failure, one line per violation.
  Document bad = testing::form_doc();
  bad.entities[2].end = 9;
  bad.relations.push_back({"link", 0, 0});
  const std::string broken = path("broken.json");
  write_file(broken, serialize_dataset(testing::dataset_of({bad})));
  const Result v = run({"validate", "--dataset", broken});
  EXPECT_EQ(v.code, kValidationFailed);
  EXPECT_NE(v.out.find("\tentity-span\t"), std::string::npos);
  EXPECT_NE(v.out.find("\trelation-self\t"), std::string::npos);

  // 2: usage.
  EXPECT_EQ(run({}).code, kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run({"perturb", "--dataset", data_, "--rot-min", "9"}).code, kUsage);

  // 3: parse, schema or invariant error.
  const std::string garbage = path("garbage.json");
  write_file(garbage, "{ not json");
  EXPECT_EQ(run({"stats", "--dataset", garbage}).code, kParse);
  EXPECT_EQ(run({"stats", "--dataset", broken}).code, kParse);
  EXPECT_EQ(run({"eval-ser", "--dataset", data_, "--predictions", garbage}).code, kParse);

  // 4: scoring error.
  const std::string dangling = path("dangling.json");
  write_file(dangling, R"({"task": "ser", "documents": [{"id": "nope", "entities": []}]})");
  EXPECT_EQ(run({"eval-ser", "--dataset", data_, "--predictions", dangling}).code, kScoring);

  // 5: I/O.
  EXPECT_EQ(run({"stats", "--dataset", path("missing.json")}).code, kIo);
  EXPECT_EQ(run({"import-funsd", "--dataset", path("no-such-dir")}).code, kIo);
}

TEST(CliBinary, RunsAsProcess) {
  const std::string cmd = std::string("\"") + VRDEVAL_CLI_PATH + "\" --version > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  const std::string bad = std::string("\"") + VRDEVAL_CLI_PATH + "\" stats 2> /dev/null";
  const int status = std::system(bad.c_str());
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), cli::exit_code::kUsage);
}

}  // namespace
}  // namespace vrdeval
