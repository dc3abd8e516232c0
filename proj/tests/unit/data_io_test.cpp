/*
 * Copyright 2026 The tiger-eval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tiger/dataset.hpp"
#include "tiger/manifest.hpp"
#include "tiger/report.hpp"

namespace tiger {
namespace {

const char* kScoredLine =
    R"({"image_id": "img1", "candidate": {"id": "c1", "text": "a dog"},)"
    R"( "references": [{"id": "r1", "text": "a dog runs"}], "human_score": 4,)"
    R"( "scale": {"min": 1, "max": 5}})";

const char* kPairLine =
    R"({"image_id": "img1", "candidate_a": {"id": "a", "text": "x"},)"
    R"( "candidate_b": {"id": "b", "text": "y"}, "human_choice": "B", "pair_type": "HM",)"
    R"( "references": [{"id": "r1", "text": "z"}]})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  if (at == std::string::npos) throw std::logic_error("fixture text not found: " + from);
  return s.replace(at, from.size(), to);
}

template <typename Fn>
void expect_dataset_error(const std::string& text, Fn parse, std::size_t line,
                          const std::string& field) {
  std::istringstream in(text);
  try {
    parse(in);
    FAIL() << "accepted: " << text;
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.field(), field) << e.what();
  }
}

auto parse_scored = [](std::istream& in) { return parse_scored_dataset(in); };
auto parse_pairs = [](std::istream& in) { return parse_pair_dataset(in); };

TEST(Dataset, ParsesScoredRecords) {
  std::istringstream in(std::string(kScoredLine) + "\n\n" +
                        replace(replace(kScoredLine, "\"human_score\": 4", "\"human_scores\": [2, 3, 5]"),
                                "\"c1\"", "\"c2\"") +
                        "\n");
  const auto records = parse_scored_dataset(in);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].image_id, "img1");
  EXPECT_EQ(records[0].candidate.id, "c1");
  EXPECT_EQ(records[0].references.at(0).text, "a dog runs");
  EXPECT_EQ(records[0].human_score, 4.0);
  EXPECT_DOUBLE_EQ(records[1].human_score, 10.0 / 3.0);
  EXPECT_EQ(records[1].scale.max, 5.0);
}

TEST(Dataset, ParsesPairRecords) {
  std::istringstream in(kPairLine);
  const auto records = parse_pair_dataset(in);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].human_choice, HumanChoice::kB);
  EXPECT_EQ(records[0].pair_type, PairType::kHM);
  const PairInstance p = records[0].instance();
  EXPECT_EQ(p.candidate_a, "a");
  EXPECT_EQ(p.candidate_b, "b");
}

TEST(Dataset, ScoredValidation) {
  const std::string ok = kScoredLine;
  const std::string second = std::string(kScoredLine) + "\n";
  expect_dataset_error(second + "{not json", parse_scored, 2, "<record>");
  expect_dataset_error("[1, 2]", parse_scored, 1, "<record>");
  expect_dataset_error(replace(ok, "\"image_id\": \"img1\", ", ""), parse_scored, 1, "image_id");
  expect_dataset_error(replace(ok, "\"img1\"", "\"\""), parse_scored, 1, "image_id");
  expect_dataset_error(replace(ok, "\"id\": \"c1\", ", ""), parse_scored, 1, "candidate.id");
  expect_dataset_error(replace(ok, "\"text\": \"a dog\"", "\"text\": 3"), parse_scored, 1,
                       "candidate.text");
  expect_dataset_error(replace(ok, "[{\"id\": \"r1\", \"text\": \"a dog runs\"}]", "[]"),
                       parse_scored, 1, "references");
  expect_dataset_error(
      replace(ok, "{\"id\": \"r1\", \"text\": \"a dog runs\"}",
              "{\"id\": \"r1\", \"text\": \"a\"}, {\"id\": \"r1\", \"text\": \"b\"}"),
      parse_scored, 1, "references[1].id");
  expect_dataset_error(replace(ok, "\"human_score\": 4", "\"human_score\": 7"), parse_scored, 1,
                       "human_score");
  expect_dataset_error(replace(ok, "\"human_score\": 4", "\"human_score\": \"4\""), parse_scored,
                       1, "human_score");
  expect_dataset_error(replace(ok, "\"human_score\": 4, ", ""), parse_scored, 1, "human_score");
  expect_dataset_error(replace(ok, "\"human_score\": 4", "\"human_score\": 4, \"human_scores\": [4]"),
                       parse_scored, 1, "human_score");
  expect_dataset_error(replace(ok, "\"human_score\": 4", "\"human_scores\": [4, 9]"), parse_scored,
                       1, "human_scores[1]");
  expect_dataset_error(replace(ok, "\"max\": 5", "\"max\": 1"), parse_scored, 1, "scale");
}

TEST(Dataset, PairValidation) {
  const std::string ok = kPairLine;
  expect_dataset_error(replace(ok, "\"id\": \"b\"", "\"id\": \"a\""), parse_pairs, 1,
                       "candidate_b.id");
  expect_dataset_error(replace(ok, "\"B\"", "\"C\""), parse_pairs, 1, "human_choice");
  expect_dataset_error(replace(ok, "\"HM\"", "\"XX\""), parse_pairs, 1, "pair_type");
  expect_dataset_error(replace(ok, ", \"references\": [{\"id\": \"r1\", \"text\": \"z\"}]", ""),
                       parse_pairs, 1, "references");
}

TEST(Dataset, MissingFileIsIoError) {
  EXPECT_THROW(load_scored_dataset("/nonexistent/data.jsonl"), IoError);
}

class ManifestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::filesystem::create_directories(dir_ / "t");
    write_tensor(dir_ / "t" / "img.tfv", Matrix(2, 3, std::vector<double>{1, 0, 0, 0, 1, 0}));
    write_tensor(dir_ / "t" / "cap.tfv", Matrix(1, 3, std::vector<double>{1, 1, 0}));
  }

  std::filesystem::path write_manifest(const std::string& text) {
    testing::write_text(dir_ / "manifest.json", text);
    return dir_ / "manifest.json";
  }

  testing::TempDir dir_;
};

TEST_F(ManifestTest, LoadsAndResolvesRelativePaths) {
  const auto path = write_manifest(
      R"({"d": 3, "regions": {"img": "t/img.tfv"}, "words": {"cap": "t/cap.tfv"}})");
  const Manifest m = load_manifest(path);
  EXPECT_EQ(m.dim, 3u);
  EXPECT_EQ(m.regions.at("img"), dir_.path() / "t" / "img.tfv");
  FeatureStore store(m);
  EXPECT_EQ(store.regions("img")->regions(), 2u);
  EXPECT_EQ(store.words("cap")->tokens(), 1u);
  EXPECT_EQ(store.regions("img"), store.regions("img"));
  EXPECT_THROW(store.words("nope"), UsageError);
}

TEST_F(ManifestTest, RejectsDuplicateIds) {
  const auto path = write_manifest(
      R"({"d": 3, "regions": {"img": "t/img.tfv", "img": "t/img.tfv"}, "words": {}})");
  try {
    load_manifest(path);
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate id 'img'"), std::string::npos);
  }
}

TEST_F(ManifestTest, RejectsWrongDimension) {
  const auto path =
      write_manifest(R"({"d": 4, "regions": {"img": "t/img.tfv"}, "words": {}})");
  EXPECT_THROW(load_manifest(path), UsageError);
}

TEST_F(ManifestTest, RejectsMissingTensor) {
  const auto path =
      write_manifest(R"({"d": 3, "regions": {"img": "t/none.tfv"}, "words": {}})");
  EXPECT_THROW(load_manifest(path), IoError);
  EXPECT_NO_THROW(load_manifest(path, false));
}

TEST_F(ManifestTest, RejectsMalformedDocuments) {
  EXPECT_THROW(load_manifest(write_manifest("{")), UsageError);
  EXPECT_THROW(load_manifest(write_manifest(R"({"regions": {}, "words": {}})")), UsageError);
  EXPECT_THROW(load_manifest(write_manifest(R"({"d": 0, "regions": {}, "words": {}})")),
               UsageError);
  EXPECT_THROW(load_manifest(write_manifest(R"({"d": 3, "regions": []})")), UsageError);
  EXPECT_THROW(load_manifest(dir_ / "absent.json"), IoError);
}

TEST_F(ManifestTest, StoreRejectsBadTensorAtLoadTime) {
  Manifest m;
  m.dim = 3;
  testing::write_text(dir_ / "t" / "bad.tfv", "garbage");
  m.regions["bad"] = dir_ / "t" / "bad.tfv";
  FeatureStore store(m);
  EXPECT_THROW(store.regions("bad"), TensorFormatError);
}

TEST(Report, JsonRoundTripIsExact) {
  std::vector<ScoreRow> rows(2);
  rows[0].key = {0, 'a', "img", "c1"};
  rows[0].outcome.breakdown = TigerBreakdown{0.1 + 0.2, 1.0 / 3.0, 1e-17, -0.5, 0.7};
  rows[1].key = {0, 'b', "img", "c2"};
  rows[1].outcome.skip_reason = "degenerate: test";
  std::ostringstream out;
  write_score_report(out, rows, ReportFormat::kJson, {}, {});
  std::istringstream in(out.str());
  const auto cols = read_metric_report(in, "report");
  ASSERT_EQ(cols.size(), 3u);
  EXPECT_EQ(cols[0].metric, "rrs");
  EXPECT_EQ(*cols[0].values.at({0, 'a'}), 0.1 + 0.2);
  EXPECT_EQ(*cols[1].values.at({0, 'a'}), 1.0 / 3.0);
  EXPECT_FALSE(cols[2].values.at({0, 'b'}));
}

TEST(Report, CsvLayout) {
  std::vector<ScoreRow> rows(1);
  rows[0].key = {3, std::nullopt, "img,1", "c\"1"};
  rows[0].outcome.skip_reason = "no references";
  std::ostringstream out;
  write_score_report(out, rows, ReportFormat::kCsv, {}, {});
  EXPECT_EQ(out.str(),
            "index,slot,image_id,caption_id,status,rrs,wds,d_kl,d_rel,tiger,reason\n"
            "3,,\"img,1\",\"c\"\"1\",skipped,,,,,,no references\n");
}

TEST(Report, BaselineRoundTrip) {
  std::vector<BaselineRow> rows(1);
  rows[0].key = {0, std::nullopt, "img", "c"};
  rows[0].bleu1 = 0.5;
  rows[0].cider = 2.25;
  std::ostringstream out;
  write_baseline_report(out, rows, ReportFormat::kJson);
  std::istringstream in(out.str());
  const auto cols = read_metric_report(in, "b");
  ASSERT_EQ(cols.size(), 4u);
  EXPECT_EQ(*cols[0].values.at({0, '\0'}), 0.5);
  EXPECT_EQ(*cols[3].values.at({0, '\0'}), 2.25);
}

TEST(Report, RejectsUnknownInput) {
  std::istringstream csv("index,slot\n");
  EXPECT_THROW(read_metric_report(csv, "x"), UsageError);
  std::istringstream other(R"({"kind": "groundings"})");
  EXPECT_THROW(read_metric_report(other, "x"), UsageError);
  EXPECT_THROW(parse_report_format("xml"), UsageError);
}

}  // namespace
}  // namespace tiger
