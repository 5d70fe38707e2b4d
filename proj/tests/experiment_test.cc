// Copyright 2026 The Stitch Authors.
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

#include "stitch/experiment.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace stitch {
namespace {

using nlohmann::json;
using testing::Labels;

json PaceDoc() {
  return json::parse(R"({
    "v": 1,
    "source": {"sbm": {"n": 120, "K": 3, "rho_a": 0.3, "r": 0.2}},
    "method": {"pace": {
      "T": 20,
      "sampler": {"scheme": "random_m", "m": 50},
      "tau": {"theta": 0.4},
      "weights": "subgraph_size",
      "recovery": {"method": "projection_kmeans", "s": 12}
    }},
    "base": {"name": "spectral_adj"},
    "seeds": [3, 4],
    "workers": 2
  })");
}

std::string Error(const json& doc) {
  absl::StatusOr<ExperimentConfig> c = ParseExperimentConfig(doc);
  EXPECT_FALSE(c.ok());
  EXPECT_EQ(c.status().code(), absl::StatusCode::kInvalidArgument);
  return std::string(c.status().message());
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

TEST(ConfigTest, ParsesPaceConfig) {
  ExperimentConfig c = *ParseExperimentConfig(PaceDoc());
  const SbmSource& sbm = std::get<SbmSource>(c.source);
  EXPECT_EQ(sbm.n, 120);
  EXPECT_EQ(sbm.K, 3);
  EXPECT_EQ(c.method, Method::kPace);
  EXPECT_EQ(c.pace.T, 20);
  EXPECT_EQ(c.pace.sampler.m, 50);
  EXPECT_EQ(c.pace.tau_mode, TauMode::kFractionOfExpected);
  EXPECT_EQ(c.pace.theta, 0.4);
  EXPECT_EQ(c.pace.weights, WeightScheme::kSubgraphSize);
  EXPECT_EQ(c.pace.recovery.method, RecoveryMethod::kProjectionKMeans);
  EXPECT_EQ(c.pace.recovery.s, 12);
  EXPECT_EQ(c.base.name, "spectral_adj");
  EXPECT_EQ(c.seeds, (std::vector<uint64_t>{3, 4}));
  EXPECT_EQ(c.workers, 2);
}

TEST(ConfigTest, ParsesGaleConfig) {
  json doc = PaceDoc();
  doc["method"] = json::parse(R"({"gale": {
      "T": 10, "sampler": {"scheme": "h_hop", "h": 2, "roots": "degree_quantile",
                           "quantile": 0.3},
      "theta": 0.3, "n_traversals": 3, "match_target": "previous", "m1": 4,
      "lsh": {"bands": 5, "bits": 3}}})");
  ExperimentConfig c = *ParseExperimentConfig(doc);
  EXPECT_EQ(c.method, Method::kGale);
  EXPECT_EQ(c.gale.sampler.scheme, SamplerScheme::kHHop);
  EXPECT_EQ(c.gale.sampler.roots, RootSelection::kDegreeQuantile);
  EXPECT_EQ(c.gale.n_traversals, 3);
  EXPECT_EQ(c.gale.match_target, MatchTarget::kPrevious);
  EXPECT_EQ(*c.gale.m1, 4);
  EXPECT_TRUE(c.gale.use_lsh);
  EXPECT_EQ(c.gale.lsh_bands, 5);
  EXPECT_EQ(c.gale.lsh_bits, 3);
}

TEST(ConfigTest, ShippedConfigsParse) {
  for (const char* name : {"sbm_n1000_pace.json", "sbm_n1000_gale.json"}) {
    absl::StatusOr<ExperimentConfig> c =
        LoadExperimentConfig(std::string(STITCH_SOURCE_DIR) + "/configs/" + name);
    EXPECT_TRUE(c.ok()) << name << ": " << c.status();
  }
}

TEST(ConfigTest, ErrorsNameTheField) {
  json doc = PaceDoc();
  doc["method"]["pace"]["bogus"] = 1;
  EXPECT_NE(Error(doc).find("/method/pace/bogus"), std::string::npos);

  doc = PaceDoc();
  doc["source"]["sbm"]["n"] = "many";
  EXPECT_NE(Error(doc).find("/source/sbm/n"), std::string::npos);

  doc = PaceDoc();
  doc["method"]["pace"]["sampler"]["scheme"] = "snowball";
  EXPECT_NE(Error(doc).find("/method/pace/sampler/scheme"), std::string::npos);

  doc = PaceDoc();
  doc["method"]["pace"]["tau"]["theta"] = 1.5;
  EXPECT_NE(Error(doc).find("theta"), std::string::npos);

  doc = PaceDoc();
  doc["seeds"] = json::array({1, -2});
  EXPECT_NE(Error(doc).find("/seeds/1"), std::string::npos);

  doc = PaceDoc();
  doc.erase("base");
  EXPECT_NE(Error(doc).find("/base"), std::string::npos);

  doc = PaceDoc();
  doc["v"] = 2;
  EXPECT_NE(Error(doc).find("/v"), std::string::npos);

  doc = PaceDoc();
  doc["base"]["name"] = "sdp";
  EXPECT_NE(Error(doc).find("/base"), std::string::npos);
}

TEST(ConfigTest, RelativePathsResolveAgainstConfigDir) {
  json doc = PaceDoc();
  doc["source"] = json::parse(R"({"edge_list": {"path": "g.txt", "labels": "l.txt"}})");
  doc["output"] = "out.csv";
  ExperimentConfig c = *ParseExperimentConfig(doc, "/data/run");
  const EdgeListSource& el = std::get<EdgeListSource>(c.source);
  EXPECT_EQ(el.path, "/data/run/g.txt");
  EXPECT_EQ(*el.labels, "/data/run/l.txt");
  EXPECT_EQ(c.output, "/data/run/out.csv");

  doc["source"] = json::parse(R"({"edge_list": {"path": "g.txt"}})");
  EXPECT_NE(Error(doc).find("/source/edge_list/K"), std::string::npos);
}

TEST(EvaluateTest, HalvesDeltaAndIgnoresLabelNames) {
  Rng rng = MakeRng(1);
  std::vector<int> truth = testing::RandomLabels(60, 3, rng);
  std::vector<int> est = truth;
  for (int i = 0; i < 60; i += 7) est[i] = (est[i] + 1) % 3;
  Metrics m = *Evaluate(Labels(est, 3), Labels(truth, 3));
  EXPECT_DOUBLE_EQ(*m.misclustered_fraction * 2, *m.delta);
  EXPECT_DOUBLE_EQ(m.misclustered_fraction_extended * 2, m.delta_extended);
  EXPECT_DOUBLE_EQ(*m.delta, m.delta_extended);
  EXPECT_GT(*m.tilde_delta, 0.0);

  std::vector<int> renamed(60);
  for (int i = 0; i < 60; ++i) renamed[i] = (truth[i] + 2) % 3;
  Metrics zero = *Evaluate(Labels(renamed, 3), Labels(truth, 3));
  EXPECT_EQ(*zero.delta, 0.0);
  EXPECT_EQ(*zero.tilde_delta, 0.0);
}

TEST(EvaluateTest, SpuriousLabelOnlyHasExtendedMetric) {
  std::vector<int> truth = testing::BlockLabels(20, 2);
  std::vector<int> est = truth;
  est[0] = 2;
  Metrics m = *Evaluate(Labels(est, 3), Labels(truth, 2));
  EXPECT_FALSE(m.delta.has_value());
  EXPECT_FALSE(m.misclustered_fraction.has_value());
  EXPECT_DOUBLE_EQ(m.delta_extended, 0.1);
  EXPECT_DOUBLE_EQ(m.misclustered_fraction_extended, 0.05);
}

TEST(ChatBinaryTest, RoundTripAndSize) {
  Rng rng = MakeRng(2);
  Matrix chat(7, 7);
  for (double& v : chat.data()) v = Uniform01(rng);
  std::stringstream buf;
  ASSERT_TRUE(WriteChatBinary(chat, buf).ok());
  EXPECT_EQ(buf.str().size(), 8u + 49 * 8);
  Matrix back = *ReadChatBinary(buf);
  EXPECT_EQ(back.rows(), 7u);
  for (std::size_t k = 0; k < chat.data().size(); ++k) {
    EXPECT_EQ(back.data()[k], chat.data()[k]);
  }

  std::stringstream zero;
  ASSERT_TRUE(WriteChatBinary(Matrix(3, 3), zero).ok());
  const std::string bytes = zero.str();
  ASSERT_EQ(bytes.size(), 80u);
  EXPECT_EQ(bytes[0], 3);
  for (std::size_t k = 1; k < bytes.size(); ++k) EXPECT_EQ(bytes[k], 0);

  std::stringstream truncated(bytes.substr(0, 40));
  EXPECT_FALSE(ReadChatBinary(truncated).ok());
  EXPECT_FALSE(WriteChatBinary(Matrix(2, 3), zero).ok());
}

TEST(CompactLabelsTest, MapsInValueOrder) {
  std::vector<int64_t> raw = {10, -4, 10, 7};
  MembershipMatrix z = CompactLabels(raw);
  EXPECT_EQ(z.K(), 3);
  EXPECT_EQ(std::vector<int>(z.labels().begin(), z.labels().end()),
            (std::vector<int>{2, 0, 2, 1}));
}

std::vector<std::vector<std::string>> ParseCsv(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  for (absl::string_view line : absl::StrSplit(csv, '\n', absl::SkipEmpty())) {
    rows.push_back(absl::StrSplit(line, ','));
  }
  return rows;
}

TEST(RunExperimentTest, BaseOnlyOnEdgeList) {
  // Two 6-cliques (ids 100..105 and 200..205), a pendant node 300 and a
  // separate edge 400-401.
  std::string edges, labels;
  for (int c : {100, 200}) {
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) edges += std::to_string(c + i) + " " + std::to_string(c + j) + "\n";
  }
  edges += "100 200\n105 300\n400 401\n401 400\n";
  for (int v = 0; v <= 401; ++v) {
    labels += std::to_string(v >= 200 && v < 300 ? 1 : 0) + "\n";
  }
  WriteFile(TempPath("cliques.txt"), edges);
  WriteFile(TempPath("cliques_labels.txt"), labels);
  json doc = json::parse(R"({
    "v": 1,
    "source": {"edge_list": {"path": "cliques.txt", "labels": "cliques_labels.txt",
                             "K": 2, "drop_leaves": true}},
    "method": {"base_only": {}},
    "base": {"name": "spectral_adj"},
    "seeds": [1]
  })");
  ExperimentConfig c = *ParseExperimentConfig(doc, ::testing::TempDir());
  absl::StatusOr<RunReport> report = RunExperiment(c);
  ASSERT_TRUE(report.ok()) << report.status();
  ASSERT_EQ(report->rows.size(), 1u);
  EXPECT_EQ(report->rows[0].n, 12);
  EXPECT_EQ(*report->rows[0].metrics->delta, 0.0);

  std::vector<std::vector<std::string>> csv = ParseCsv(FormatReportCsv(*report, false));
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[0], (std::vector<std::string>{
                        "seed", "method", "base", "n", "K", "delta",
                        "misclustered_fraction", "delta_extended",
                        "misclustered_fraction_extended", "tilde_delta",
                        "coverage", "uncovered"}));
  EXPECT_EQ(csv[1][1], "base_only");
  EXPECT_EQ(csv[1][3], "12");
  EXPECT_EQ(ParseCsv(FormatReportCsv(*report))[0].size(), 17u);
}

TEST(RunExperimentTest, PaceAndGaleOnSbm) {
  ExperimentConfig c = *ParseExperimentConfig(PaceDoc());
  RunReport pace = *RunExperiment(c);
  ASSERT_EQ(pace.rows.size(), 2u);
  EXPECT_EQ(pace.rows[0].seed, 3u);
  EXPECT_EQ(pace.rows[1].method, "pace");
  EXPECT_GT(pace.rows[0].coverage, 0.0);
  EXPECT_EQ(pace.diagnostics[0]["method"], "pace");
  EXPECT_EQ(FormatReportCsv(pace, false), FormatReportCsv(*RunExperiment(c), false));

  json doc = PaceDoc();
  doc["method"] = json::parse(R"({"gale": {"T": 20, "sampler": {"m": 50, "scheme": "random_m"}}})");
  RunReport gale = *RunExperiment(*ParseExperimentConfig(doc));
  EXPECT_EQ(gale.rows[0].method, "gale");
  EXPECT_EQ(gale.diagnostics[1]["traversals"].size(), 1u);
}

TEST(RunExperimentTest, StitchFailureIsFailedPrecondition) {
  json doc = PaceDoc();
  doc["method"]["pace"]["sampler"]["m_star"] = 60;
  absl::StatusOr<RunReport> r = RunExperiment(*ParseExperimentConfig(doc));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(RunExperimentTest, WritesChatBinary) {
  json doc = PaceDoc();
  doc["seeds"] = json::array({5});
  doc["chat_output"] = TempPath("chat.bin");
  ASSERT_TRUE(RunExperiment(*ParseExperimentConfig(doc)).ok());
  std::ifstream in(TempPath("chat.bin"), std::ios::binary);
  absl::StatusOr<Matrix> chat = ReadChatBinary(in);
  ASSERT_TRUE(chat.ok()) << chat.status();
  EXPECT_EQ(chat->rows(), 120u);
}

}  // namespace
}  // namespace stitch
