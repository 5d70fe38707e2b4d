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

#include "stitch/base_clusterer.h"

#include <cmath>
#include <memory>
#include <set>
#include <string>

#include "gtest/gtest.h"
#include "test_util.h"

namespace stitch {
namespace {

using testing::Labels;
using testing::TwoCliques;

std::unique_ptr<BaseClusterer> Make(const std::string& name) {
  BaseClustererSpec spec;
  spec.name = name;
  absl::StatusOr<std::unique_ptr<BaseClusterer>> b = MakeBaseClusterer(spec);
  EXPECT_TRUE(b.ok()) << b.status();
  return *std::move(b);
}

double Delta(const MembershipMatrix& z, const std::vector<int>& truth, int K) {
  return *MisclusteringFraction(z, Labels(truth, K));
}

class AllBasesTest : public ::testing::TestWithParam<std::string> {};

TEST_P(AllBasesTest, SplitsTwoCliques) {
  Graph g = TwoCliques(12, 9);
  std::vector<int> truth(21, 1);
  for (int i = 0; i < 12; ++i) truth[i] = 0;
  auto base = Make(GetParam());
  EXPECT_EQ(base->name(), GetParam());
  absl::StatusOr<MembershipMatrix> z = base->Cluster(g, 2, 3);
  ASSERT_TRUE(z.ok()) << z.status();
  EXPECT_EQ(z->n(), 21);
  EXPECT_EQ(Delta(*z, truth, 2), 0.0);
}

TEST_P(AllBasesTest, IsolatedNodesDoNotCrash) {
  auto base = Make(GetParam());
  absl::StatusOr<MembershipMatrix> z = base->Cluster(Graph(10), 3, 1);
  ASSERT_TRUE(z.ok()) << z.status();
  EXPECT_TRUE(z->all_assigned());
  EXPECT_EQ(z->K(), 3);
}

TEST_P(AllBasesTest, DeterministicPerSeed) {
  SbmParams p = *PlantedPartitionParams(0.1, 1.0, 0.3, 3, {0.3, 0.3, 0.4});
  LabeledGraph lg = *GenerateSbm(p, 150, 4);
  auto base = Make(GetParam());
  EXPECT_EQ(*base->Cluster(lg.graph, 3, 8), *base->Cluster(lg.graph, 3, 8));
}

TEST_P(AllBasesTest, RejectsKAboveN) {
  auto base = Make(GetParam());
  EXPECT_FALSE(base->Cluster(Graph(2), 3, 1).ok());
}

TEST_P(AllBasesTest, SampleDefaultUsesInducedGraph) {
  Graph g = TwoCliques(6, 6);
  std::vector<NodeId> nodes = {0, 1, 2, 6, 7, 8};
  SubgraphSample s = *InducedSubgraph(g, nodes);
  auto base = Make(GetParam());
  EXPECT_EQ(*base->ClusterSample(s, 2, 5), *base->Cluster(s.graph, 2, 5));
}

INSTANTIATE_TEST_SUITE_P(Names, AllBasesTest,
                         ::testing::Values("spectral_adj", "rsc", "laplacian_rn", "mfl"));

TEST(BaseClustererTest, UnknownNameAndBadOptions) {
  BaseClustererSpec spec;
  spec.name = "sdp";
  EXPECT_FALSE(MakeBaseClusterer(spec).ok());
  spec.name = "rsc";
  spec.spectral.regularizer = -1;
  EXPECT_FALSE(MakeBaseClusterer(spec).ok());
  spec.spectral = {};
  spec.spectral.kmeans_restarts = 0;
  EXPECT_FALSE(MakeBaseClusterer(spec).ok());
  spec = {};
  spec.name = "mfl";
  spec.mean_field.restarts = 0;
  EXPECT_FALSE(MakeBaseClusterer(spec).ok());
}

TEST(BaseClustererTest, AdjacencySpectralOnStrongSbm) {
  SbmParams p;
  p.K = 2;
  p.pi = {0.5, 0.5};
  p.B = Matrix(2, 2, 0.05);
  p.B(0, 0) = p.B(1, 1) = 0.5;
  auto base = Make("spectral_adj");
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    LabeledGraph lg = *GenerateSbm(p, 400, seed);
    EXPECT_LE(Delta(*base->Cluster(lg.graph, 2, seed), lg.labels, 2), 0.02);
  }
}

TEST(BaseClustererTest, RegularizedVariantsOnModerateSbm) {
  SbmParams p = *PlantedPartitionParams(0.15, 1.0, 0.1, 3, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  LabeledGraph lg = *GenerateSbm(p, 300, 2);
  for (const char* name : {"rsc", "laplacian_rn"}) {
    EXPECT_LE(Delta(*Make(name)->Cluster(lg.graph, 3, 1), lg.labels, 3), 0.05) << name;
  }
}

TEST(BaseClustererTest, MeanFieldOnStrongSbm) {
  SbmParams p;
  p.K = 2;
  p.pi = {0.5, 0.5};
  p.B = Matrix(2, 2, 0.05);
  p.B(0, 0) = p.B(1, 1) = 0.5;
  auto base = Make("mfl");
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    LabeledGraph lg = *GenerateSbm(p, 300, seed);
    EXPECT_LE(Delta(*base->Cluster(lg.graph, 2, seed), lg.labels, 2), 0.05);
  }
}

TEST(BaseClustererTest, MeanFieldSingleClusterElboIsBernoulliLikelihood) {
  SbmParams p = *PlantedPartitionParams(0.1, 1.0, 1.0, 1, {1.0});
  LabeledGraph lg = *GenerateSbm(p, 80, 3);
  MeanFieldFit fit = *MeanFieldSbm(lg.graph, 1, {}, 1);
  for (int i = 0; i < 80; ++i) EXPECT_EQ(fit.membership.label(i), 0);
  const double pairs = 80.0 * 79.0 / 2.0;
  const double edges = static_cast<double>(lg.graph.num_edges());
  const double rho = edges / pairs;
  const double loglik = edges * std::log(rho) + (pairs - edges) * std::log(1 - rho);
  EXPECT_NEAR(fit.elbo, loglik, 1e-6 * std::abs(loglik));
}

TEST(BaseClustererTest, MeanFieldResponsibilitiesAreDistributions) {
  SbmParams p = *PlantedPartitionParams(0.15, 1.0, 0.2, 3, {0.3, 0.3, 0.4});
  LabeledGraph lg = *GenerateSbm(p, 120, 5);
  MeanFieldFit fit = *MeanFieldSbm(lg.graph, 3, {}, 2);
  for (int i = 0; i < 120; ++i) {
    double total = 0;
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(fit.responsibilities(i, k), 0.0);
      total += fit.responsibilities(i, k);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(BaseClustererTest, QualityIsInvariantToTruthRelabeling) {
  SbmParams p = *PlantedPartitionParams(0.2, 1.0, 0.2, 3, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  LabeledGraph lg = *GenerateSbm(p, 150, 6);
  MembershipMatrix z = *Make("spectral_adj")->Cluster(lg.graph, 3, 2);
  MembershipMatrix truth = Labels(lg.labels, 3);
  EXPECT_DOUBLE_EQ(*MisclusteringFraction(z, truth),
                   *MisclusteringFraction(z, Align(truth, Permutation{2, 0, 1})));
}

}  // namespace
}  // namespace stitch
