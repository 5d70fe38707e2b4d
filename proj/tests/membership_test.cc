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

#include "stitch/membership.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "stitch/assignment.h"
#include "stitch/random.h"
#include "test_util.h"

namespace stitch {
namespace {

using testing::BruteForceDelta;
using testing::Labels;
using testing::RandomLabels;
using testing::RandomPermutation;

TEST(MembershipTest, FromLabelsValidatesRange) {
  EXPECT_TRUE(MembershipMatrix::FromLabels({0, 1, kUnassigned}, 2).ok());
  EXPECT_FALSE(MembershipMatrix::FromLabels({0, 2}, 2).ok());
  EXPECT_FALSE(MembershipMatrix::FromLabels({0, -2}, 2).ok());
  EXPECT_FALSE(MembershipMatrix::FromLabels({0}, 0).ok());
}

TEST(MembershipTest, ConfusionByHand) {
  Matrix same = *Confusion(Labels({0, 0, 1, 1}, 2), Labels({0, 0, 1, 1}, 2));
  EXPECT_EQ(same(0, 0), 2);
  EXPECT_EQ(same(0, 1), 0);
  EXPECT_EQ(same(1, 1), 2);
  Matrix swap = *Confusion(Labels({0, 0, 1, 1}, 2), Labels({1, 1, 0, 0}, 2));
  EXPECT_EQ(swap(0, 1), 2);
  EXPECT_EQ(swap(1, 0), 2);
  Matrix hand = *Confusion(Labels({0, 0, 1}, 2), Labels({0, 1, 1}, 2));
  EXPECT_EQ(hand(0, 0), 1);
  EXPECT_EQ(hand(0, 1), 1);
  EXPECT_EQ(hand(1, 0), 0);
  EXPECT_EQ(hand(1, 1), 1);
}

TEST(MembershipTest, ConfusionSkipsUnassignedRows) {
  Matrix m = *Confusion(Labels({0, kUnassigned, 1}, 2), Labels({0, 0, kUnassigned}, 2));
  EXPECT_EQ(m(0, 0), 1);
  EXPECT_EQ(m(0, 1) + m(1, 0) + m(1, 1), 0);
}

TEST(MembershipTest, MatchPermutationOnDiagonal) {
  Matrix m(3, 3);
  m(0, 0) = 5;
  m(1, 1) = 3;
  m(2, 2) = 2;
  EXPECT_EQ(MatchPermutation(m), (Permutation{0, 1, 2}));
}

TEST(MembershipTest, MatchPermutationTieBreaksByRowThenColumn) {
  Matrix m(2, 2, 1.0);
  EXPECT_EQ(MatchPermutation(m), (Permutation{0, 1}));
}

TEST(MembershipTest, MatchPermutationAlwaysBijective) {
  Rng rng = MakeRng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const int K = 1 + static_cast<int>(UniformIndex(rng, 7));
    Matrix m(K, K);
    for (double& x : m.data()) x = std::floor(Uniform01(rng) * 4);
    EXPECT_TRUE(IsPermutation(MatchPermutation(m)));
  }
}

TEST(MembershipTest, AlignSwapAndInverse) {
  MembershipMatrix z = Labels({0, 1, 0, kUnassigned}, 2);
  EXPECT_EQ(Align(z, Permutation{0, 1}), z);
  EXPECT_EQ(Align(z, Permutation{1, 0}), Labels({1, 0, 1, kUnassigned}, 2));
  Rng rng = MakeRng(2);
  for (int trial = 0; trial < 50; ++trial) {
    MembershipMatrix r = Labels(RandomLabels(20, 5, rng), 5);
    Permutation p = RandomPermutation(5, rng);
    EXPECT_EQ(Align(Align(r, p), InversePermutation(p)), r);
  }
}

TEST(MembershipTest, MisclusteringFractionCountsTwoPerRow) {
  EXPECT_DOUBLE_EQ(*MisclusteringFraction(Labels({0, 0, 1, 1}, 2), Labels({0, 0, 1, 1}, 2)), 0.0);
  EXPECT_DOUBLE_EQ(*MisclusteringFraction(Labels({0, 0, 1, 1}, 2), Labels({1, 1, 0, 0}, 2)), 0.0);
  EXPECT_DOUBLE_EQ(*MisclusteringFraction(Labels({0, 0, 1, 1}, 2), Labels({0, 0, 1, 0}, 2)), 0.5);
}

TEST(MembershipTest, MisclusteringFractionRejectsBadInput) {
  EXPECT_FALSE(MisclusteringFraction(Labels({0, 1}, 2), Labels({0, 1, 1}, 2)).ok());
  EXPECT_FALSE(MisclusteringFraction(Labels({0, 1}, 2), Labels({0, 1}, 3)).ok());
  EXPECT_FALSE(MisclusteringFraction(Labels({0, kUnassigned}, 2), Labels({0, 1}, 2)).ok());
}

TEST(MembershipTest, MisclusteringFractionMatchesBruteForce) {
  Rng rng = MakeRng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + static_cast<int>(UniformIndex(rng, 5));
    MembershipMatrix a = Labels(RandomLabels(12, K, rng), K);
    MembershipMatrix b = Labels(RandomLabels(12, K, rng), K);
    EXPECT_NEAR(*MisclusteringFraction(a, b), BruteForceDelta(a, b), 1e-12);
  }
}

TEST(MembershipTest, MisclusteringFractionIsPseudometric) {
  Rng rng = MakeRng(4);
  for (int trial = 0; trial < 200; ++trial) {
    MembershipMatrix a = Labels(RandomLabels(15, 3, rng), 3);
    MembershipMatrix b = Labels(RandomLabels(15, 3, rng), 3);
    MembershipMatrix c = Labels(RandomLabels(15, 3, rng), 3);
    const double ab = *MisclusteringFraction(a, b);
    EXPECT_DOUBLE_EQ(ab, *MisclusteringFraction(b, a));
    EXPECT_LE(ab, *MisclusteringFraction(a, c) + *MisclusteringFraction(c, b) + 1e-12);
    EXPECT_DOUBLE_EQ(*MisclusteringFraction(a, Align(a, RandomPermutation(3, rng))), 0.0);
  }
}

TEST(MembershipTest, ExtendedMetricConventions) {
  MembershipMatrix truth = Labels({0, 0, 1, 1}, 2);
  EXPECT_DOUBLE_EQ(*MisclusteringFractionExtended(truth, truth), 0.0);
  // One node in a spurious third cluster: two differing entries.
  EXPECT_DOUBLE_EQ(*MisclusteringFractionExtended(Labels({0, 0, 1, 2}, 3), truth), 0.5);
  // One unassigned node: a zero row differs in one entry.
  EXPECT_DOUBLE_EQ(
      *MisclusteringFractionExtended(Labels({1, 1, 0, kUnassigned}, 2), truth), 0.25);
  // Nothing assigned.
  EXPECT_DOUBLE_EQ(*MisclusteringFractionExtended(MembershipMatrix(4, 3), truth), 1.0);
  EXPECT_FALSE(MisclusteringFractionExtended(Labels({0, 0, 1, 3}, 4), truth).ok());
}

TEST(MembershipTest, ExtendedMetricMatchesBruteForce) {
  Rng rng = MakeRng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + static_cast<int>(UniformIndex(rng, 4));
    std::vector<int> est = RandomLabels(10, K + 1, rng);
    for (int& l : est) {
      if (Uniform01(rng) < 0.2) l = kUnassigned;
    }
    MembershipMatrix e = Labels(est, K + 1);
    MembershipMatrix t = Labels(RandomLabels(10, K, rng), K);
    // Pad the truth to K + 1 labels so the oracle permutes over (K+1)!.
    MembershipMatrix t_padded = Labels(std::vector<int>(t.labels().begin(), t.labels().end()), K + 1);
    EXPECT_NEAR(*MisclusteringFractionExtended(e, t), BruteForceDelta(e, t_padded), 1e-12);
  }
}

TEST(MembershipTest, ClusteringMatrixByHand) {
  Matrix c = *ClusteringMatrix(Labels({0, 0, 1}, 2));
  const double expected[3][3] = {{1, 1, 0}, {1, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(c(i, j), expected[i][j]);
  EXPECT_FALSE(ClusteringMatrix(Labels({0, kUnassigned}, 2)).ok());
  Rng rng = MakeRng(6);
  MembershipMatrix z = Labels(RandomLabels(9, 3, rng), 3);
  EXPECT_EQ(*ClusteringMatrix(z), *ClusteringMatrix(Align(z, RandomPermutation(3, rng))));
}

TEST(MembershipTest, TildeDeltaCountsDifferingEntries) {
  Matrix a(3, 3), b(3, 3);
  b(0, 1) = 1;
  b(1, 0) = 1;
  b(2, 2) = 1;
  EXPECT_DOUBLE_EQ(*TildeDelta(a, a), 0.0);
  EXPECT_DOUBLE_EQ(*TildeDelta(a, b), 3.0 / 9.0);
  EXPECT_FALSE(TildeDelta(a, Matrix(2, 2)).ok());
}

TEST(MembershipTest, TildeDeltaOfMembershipsMatchesDenseForm) {
  Rng rng = MakeRng(7);
  for (int trial = 0; trial < 100; ++trial) {
    MembershipMatrix a = Labels(RandomLabels(14, 3, rng), 3);
    MembershipMatrix b = Labels(RandomLabels(14, 4, rng), 4);
    const double dense = *TildeDelta(*ClusteringMatrix(a), *ClusteringMatrix(b));
    EXPECT_NEAR(*TildeDeltaOfMemberships(a, b), dense, 1e-12);
  }
}

TEST(MembershipTest, RoundSoftArgmaxWithTies) {
  Matrix s(4, 2);
  s(0, 0) = 1.0;
  s(1, 0) = 0.4;
  s(1, 1) = 0.6;
  s(2, 0) = 0.5;
  s(2, 1) = 0.5;
  MembershipMatrix z = RoundSoft(s);
  EXPECT_EQ(z.label(0), 0);
  EXPECT_EQ(z.label(1), 1);
  EXPECT_EQ(z.label(2), 0);
  EXPECT_FALSE(z.assigned(3));
  EXPECT_EQ(RoundSoft(ToSoft(z)), z);
}

TEST(MembershipTest, MaxWeightAssignmentMatchesBruteForce) {
  Rng rng = MakeRng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + static_cast<int>(UniformIndex(rng, 6));
    Matrix w(K, K);
    for (double& x : w.data()) x = Uniform01(rng);
    std::vector<int> col = MaxWeightAssignment(w);
    ASSERT_TRUE(IsPermutation(col));
    double got = 0;
    for (int i = 0; i < K; ++i) got += w(i, col[i]);
    Permutation p(K);
    std::iota(p.begin(), p.end(), 0);
    double best = -1;
    do {
      double total = 0;
      for (int i = 0; i < K; ++i) total += w(i, p[i]);
      best = std::max(best, total);
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_NEAR(got, best, 1e-12);
  }
}

}  // namespace
}  // namespace stitch
