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

#ifndef STITCH_PACE_H_
#define STITCH_PACE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stitch/base_clusterer.h"
#include "stitch/graph.h"
#include "stitch/local_estimates.h"
#include "stitch/matrix.h"
#include "stitch/membership.h"
#include "stitch/sampling.h"

namespace stitch {

enum class WeightScheme { kUniform, kSubgraphSize, kDegreePair };
enum class TauMode { kAbsolute, kFractionOfExpected };
enum class RecoveryMethod { kProjectionKMeans, kProjectionDgcluster, kSpectralOnChat };

absl::StatusOr<WeightScheme> ParseWeightScheme(const std::string& name);
absl::StatusOr<RecoveryMethod> ParseRecoveryMethod(const std::string& name);

struct RecoverySpec {
  RecoveryMethod method = RecoveryMethod::kSpectralOnChat;
  // Projection dimension; 0 means ceil(10 ln n).
  int s = 0;
  int kmeans_restarts = 10;
  double eig_tol = 1e-6;
  int eig_max_iter = 5000;
};

struct PaceConfig {
  int T = 1;
  SamplerSpec sampler;
  TauMode tau_mode = TauMode::kFractionOfExpected;
  // Used in kAbsolute mode.
  double tau = 1.0;
  // Used in kFractionOfExpected mode: tau = ceil(theta * E[N_ij]).
  double theta = 0.5;
  WeightScheme weights = WeightScheme::kUniform;
  RecoverySpec recovery;
  // When set, the estimate is binarized at chat > eta before recovery.
  std::optional<double> eta;

  absl::Status Validate() const;
};

// Weighted co-membership votes: sum(i, j) counts agreeing votes and
// count(i, j) all votes for the pair. Dense n x n.
class ClusteringMatrixAccumulator {
 public:
  explicit ClusteringMatrixAccumulator(NodeId n) : sum_(n, n), count_(n, n) {}

  NodeId n() const { return static_cast<NodeId>(sum_.rows()); }
  const Matrix& sum() const { return sum_; }
  const Matrix& count() const { return count_; }

  // Adds one local clustering; an empty `local` (inadmissible sample) is a
  // no-op.
  absl::Status Add(const SubgraphSample& sample, const MembershipMatrix& local,
                   WeightScheme scheme);

  // Adds every used local estimate, in parallel over rows.
  void AddAll(const std::vector<LocalEstimate>& locals, WeightScheme scheme);

  // chat(i, j) = [count >= tau] * sum / count, 0 where count is 0.
  Matrix Finalize(double tau) const;

  // Fraction of pairs i < j with count >= tau.
  double Coverage(double tau) const;

 private:
  Matrix sum_;
  Matrix count_;
};

// Mean total pair weight over ordered pairs i != j contributed by the used
// samples: sum_l sum_{a != b in S_l} w_ab / (n (n - 1)).
double ExpectedPairWeight(const std::vector<LocalEstimate>& locals, NodeId n,
                          WeightScheme scheme);

// Entrywise chat > eta.
Matrix ThresholdChat(const Matrix& chat, double eta);

// chat * R / sqrt(s) with R an n x s standard Gaussian matrix drawn from seed.
Matrix ProjectRows(const Matrix& chat, int s, uint64_t seed);
// Same with a caller-supplied R (n x s).
Matrix ProjectRows(const Matrix& chat, const Matrix& r);

// Greedy ball clustering of the rows: repeatedly pick a uniformly random
// unassigned row and give every unassigned row within distance gamma of it a
// new block id.
std::vector<int> NaiveCluster(const Matrix& rows, double gamma, uint64_t seed);

// Blocks a and b merged into min(a, b); ids above max(a, b) shift down by one.
absl::StatusOr<std::vector<int>> MergeBlocks(std::span<const int> sigma, int a,
                                             int b);

// Sweeps the ball radius c * sqrt(2n / K) for c = 0.01, 0.02, ... up to 2
// over the projected rows, keeps the last partition with at least K blocks,
// then merges the pair of blocks with the largest mean chat entry until K
// remain.
absl::StatusOr<MembershipMatrix> DgCluster(const Matrix& chat,
                                           const Matrix& projected, int K,
                                           uint64_t seed);

absl::StatusOr<MembershipMatrix> RecoverMembership(const Matrix& chat, int K,
                                                   const RecoverySpec& spec,
                                                   uint64_t seed);

struct PaceResult {
  Matrix chat;
  double tau = 0.0;
  double coverage = 0.0;
  MembershipMatrix membership;
  std::vector<LocalEstimate> locals;
  PhaseTimes times;
};

// Samples, clusters the subgraphs in parallel, averages co-membership votes,
// and recovers a K-cluster membership from the averaged matrix.
absl::StatusOr<PaceResult> RunPace(const Graph& graph, int K,
                                   const PaceConfig& config,
                                   const BaseClusterer& base, uint64_t seed);

}  // namespace stitch

#endif  // STITCH_PACE_H_
