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

#ifndef STITCH_BASE_CLUSTERER_H_
#define STITCH_BASE_CLUSTERER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stitch/graph.h"
#include "stitch/matrix.h"
#include "stitch/membership.h"

namespace stitch {

// A clustering algorithm applied to whole graphs or to sampled subgraphs.
// Implementations must be pure functions of their inputs and the seed, and
// must be safe to call concurrently from several threads.
class BaseClusterer {
 public:
  virtual ~BaseClusterer() = default;

  virtual std::string name() const = 0;

  // Returns a fully assigned membership over graph.num_nodes() nodes with
  // labels in [0, K).
  virtual absl::StatusOr<MembershipMatrix> Cluster(const Graph& graph, int K,
                                                   uint64_t seed) const = 0;

  // Clusters one sampled subgraph. The default ignores the global node ids;
  // test doubles override this to look up ground truth.
  virtual absl::StatusOr<MembershipMatrix> ClusterSample(
      const SubgraphSample& sample, int K, uint64_t seed) const {
    return Cluster(sample.graph, K, seed);
  }
};

enum class SpectralVariant { kAdjacency, kRegularizedAdjacency, kLaplacianRowNorm };

struct SpectralOptions {
  SpectralVariant variant = SpectralVariant::kAdjacency;
  // Added to every degree (and spread over all n^2 entries as reg/n).
  // nullopt means the graph's mean degree.
  std::optional<double> regularizer;
  double eig_tol = 1e-6;
  int eig_max_iter = 5000;
  int kmeans_restarts = 10;

  absl::Status Validate() const;
};

// Top-K eigenvectors of the variant's operator followed by k-means on the
// embedding rows. For the Laplacian variant the K algebraically largest
// eigenvalues are used and embedding rows are scaled to unit length.
absl::StatusOr<MembershipMatrix> SpectralCluster(const Graph& graph, int K,
                                                 const SpectralOptions& opts,
                                                 uint64_t seed);

struct MeanFieldOptions {
  int restarts = 10;
  int max_sweeps = 200;
  double tol = 1e-6;

  absl::Status Validate() const;
};

struct MeanFieldFit {
  MembershipMatrix membership;
  // n x K variational responsibilities.
  Matrix responsibilities;
  double elbo = 0.0;
};

// Variational EM for the stochastic block model: node responsibilities are
// updated one node at a time against closed-form estimates of the block
// probabilities and cluster proportions.
absl::StatusOr<MeanFieldFit> MeanFieldSbm(const Graph& graph, int K,
                                          const MeanFieldOptions& opts,
                                          uint64_t seed);

class SpectralClusterer : public BaseClusterer {
 public:
  SpectralClusterer(std::string name, SpectralOptions opts)
      : name_(std::move(name)), opts_(opts) {}
  std::string name() const override { return name_; }
  absl::StatusOr<MembershipMatrix> Cluster(const Graph& graph, int K,
                                           uint64_t seed) const override;

 private:
  std::string name_;
  SpectralOptions opts_;
};

class MeanFieldClusterer : public BaseClusterer {
 public:
  explicit MeanFieldClusterer(MeanFieldOptions opts) : opts_(opts) {}
  std::string name() const override { return "mfl"; }
  absl::StatusOr<MembershipMatrix> Cluster(const Graph& graph, int K,
                                           uint64_t seed) const override;

 private:
  MeanFieldOptions opts_;
};

struct BaseClustererSpec {
  // "spectral_adj", "rsc", "laplacian_rn" or "mfl".
  std::string name = "spectral_adj";
  // The variant field is overwritten from the name.
  SpectralOptions spectral;
  MeanFieldOptions mean_field;
};

absl::StatusOr<std::unique_ptr<BaseClusterer>> MakeBaseClusterer(
    const BaseClustererSpec& spec);

}  // namespace stitch

#endif  // STITCH_BASE_CLUSTERER_H_
