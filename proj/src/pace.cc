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

#include "stitch/pace.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "absl/strings/str_cat.h"
#include "stitch/eigensolver.h"
#include "stitch/kernels.h"
#include "stitch/kmeans.h"
#include "stitch/random.h"

namespace stitch {

namespace {

constexpr double kSweepStep = 0.01;
constexpr int kSweepSteps = 200;

std::vector<double> LocalDegrees(const Graph& g) {
  std::vector<double> deg(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    deg[v] = static_cast<double>(g.degree(v));
  }
  return deg;
}

kernels::Patch MakePatch(const SubgraphSample& sample,
                         const MembershipMatrix& local, WeightScheme scheme,
                         const std::vector<double>& degrees) {
  kernels::Patch p;
  p.nodes = sample.nodes;
  p.labels = local.labels();
  switch (scheme) {
    case WeightScheme::kUniform:
      p.base_weight = 1.0;
      break;
    case WeightScheme::kSubgraphSize:
      p.base_weight = static_cast<double>(sample.size());
      break;
    case WeightScheme::kDegreePair:
      p.base_weight = 0.0;
      p.node_weight = degrees;
      break;
  }
  return p;
}

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

int DefaultProjectionDim(std::size_t n) {
  return std::max(1, static_cast<int>(std::ceil(10.0 * std::log(std::max<double>(n, 2)))));
}

}  // namespace

absl::StatusOr<WeightScheme> ParseWeightScheme(const std::string& name) {
  if (name == "uniform") return WeightScheme::kUniform;
  if (name == "subgraph_size") return WeightScheme::kSubgraphSize;
  if (name == "degree_pair") return WeightScheme::kDegreePair;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown weight scheme '", name,
      "'; expected uniform, subgraph_size or degree_pair"));
}

absl::StatusOr<RecoveryMethod> ParseRecoveryMethod(const std::string& name) {
  if (name == "projection_kmeans") return RecoveryMethod::kProjectionKMeans;
  if (name == "projection_dgcluster") return RecoveryMethod::kProjectionDgcluster;
  if (name == "spectral_on_chat") return RecoveryMethod::kSpectralOnChat;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown recovery '", name,
      "'; expected projection_kmeans, projection_dgcluster or spectral_on_chat"));
}

absl::Status PaceConfig::Validate() const {
  if (T < 1) return absl::InvalidArgumentError("T must be >= 1");
  if (absl::Status s = sampler.Validate(); !s.ok()) return s;
  if (tau_mode == TauMode::kAbsolute && !(tau > 0.0)) {
    return absl::InvalidArgumentError("tau must be > 0");
  }
  if (tau_mode == TauMode::kFractionOfExpected && !(theta > 0.0 && theta < 1.0)) {
    return absl::InvalidArgumentError("theta must lie in (0, 1)");
  }
  if (recovery.s < 0) {
    return absl::InvalidArgumentError("s must be >= 1, or 0 for ceil(10 ln n)");
  }
  if (recovery.kmeans_restarts < 1) {
    return absl::InvalidArgumentError("kmeans_restarts must be >= 1");
  }
  if (!(recovery.eig_tol > 0.0) || recovery.eig_max_iter < 1) {
    return absl::InvalidArgumentError("eig_tol must be > 0 and eig_max_iter >= 1");
  }
  if (eta.has_value() && !(*eta > 0.0 && *eta < 1.0)) {
    return absl::InvalidArgumentError("eta must lie in (0, 1)");
  }
  return absl::OkStatus();
}

absl::Status ClusteringMatrixAccumulator::Add(const SubgraphSample& sample,
                                              const MembershipMatrix& local,
                                              WeightScheme scheme) {
  if (local.n() == 0) return absl::OkStatus();
  if (local.n() != sample.size() || !local.all_assigned()) {
    return absl::InvalidArgumentError(
        "local membership must assign every sample node");
  }
  for (NodeId v : sample.nodes) {
    if (v < 0 || v >= n()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample node ", v, " outside accumulator of size ", n()));
    }
  }
  const std::vector<double> degrees =
      scheme == WeightScheme::kDegreePair ? LocalDegrees(sample.graph)
                                          : std::vector<double>();
  const kernels::Patch patch = MakePatch(sample, local, scheme, degrees);
  kernels::AccumulatePatchesSerial({&patch, 1}, sum_, count_);
  return absl::OkStatus();
}

void ClusteringMatrixAccumulator::AddAll(
    const std::vector<LocalEstimate>& locals, WeightScheme scheme) {
  std::vector<std::vector<double>> degrees(locals.size());
  std::vector<kernels::Patch> patches;
  for (std::size_t l = 0; l < locals.size(); ++l) {
    const LocalEstimate& est = locals[l];
    if (!est.used) continue;
    if (scheme == WeightScheme::kDegreePair) {
      degrees[l] = LocalDegrees(est.drawn.sample.graph);
    }
    patches.push_back(MakePatch(est.drawn.sample, est.labels, scheme, degrees[l]));
  }
  kernels::AccumulatePatches(patches, sum_, count_);
}

Matrix ClusteringMatrixAccumulator::Finalize(double tau) const {
  const std::size_t n = sum_.rows();
  Matrix chat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c = count_(i, j);
      if (c > 0.0 && c >= tau) chat(i, j) = sum_(i, j) / c;
    }
  }
  return chat;
}

double ClusteringMatrixAccumulator::Coverage(double tau) const {
  const std::size_t n = sum_.rows();
  if (n < 2) return 1.0;
  int64_t covered = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (count_(i, j) >= tau) ++covered;
    }
  }
  return static_cast<double>(covered) / (static_cast<double>(n) * (n - 1) / 2.0);
}

double ExpectedPairWeight(const std::vector<LocalEstimate>& locals, NodeId n,
                          WeightScheme scheme) {
  if (n < 2) return 0.0;
  double total = 0.0;
  for (const LocalEstimate& est : locals) {
    if (!est.used) continue;
    const double m = est.drawn.sample.size();
    switch (scheme) {
      case WeightScheme::kUniform:
        total += m * (m - 1);
        break;
      case WeightScheme::kSubgraphSize:
        total += m * m * (m - 1);
        break;
      case WeightScheme::kDegreePair: {
        // sum_{a != b} (d_a + d_b) = 2 (m - 1) sum_a d_a.
        const double degree_sum = 2.0 * est.drawn.sample.graph.num_edges();
        total += 2.0 * (m - 1) * degree_sum;
        break;
      }
    }
  }
  return total / (static_cast<double>(n) * (n - 1));
}

Matrix ThresholdChat(const Matrix& chat, double eta) {
  Matrix out(chat.rows(), chat.cols());
  auto src = chat.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] > eta ? 1.0 : 0.0;
  return out;
}

Matrix ProjectRows(const Matrix& chat, int s, uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal;
  Matrix r(chat.cols(), s);
  for (double& v : r.data()) v = normal(rng);
  return ProjectRows(chat, r);
}

Matrix ProjectRows(const Matrix& chat, const Matrix& r) {
  Matrix out(chat.rows(), r.cols());
  kernels::DenseMultiply(chat, r, out);
  const double scale = 1.0 / std::sqrt(static_cast<double>(r.cols()));
  for (double& v : out.data()) v *= scale;
  return out;
}

std::vector<int> NaiveCluster(const Matrix& rows, double gamma, uint64_t seed) {
  const std::size_t n = rows.rows();
  Rng rng = MakeRng(seed);
  std::vector<int> sigma(n, -1);
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  const double gamma2 = gamma * gamma;
  int block = 0;
  while (!pool.empty()) {
    const std::size_t root = pool[UniformIndex(rng, pool.size())];
    auto rrow = rows.row(root);
    std::vector<std::size_t> rest;
    rest.reserve(pool.size());
    for (std::size_t j : pool) {
      auto jrow = rows.row(j);
      double d2 = 0.0;
      for (std::size_t c = 0; c < jrow.size(); ++c) {
        d2 += (rrow[c] - jrow[c]) * (rrow[c] - jrow[c]);
      }
      if (j == root || d2 <= gamma2) {
        sigma[j] = block;
      } else {
        rest.push_back(j);
      }
    }
    pool = std::move(rest);
    ++block;
  }
  return sigma;
}

absl::StatusOr<std::vector<int>> MergeBlocks(std::span<const int> sigma, int a,
                                             int b) {
  if (a == b) return absl::InvalidArgumentError("cannot merge a block with itself");
  bool has_a = false, has_b = false;
  for (int l : sigma) {
    has_a |= l == a;
    has_b |= l == b;
  }
  if (!has_a || !has_b) {
    return absl::InvalidArgumentError(
        absl::StrCat("blocks ", a, " and ", b, " are not both present"));
  }
  const int u = std::min(a, b);
  const int v = std::max(a, b);
  std::vector<int> out(sigma.begin(), sigma.end());
  for (int& l : out) {
    if (l == v) {
      l = u;
    } else if (l > v) {
      --l;
    }
  }
  return out;
}

absl::StatusOr<MembershipMatrix> DgCluster(const Matrix& chat,
                                           const Matrix& projected, int K,
                                           uint64_t seed) {
  const std::size_t n = chat.rows();
  if (K < 1 || static_cast<std::size_t>(K) > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("DGCluster needs 1 <= K <= n; got K=", K, ", n=", n));
  }
  if (projected.rows() != n) {
    return absl::InvalidArgumentError("projection must have one row per node");
  }
  if (K == 1) return MembershipMatrix::FromLabels(std::vector<int>(n, 0), 1);

  const double theta = std::sqrt(2.0 * static_cast<double>(n) / K);
  std::vector<int> sigma;
  int blocks = 0;
  bool dropped_below = false;
  for (int step = 1; step <= kSweepSteps; ++step) {
    std::vector<int> candidate =
        NaiveCluster(projected, step * kSweepStep * theta, DeriveSeed(seed, step));
    const int count = *std::max_element(candidate.begin(), candidate.end()) + 1;
    if (count < K) {
      if (sigma.empty()) {
        // Even the finest radius leaves fewer than K blocks.
        sigma = std::move(candidate);
        blocks = count;
      }
      dropped_below = true;
      break;
    }
    sigma = std::move(candidate);
    blocks = count;
  }
  if (!dropped_below) {
    return absl::FailedPreconditionError(absl::StrCat(
        "DGCluster: still ", blocks, " >= K blocks at radius c = ",
        kSweepSteps * kSweepStep, " times sqrt(2n/K)"));
  }

  // Block sums of chat; merged incrementally.
  Matrix block_sum(blocks, blocks);
  std::vector<double> size(blocks, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    size[sigma[i]] += 1.0;
    auto row = chat.row(i);
    for (std::size_t j = 0; j < n; ++j) block_sum(sigma[i], sigma[j]) += row[j];
  }
  std::vector<int> alive(blocks);
  for (int b = 0; b < blocks; ++b) alive[b] = b;
  while (static_cast<int>(alive.size()) > K) {
    std::size_t best_a = 0, best_b = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < alive.size(); ++x) {
      for (std::size_t y = x + 1; y < alive.size(); ++y) {
        const int a = alive[x], b = alive[y];
        const double r = block_sum(a, b) / (size[a] * size[b]);
        if (r > best) {
          best = r;
          best_a = x;
          best_b = y;
        }
      }
    }
    // Current block ids are positions in `alive`.
    absl::StatusOr<std::vector<int>> merged = MergeBlocks(
        sigma, static_cast<int>(best_a), static_cast<int>(best_b));
    if (!merged.ok()) return merged.status();
    sigma = *std::move(merged);
    const int a = alive[best_a], b = alive[best_b];
    const double within = block_sum(a, a) + block_sum(a, b) +
                          block_sum(b, a) + block_sum(b, b);
    for (int c : alive) {
      if (c == a || c == b) continue;
      block_sum(a, c) += block_sum(b, c);
      block_sum(c, a) = block_sum(a, c);
    }
    block_sum(a, a) = within;
    size[a] += size[b];
    alive.erase(alive.begin() + best_b);
  }
  return MembershipMatrix::FromLabels(std::move(sigma), K);
}

absl::StatusOr<MembershipMatrix> RecoverMembership(const Matrix& chat, int K,
                                                   const RecoverySpec& spec,
                                                   uint64_t seed) {
  const std::size_t n = chat.rows();
  if (K < 1 || static_cast<std::size_t>(K) > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("recovery needs 1 <= K <= n; got K=", K, ", n=", n));
  }
  Matrix embedding;
  if (spec.method == RecoveryMethod::kSpectralOnChat) {
    SymmetricOperator op;
    op.dim = static_cast<int64_t>(n);
    op.apply = [&chat](const Matrix& x, Matrix& y) {
      kernels::DenseMultiply(chat, x, y);
    };
    EigenOptions eopts;
    eopts.tol = spec.eig_tol;
    eopts.max_iter = spec.eig_max_iter;
    eopts.seed = DeriveSeed(seed, 0);
    absl::StatusOr<EigenPairs> eig = TopEigenpairs(op, K, eopts);
    if (!eig.ok()) return eig.status();
    embedding = std::move(eig->vectors);
  } else {
    const int s = spec.s > 0 ? spec.s : DefaultProjectionDim(n);
    embedding = ProjectRows(chat, s, DeriveSeed(seed, 0));
    if (spec.method == RecoveryMethod::kProjectionDgcluster) {
      return DgCluster(chat, embedding, K, DeriveSeed(seed, 1));
    }
  }
  absl::StatusOr<KMeansResult> km =
      KMeans(embedding, K, spec.kmeans_restarts, DeriveSeed(seed, 1));
  if (!km.ok()) return km.status();
  return MembershipMatrix::FromLabels(std::move(km->labels), K);
}

absl::StatusOr<PaceResult> RunPace(const Graph& graph, int K,
                                   const PaceConfig& config,
                                   const BaseClusterer& base, uint64_t seed) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const NodeId n = graph.num_nodes();
  if (K < 1 || K > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("PACE needs 1 <= K <= n; got K=", K, ", n=", n));
  }
  PaceResult result;
  absl::StatusOr<std::vector<LocalEstimate>> locals = DrawAndCluster(
      graph, K, config.sampler, config.T, base, DeriveSeed(seed, 0), result.times);
  if (!locals.ok()) return locals.status();
  result.locals = *std::move(locals);
  if (CountUsed(result.locals) == 0) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no admissible subgraph: all ", config.T,
        " samples have fewer than max(m_star, K) nodes (m_star=",
        config.sampler.m_star, ", K=", K, ")"));
  }

  auto start = std::chrono::steady_clock::now();
  ClusteringMatrixAccumulator acc(n);
  acc.AddAll(result.locals, config.weights);
  if (config.tau_mode == TauMode::kAbsolute) {
    result.tau = config.tau;
  } else {
    const double expected = ExpectedPairWeight(result.locals, n, config.weights);
    result.tau = std::max(1.0, std::ceil(config.theta * expected - 1e-9));
  }
  result.chat = acc.Finalize(result.tau);
  result.coverage = acc.Coverage(result.tau);
  result.times.stitch = SecondsSince(start);

  start = std::chrono::steady_clock::now();
  const Matrix binary = config.eta.has_value()
                            ? ThresholdChat(result.chat, *config.eta)
                            : Matrix();
  absl::StatusOr<MembershipMatrix> z =
      RecoverMembership(config.eta.has_value() ? binary : result.chat, K,
                        config.recovery, DeriveSeed(seed, 1));
  result.times.recovery = SecondsSince(start);
  if (!z.ok()) return z.status();
  result.membership = *std::move(z);
  return result;
}

}  // namespace stitch
