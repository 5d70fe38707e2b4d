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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/strings/str_cat.h"
#include "stitch/eigensolver.h"
#include "stitch/kmeans.h"
#include "stitch/random.h"

namespace stitch {

namespace {

constexpr double kProbabilityFloor = 1e-10;

// y = A x (+ reg/n * 1 1^T x) for the adjacency of `graph`.
void ApplyAdjacency(const Graph& graph, double reg, const Matrix& x, Matrix& y) {
  const NodeId n = graph.num_nodes();
  const std::size_t q = x.cols();
  for (NodeId i = 0; i < n; ++i) {
    auto out = y.row(i);
    std::fill(out.begin(), out.end(), 0.0);
    for (NodeId j : graph.neighbors(i)) {
      auto in = x.row(j);
      for (std::size_t c = 0; c < q; ++c) out[c] += in[c];
    }
  }
  if (reg == 0.0 || n == 0) return;
  std::vector<double> colsum(q, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    auto in = x.row(i);
    for (std::size_t c = 0; c < q; ++c) colsum[c] += in[c];
  }
  const double scale = reg / n;
  for (NodeId i = 0; i < n; ++i) {
    auto out = y.row(i);
    for (std::size_t c = 0; c < q; ++c) out[c] += scale * colsum[c];
  }
}

int RowArgmax(std::span<const double> row) {
  int best = 0;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] > row[best]) best = static_cast<int>(k);
  }
  return best;
}

double XLogX(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Closed-form block-model parameters given responsibilities, and the ELBO
// they attain.
struct BlockModel {
  std::vector<double> log_pi;
  Matrix log_b;
  Matrix log_1mb;
  double elbo = 0.0;
};

BlockModel FitBlockModel(const Graph& graph, const Matrix& tau) {
  const NodeId n = graph.num_nodes();
  const std::size_t K = tau.cols();
  std::vector<double> mass(K, 0.0);
  Matrix self(K, K);
  Matrix edges(K, K);
  std::vector<double> nb(K);
  for (NodeId i = 0; i < n; ++i) {
    auto ti = tau.row(i);
    std::fill(nb.begin(), nb.end(), 0.0);
    for (NodeId j : graph.neighbors(i)) {
      auto tj = tau.row(j);
      for (std::size_t l = 0; l < K; ++l) nb[l] += tj[l];
    }
    for (std::size_t k = 0; k < K; ++k) {
      mass[k] += ti[k];
      for (std::size_t l = 0; l < K; ++l) {
        edges(k, l) += ti[k] * nb[l];
        self(k, l) += ti[k] * ti[l];
      }
    }
  }

  BlockModel m;
  m.log_pi.resize(K);
  m.log_b = Matrix(K, K);
  m.log_1mb = Matrix(K, K);
  double entropy_and_prior = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    m.log_pi[k] = std::log(std::max(mass[k] / n, kProbabilityFloor));
  }
  for (NodeId i = 0; i < n; ++i) {
    auto ti = tau.row(i);
    for (std::size_t k = 0; k < K; ++k) {
      entropy_and_prior += ti[k] * m.log_pi[k] - XLogX(ti[k]);
    }
  }
  double likelihood = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < K; ++l) {
      const double pairs = mass[k] * mass[l] - self(k, l);
      double b = pairs > 0.0 ? edges(k, l) / pairs : 0.0;
      b = std::clamp(b, kProbabilityFloor, 1.0 - kProbabilityFloor);
      m.log_b(k, l) = std::log(b);
      m.log_1mb(k, l) = std::log1p(-b);
      likelihood += edges(k, l) * m.log_b(k, l) +
                    std::max(pairs - edges(k, l), 0.0) * m.log_1mb(k, l);
    }
  }
  // Ordered pairs count every edge twice.
  m.elbo = entropy_and_prior + 0.5 * likelihood;
  return m;
}

// Starting point for the first E-step: uniform proportions and a mildly
// assortative block matrix at the observed edge density. Block estimates
// fitted to random responsibilities are nearly flat, and sequential updates
// against them drift every node into the same cluster.
BlockModel AssortativeStart(const Graph& graph, int K) {
  const NodeId n = graph.num_nodes();
  const double pairs = 0.5 * static_cast<double>(n) * (n - 1);
  const double density =
      pairs > 0.0 ? static_cast<double>(graph.num_edges()) / pairs : 0.0;
  BlockModel m;
  m.log_pi.assign(K, -std::log(static_cast<double>(K)));
  m.log_b = Matrix(K, K);
  m.log_1mb = Matrix(K, K);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      double b = k == l ? 1.5 * density : 0.5 * density;
      b = std::clamp(b, kProbabilityFloor, 1.0 - kProbabilityFloor);
      m.log_b(k, l) = std::log(b);
      m.log_1mb(k, l) = std::log1p(-b);
    }
  }
  m.elbo = -std::numeric_limits<double>::infinity();
  return m;
}

void UpdateResponsibilities(const Graph& graph, const BlockModel& m,
                            Matrix& tau) {
  const NodeId n = graph.num_nodes();
  const std::size_t K = tau.cols();
  std::vector<double> mass(K, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < K; ++k) mass[k] += tau(i, k);
  }
  std::vector<double> nb(K), logit(K);
  for (NodeId i = 0; i < n; ++i) {
    auto ti = tau.row(i);
    std::fill(nb.begin(), nb.end(), 0.0);
    for (NodeId j : graph.neighbors(i)) {
      auto tj = tau.row(j);
      for (std::size_t l = 0; l < K; ++l) nb[l] += tj[l];
    }
    for (std::size_t l = 0; l < K; ++l) mass[l] -= ti[l];
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      double v = m.log_pi[k];
      for (std::size_t l = 0; l < K; ++l) {
        v += nb[l] * m.log_b(k, l) + (mass[l] - nb[l]) * m.log_1mb(k, l);
      }
      logit[k] = v;
      top = std::max(top, v);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < K; ++k) z += std::exp(logit[k] - top);
    for (std::size_t k = 0; k < K; ++k) {
      ti[k] = std::exp(logit[k] - top) / z;
      mass[k] += ti[k];
    }
  }
}

}  // namespace

absl::Status SpectralOptions::Validate() const {
  if (regularizer.has_value() && !(*regularizer >= 0.0)) {
    return absl::InvalidArgumentError("regularizer must be >= 0");
  }
  if (!(eig_tol > 0.0)) return absl::InvalidArgumentError("eig_tol must be > 0");
  if (eig_max_iter < 1) {
    return absl::InvalidArgumentError("eig_max_iter must be >= 1");
  }
  if (kmeans_restarts < 1) {
    return absl::InvalidArgumentError("kmeans_restarts must be >= 1");
  }
  return absl::OkStatus();
}

absl::Status MeanFieldOptions::Validate() const {
  if (restarts < 1) return absl::InvalidArgumentError("restarts must be >= 1");
  if (max_sweeps < 1) {
    return absl::InvalidArgumentError("max_sweeps must be >= 1");
  }
  if (!(tol > 0.0)) return absl::InvalidArgumentError("tol must be > 0");
  return absl::OkStatus();
}

absl::StatusOr<MembershipMatrix> SpectralCluster(const Graph& graph, int K,
                                                 const SpectralOptions& opts,
                                                 uint64_t seed) {
  if (absl::Status s = opts.Validate(); !s.ok()) return s;
  const NodeId n = graph.num_nodes();
  if (K < 1 || K > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("spectral clustering needs 1 <= K <= n; got K=", K,
                     ", n=", n));
  }
  const double mean_degree = 2.0 * static_cast<double>(graph.num_edges()) / n;
  const double reg = opts.variant == SpectralVariant::kAdjacency
                         ? 0.0
                         : opts.regularizer.value_or(mean_degree);

  SymmetricOperator op;
  op.dim = n;
  std::vector<double> dinv;
  if (opts.variant == SpectralVariant::kLaplacianRowNorm) {
    dinv.resize(n);
    for (NodeId i = 0; i < n; ++i) {
      const double d = static_cast<double>(graph.degree(i)) + reg;
      dinv[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    // Shifted by the identity so that the largest-magnitude eigenvalues are
    // the algebraically largest ones of the normalized matrix.
    op.apply = [&graph, &dinv, reg](const Matrix& x, Matrix& y) {
      Matrix scaled = x;
      for (std::size_t i = 0; i < x.rows(); ++i) {
        for (double& v : scaled.row(i)) v *= dinv[i];
      }
      ApplyAdjacency(graph, reg, scaled, y);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        auto out = y.row(i);
        auto in = x.row(i);
        for (std::size_t c = 0; c < out.size(); ++c) {
          out[c] = out[c] * dinv[i] + in[c];
        }
      }
    };
  } else {
    op.apply = [&graph, reg](const Matrix& x, Matrix& y) {
      ApplyAdjacency(graph, reg, x, y);
    };
  }

  EigenOptions eopts;
  eopts.tol = opts.eig_tol;
  eopts.max_iter = opts.eig_max_iter;
  eopts.seed = DeriveSeed(seed, 0);
  absl::StatusOr<EigenPairs> eig = TopEigenpairs(op, K, eopts);
  if (!eig.ok()) return eig.status();

  Matrix embedding = std::move(eig->vectors);
  if (opts.variant == SpectralVariant::kLaplacianRowNorm) {
    for (NodeId i = 0; i < n; ++i) {
      auto row = embedding.row(i);
      double norm = 0.0;
      for (double v : row) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (double& v : row) v /= norm;
      }
    }
  }
  absl::StatusOr<KMeansResult> km =
      KMeans(embedding, K, opts.kmeans_restarts, DeriveSeed(seed, 1));
  if (!km.ok()) return km.status();
  return MembershipMatrix::FromLabels(std::move(km->labels), K);
}

absl::StatusOr<MeanFieldFit> MeanFieldSbm(const Graph& graph, int K,
                                          const MeanFieldOptions& opts,
                                          uint64_t seed) {
  if (absl::Status s = opts.Validate(); !s.ok()) return s;
  const NodeId n = graph.num_nodes();
  if (K < 1 || K > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mean-field fit needs 1 <= K <= n; got K=", K, ", n=", n));
  }
  MeanFieldFit best;
  best.elbo = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng = MakeRng(DeriveSeed(seed, r));
    Matrix tau(n, K);
    for (NodeId i = 0; i < n; ++i) {
      double total = 0.0;
      for (double& v : tau.row(i)) {
        v = 0.05 + Uniform01(rng);
        total += v;
      }
      for (double& v : tau.row(i)) v /= total;
    }
    BlockModel model =
        K > 1 ? AssortativeStart(graph, K) : FitBlockModel(graph, tau);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      UpdateResponsibilities(graph, model, tau);
      const double previous = model.elbo;
      model = FitBlockModel(graph, tau);
      if (std::abs(model.elbo - previous) < opts.tol) break;
    }
    if (model.elbo > best.elbo) {
      best.elbo = model.elbo;
      best.responsibilities = std::move(tau);
    }
  }
  std::vector<int> labels(n);
  for (NodeId i = 0; i < n; ++i) {
    labels[i] = RowArgmax(best.responsibilities.row(i));
  }
  absl::StatusOr<MembershipMatrix> z =
      MembershipMatrix::FromLabels(std::move(labels), K);
  if (!z.ok()) return z.status();
  best.membership = *std::move(z);
  return best;
}

absl::StatusOr<MembershipMatrix> SpectralClusterer::Cluster(
    const Graph& graph, int K, uint64_t seed) const {
  return SpectralCluster(graph, K, opts_, seed);
}

absl::StatusOr<MembershipMatrix> MeanFieldClusterer::Cluster(
    const Graph& graph, int K, uint64_t seed) const {
  absl::StatusOr<MeanFieldFit> fit = MeanFieldSbm(graph, K, opts_, seed);
  if (!fit.ok()) return fit.status();
  return std::move(fit->membership);
}

absl::StatusOr<std::unique_ptr<BaseClusterer>> MakeBaseClusterer(
    const BaseClustererSpec& spec) {
  if (spec.name == "mfl") {
    if (absl::Status s = spec.mean_field.Validate(); !s.ok()) return s;
    return std::make_unique<MeanFieldClusterer>(spec.mean_field);
  }
  SpectralOptions opts = spec.spectral;
  if (spec.name == "spectral_adj") {
    opts.variant = SpectralVariant::kAdjacency;
  } else if (spec.name == "rsc") {
    opts.variant = SpectralVariant::kRegularizedAdjacency;
  } else if (spec.name == "laplacian_rn") {
    opts.variant = SpectralVariant::kLaplacianRowNorm;
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown base clusterer '", spec.name,
        "'; expected spectral_adj, rsc, laplacian_rn or mfl"));
  }
  if (absl::Status s = opts.Validate(); !s.ok()) return s;
  return std::make_unique<SpectralClusterer>(spec.name, opts);
}

}  // namespace stitch
