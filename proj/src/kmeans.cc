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

#include "stitch/kmeans.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "stitch/random.h"

namespace stitch {

namespace {

constexpr int kMaxIterations = 300;
constexpr double kMoveTolerance = 1e-8;

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

Matrix SeedPlusPlus(const Matrix& points, int K, Rng& rng) {
  const std::size_t n = points.rows();
  Matrix centroids(K, points.cols());
  auto copy_row = [&](int k, std::size_t i) {
    auto src = points.row(i);
    std::copy(src.begin(), src.end(), centroids.row(k).begin());
  };
  copy_row(0, UniformIndex(rng, n));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (int k = 1; k < K; ++k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] =
          std::min(nearest[i], SquaredDistance(points.row(i), centroids.row(k - 1)));
      total += nearest[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double ticket = Uniform01(rng) * total;
      for (pick = 0; pick + 1 < n; ++pick) {
        ticket -= nearest[pick];
        if (ticket < 0.0 && nearest[pick] > 0.0) break;
      }
      // Guard against rounding leaving us on a zero-weight point.
      while (nearest[pick] == 0.0 && pick > 0) --pick;
    } else {
      pick = UniformIndex(rng, n);
    }
    copy_row(k, pick);
  }
  return centroids;
}

// Nearest centroid for every point; ties go to the smaller index.
double Assign(const Matrix& points, const Matrix& centroids,
              std::vector<int>& labels, std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = SquaredDistance(points.row(i), centroids.row(0));
    for (std::size_t k = 1; k < centroids.rows(); ++k) {
      double d = SquaredDistance(points.row(i), centroids.row(k));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    labels[i] = best;
    dist[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

KMeansResult RunLloyd(const Matrix& points, int K, Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  KMeansResult r;
  r.centroids = SeedPlusPlus(points, K, rng);
  r.labels.assign(n, 0);
  std::vector<double> dist(n, 0.0);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Assign(points, r.centroids, r.labels, dist);

    std::vector<int> sizes(K, 0);
    for (int l : r.labels) ++sizes[l];
    for (int k = 0; k < K; ++k) {
      if (sizes[k] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[r.labels[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
      }
      if (far == n) break;  // fewer distinct points than clusters
      --sizes[r.labels[far]];
      r.labels[far] = k;
      sizes[k] = 1;
      dist[far] = 0.0;
    }

    Matrix next(K, dim);
    for (std::size_t i = 0; i < n; ++i) {
      auto src = points.row(i);
      auto dst = next.row(r.labels[i]);
      for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
    }
    double movement = 0.0;
    for (int k = 0; k < K; ++k) {
      if (sizes[k] == 0) {
        auto old = r.centroids.row(k);
        std::copy(old.begin(), old.end(), next.row(k).begin());
        continue;
      }
      for (double& v : next.row(k)) v /= sizes[k];
      movement = std::max(movement,
                          std::sqrt(SquaredDistance(next.row(k), r.centroids.row(k))));
    }
    r.centroids = std::move(next);
    if (movement < kMoveTolerance) break;
  }
  r.inertia = Assign(points, r.centroids, r.labels, dist);
  return r;
}

}  // namespace

absl::StatusOr<KMeansResult> KMeans(const Matrix& points, int K, int restarts,
                                    uint64_t seed) {
  if (K < 1 || static_cast<std::size_t>(K) > points.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "k-means needs 1 <= K <= n; got K=", K, ", n=", points.rows()));
  }
  if (restarts < 1) return absl::InvalidArgumentError("restarts must be >= 1");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = MakeRng(DeriveSeed(seed, r));
    KMeansResult run = RunLloyd(points, K, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

}  // namespace stitch
