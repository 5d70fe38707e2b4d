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

#ifndef STITCH_EIGENSOLVER_H_
#define STITCH_EIGENSOLVER_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "absl/status/statusor.h"
#include "stitch/matrix.h"

namespace stitch {

// Symmetric linear operator applied to a block of column vectors:
// apply(x, y) sets y = A x for x, y of shape dim x q.
struct SymmetricOperator {
  int64_t dim = 0;
  std::function<void(const Matrix& x, Matrix& y)> apply;
};

struct EigenOptions {
  // Residual bound relative to the operator norm estimate.
  double tol = 1e-6;
  int max_iter = 5000;
  // Extra block columns beyond K; widens the spectral gap that governs
  // convergence.
  int oversample = 8;
  uint64_t seed = 0;
};

struct EigenPairs {
  // Ordered by decreasing |value|.
  std::vector<double> values;
  // dim x K, orthonormal columns.
  Matrix vectors;
  double max_residual = 0.0;
  double norm_estimate = 0.0;
  int iterations = 0;
};

// All eigenpairs of a small dense symmetric matrix, eigenvalues ascending and
// eigenvectors in the matching columns.
void DenseSymmetricEigen(const Matrix& a, std::vector<double>& values,
                         Matrix& vectors);

// The K eigenpairs of largest |eigenvalue| by block power iteration with
// orthonormalisation and Rayleigh-Ritz extraction, started from a seeded
// Gaussian block. Succeeds once every returned pair satisfies
// ||A v - lambda v|| <= tol * ||A||_est; otherwise fails with
// ResourceExhausted naming the best residual reached.
absl::StatusOr<EigenPairs> TopEigenpairs(const SymmetricOperator& op, int K,
                                         const EigenOptions& opts);

}  // namespace stitch

#endif  // STITCH_EIGENSOLVER_H_
