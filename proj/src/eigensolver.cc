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

#include "stitch/eigensolver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "stitch/random.h"

namespace stitch {

namespace {

// Householder reduction to tridiagonal form (EISPACK tred2). On exit v holds
// the accumulated orthogonal transform, d the diagonal and e the
// sub-diagonal in e[1..n-1].
void Tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(v.rows());
  for (int j = 0; j < n; ++j) d[j] = v(n - 1, j);
  for (int i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (int j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (int k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (int j = 0; j < i; ++j) e[j] = 0.0;
      for (int j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (int k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (int j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (int j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (int k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }
  for (int i = 0; i < n - 1; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (int k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (int j = 0; j <= i; ++j) {
        double g = 0.0;
        for (int k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (int k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (int k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (int j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL iteration on the tridiagonal form (EISPACK tql2).
void TridiagonalQl(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(v.rows());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      do {
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;
        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (int k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

double ColumnDot(const Matrix& a, std::size_t i, const Matrix& b,
                 std::size_t j) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * b(r, j);
  return s;
}

void FillGaussianColumn(Matrix& x, std::size_t col, Rng& rng) {
  std::normal_distribution<double> normal;
  for (std::size_t r = 0; r < x.rows(); ++r) x(r, col) = normal(rng);
}

// Modified Gram-Schmidt, applied twice per column. Columns that collapse are
// replaced with fresh random directions.
void Orthonormalize(Matrix& x, Rng& rng) {
  const std::size_t q = x.cols();
  for (std::size_t j = 0; j < q; ++j) {
    for (int attempt = 0;; ++attempt) {
      const double before = std::sqrt(ColumnDot(x, j, x, j));
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < j; ++i) {
          const double proj = ColumnDot(x, i, x, j);
          for (std::size_t r = 0; r < x.rows(); ++r) x(r, j) -= proj * x(r, i);
        }
      }
      const double after = std::sqrt(ColumnDot(x, j, x, j));
      if (after > 1e-10 * before && after > 1e-300) {
        for (std::size_t r = 0; r < x.rows(); ++r) x(r, j) /= after;
        break;
      }
      if (attempt > 8) {
        // Dimension smaller than the block; cannot happen when q <= rows.
        for (std::size_t r = 0; r < x.rows(); ++r) x(r, j) = 0.0;
        break;
      }
      FillGaussianColumn(x, j, rng);
    }
  }
}

// c = a * b for a (d x q), b (q x q).
Matrix MultiplySmall(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double ark = a(r, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(r, j) += ark * b(k, j);
    }
  }
  return c;
}

}  // namespace

void DenseSymmetricEigen(const Matrix& a, std::vector<double>& values,
                         Matrix& vectors) {
  const std::size_t n = a.rows();
  vectors = a;
  values.assign(n, 0.0);
  if (n == 0) return;
  if (n == 1) {
    values[0] = a(0, 0);
    vectors(0, 0) = 1.0;
    return;
  }
  std::vector<double> e(n, 0.0);
  Tridiagonalize(vectors, values, e);
  TridiagonalQl(vectors, values, e);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> sorted_values(n);
  Matrix sorted_vectors(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted_values[j] = values[order[j]];
    for (std::size_t r = 0; r < n; ++r) sorted_vectors(r, j) = vectors(r, order[j]);
  }
  values = std::move(sorted_values);
  vectors = std::move(sorted_vectors);
}

absl::StatusOr<EigenPairs> TopEigenpairs(const SymmetricOperator& op, int K,
                                         const EigenOptions& opts) {
  const int64_t d = op.dim;
  if (K < 1 || K > d) {
    return absl::InvalidArgumentError(
        absl::StrCat("requested ", K, " eigenpairs of a ", d, "-dim operator"));
  }
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    return absl::InvalidArgumentError("tol must be > 0 and max_iter >= 1");
  }
  const auto q = static_cast<std::size_t>(
      std::min<int64_t>(d, K + std::max(0, opts.oversample)));
  Rng rng = MakeRng(opts.seed);
  Matrix x(d, q);
  for (std::size_t j = 0; j < q; ++j) FillGaussianColumn(x, j, rng);
  Orthonormalize(x, rng);

  Matrix y(d, q);
  std::vector<double> ritz_values;
  Matrix ritz_vectors;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    op.apply(x, y);

    // Rayleigh-Ritz on span(x): H = x^T A x.
    Matrix h(q, q);
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = i; j < q; ++j) {
        const double v = 0.5 * (ColumnDot(x, i, y, j) + ColumnDot(x, j, y, i));
        h(i, j) = h(j, i) = v;
      }
    }
    DenseSymmetricEigen(h, ritz_values, ritz_vectors);
    std::vector<std::size_t> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(ritz_values[a]) > std::abs(ritz_values[b]);
    });
    Matrix w(q, q);
    std::vector<double> lambda(q);
    for (std::size_t j = 0; j < q; ++j) {
      lambda[j] = ritz_values[order[j]];
      for (std::size_t i = 0; i < q; ++i) w(i, j) = ritz_vectors(i, order[j]);
    }
    Matrix v = MultiplySmall(x, w);
    Matrix av = MultiplySmall(y, w);

    const double norm_est = std::abs(lambda[0]);
    double max_res = 0.0;
    for (int j = 0; j < K; ++j) {
      double r2 = 0.0;
      for (int64_t r = 0; r < d; ++r) {
        const double diff = av(r, j) - lambda[j] * v(r, j);
        r2 += diff * diff;
      }
      max_res = std::max(max_res, std::sqrt(r2));
    }
    best_residual = std::min(best_residual, max_res);
    if (max_res <= opts.tol * norm_est) {
      EigenPairs out;
      out.values.assign(lambda.begin(), lambda.begin() + K);
      out.vectors = Matrix(d, K);
      for (int64_t r = 0; r < d; ++r) {
        for (int j = 0; j < K; ++j) out.vectors(r, j) = v(r, j);
      }
      out.max_residual = max_res;
      out.norm_estimate = norm_est;
      out.iterations = iter;
      return out;
    }
    x = std::move(av);
    Orthonormalize(x, rng);
  }
  return absl::ResourceExhaustedError(absl::StrCat(
      "eigensolver did not converge in ", opts.max_iter,
      " iterations; best residual ", best_residual));
}

}  // namespace stitch
