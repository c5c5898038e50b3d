// Copyright 2026 The Stampede Authors
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

#include "stampede/linalg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stampede::linalg {

namespace {

// In-place Cholesky of a bd x bd row-major SPD block. Returns false if the
// block is not positive definite.
bool cholesky(double* a, int bd) {
  for (int i = 0; i < bd; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * bd + j];
      for (int k = 0; k < j; ++k) s -= a[i * bd + k] * a[j * bd + k];
      if (i == j) {
        if (s <= 0) return false;
        a[i * bd + i] = std::sqrt(s);
      } else {
        a[i * bd + j] = s / a[j * bd + j];
      }
    }
  }
  return true;
}

void cholesky_solve(const double* l, int bd, const double* rhs, double* out) {
  // forward substitution L y = rhs
  for (int i = 0; i < bd; ++i) {
    double s = rhs[i];
    for (int k = 0; k < i; ++k) s -= l[i * bd + k] * out[k];
    out[i] = s / l[i * bd + i];
  }
  // back substitution L' x = y
  for (int i = bd - 1; i >= 0; --i) {
    double s = out[i];
    for (int k = i + 1; k < bd; ++k) s -= l[k * bd + i] * out[k];
    out[i] = s / l[i * bd + i];
  }
}

// Block-Jacobi preconditioner: factored diagonal blocks, identity fallback
// for blocks that are absent or not positive definite.
class BlockJacobi {
 public:
  BlockJacobi(const BlockSparseSym& a) : bd_(a.block_dim()), count_(a.block_count()) {
    factors_.assign(static_cast<std::size_t>(count_) * bd_ * bd_, 0.0);
    ok_.assign(count_, false);
    a.for_each_diagonal([&](int i, const double* blk) {
      double* f = factors_.data() + static_cast<std::size_t>(i) * bd_ * bd_;
      std::copy(blk, blk + bd_ * bd_, f);
      ok_[i] = cholesky(f, bd_);
    });
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    for (int i = 0; i < count_; ++i) {
      const double* ri = r.data() + static_cast<std::size_t>(i) * bd_;
      double* zi = z.data() + static_cast<std::size_t>(i) * bd_;
      if (ok_[i]) {
        cholesky_solve(factors_.data() + static_cast<std::size_t>(i) * bd_ * bd_, bd_, ri, zi);
      } else {
        std::copy(ri, ri + bd_, zi);
      }
    }
  }

 private:
  int bd_, count_;
  std::vector<double> factors_;
  std::vector<bool> ok_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

SolveStats solve_krylov_inplace(const BlockSparseSym& A, std::span<const double> b,
                                std::span<double> x, const KrylovOptions& opts) {
  const int n = A.dim();
  if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
    throw std::invalid_argument("solve_krylov: dimension mismatch");
  if (opts.tol <= 0 || opts.max_iters < 1)
    throw std::invalid_argument("solve_krylov: tol must be > 0 and max_iters >= 1");
  if (!A.finite() || !all_finite(b))
    throw std::invalid_argument("solve_krylov: non-finite entries in A or b");

  SolveStats stats;
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    stats.converged = true;
    stats.residual_norm = 0.0;
    return stats;
  }

  BlockJacobi precond(A);

  std::vector<double> r(n), z(n), p(n), az(n), ap(n), map(n), tmp(n);
  A.apply(x, tmp);
  for (int i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
  precond.apply(r, z);
  p = z;
  A.apply(z, az);
  ap = az;

  double zaz = dot(z, az);
  const double tol_abs = opts.tol * b_norm;
  double r_norm = norm2(r);
  stats.residual_history.push_back(std::sqrt(std::max(0.0, dot(r, z))));

  int k = 0;
  while (k < opts.max_iters && r_norm > tol_abs) {
    precond.apply(ap, map);
    const double denom = dot(ap, map);
    if (!(denom > 0) || !(zaz > 0)) break;  // semi-definite breakdown; keep current iterate
    const double alpha = zaz / denom;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    ++k;
    precond.apply(r, z);
    r_norm = norm2(r);
    stats.residual_history.push_back(std::sqrt(std::max(0.0, dot(r, z))));
    if (r_norm <= tol_abs) break;
    A.apply(z, az);
    const double zaz_next = dot(z, az);
    const double beta = zaz_next / zaz;
    zaz = zaz_next;
    for (int i = 0; i < n; ++i) {
      p[i] = z[i] + beta * p[i];
      ap[i] = az[i] + beta * ap[i];
    }
  }

  stats.iterations = k;
  stats.residual_norm = r_norm;
  stats.converged = r_norm <= tol_abs;
  if (!all_finite(x)) {
    // Never hand back a poisoned iterate.
    std::fill(x.begin(), x.end(), 0.0);
    stats.converged = false;
  }
  return stats;
}

std::pair<std::vector<double>, SolveStats> solve_krylov(const BlockSparseSym& A,
                                                        std::span<const double> b,
                                                        double tol, int max_iters) {
  std::vector<double> x(A.dim(), 0.0);
  SolveStats stats = solve_krylov_inplace(A, b, x, KrylovOptions{tol, max_iters});
  return {std::move(x), stats};
}

}  // namespace stampede::linalg
