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

#pragma once

#include <span>
#include <vector>

#include "stampede/linalg/block_sparse.hpp"

namespace stampede::linalg {

struct SolveStats {
  int iterations = 0;
  double residual_norm = 0;  // final ||A x - b||_2
  bool converged = false;
  // Preconditioned residual norm sqrt(r' M^-1 r) per iteration, starting at
  // the initial iterate. Conjugate residual makes this non-increasing.
  std::vector<double> residual_history;
};

struct KrylovOptions {
  double tol = 1e-6;   // relative: ||A x - b|| <= tol * ||b||
  int max_iters = 16;
};

// Preconditioned conjugate residual with a block-Jacobi (block diagonal)
// preconditioner. Valid for symmetric positive semi-definite systems, which
// is what contact regularization produces; on breakdown the current iterate
// is returned and the residual stays finite.
//
// x holds the initial iterate on entry (warm start) and the solution on
// exit.
SolveStats solve_krylov_inplace(const BlockSparseSym& A, std::span<const double> b,
                                std::span<double> x, const KrylovOptions& opts);

// Cold-start convenience overload.
std::pair<std::vector<double>, SolveStats> solve_krylov(const BlockSparseSym& A,
                                                        std::span<const double> b,
                                                        double tol, int max_iters);

}  // namespace stampede::linalg
