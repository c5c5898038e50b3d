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

namespace stampede::linalg {

// Symmetric block-sparse matrix with a small fixed block dimension (6 for
// the rigid-body system, where each block couples the 6 velocity dofs of a
// body pair). Blocks are dense row-major. The block pattern must be
// symmetric: callers add (i, j) and (j, i) together via add_block_pair, or
// only diagonal blocks via add_block.
class BlockSparseSym {
 public:
  BlockSparseSym(int block_dim, int block_count);

  int block_dim() const { return block_dim_; }
  int block_count() const { return block_count_; }
  int dim() const { return block_dim_ * block_count_; }

  // Returns storage for block (i, j), creating a zero block if absent.
  double* block(int i, int j);
  const double* find_block(int i, int j) const;

  // y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;

  // Pattern symmetry: (i, j) present iff (j, i) present.
  bool pattern_symmetric() const;
  bool finite() const;

  // Dense reconstruction, for small instances and tests.
  std::vector<double> to_dense() const;

  template <typename Fn>
  void for_each_diagonal(Fn&& fn) const {
    for (int i = 0; i < block_count_; ++i) {
      const double* b = find_block(i, i);
      if (b) fn(i, b);
    }
  }

 private:
  struct BlockRef {
    int col;
    int offset;  // into pool_
  };

  int block_dim_;
  int block_count_;
  std::vector<std::vector<BlockRef>> rows_;  // sorted by col
  std::vector<double> pool_;
};

}  // namespace stampede::linalg
