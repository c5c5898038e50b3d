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

#include "stampede/linalg/block_sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stampede::linalg {

BlockSparseSym::BlockSparseSym(int block_dim, int block_count)
    : block_dim_(block_dim), block_count_(block_count), rows_(block_count) {
  if (block_dim < 1 || block_count < 0) throw std::invalid_argument("bad block sparse dimensions");
}

double* BlockSparseSym::block(int i, int j) {
  auto& row = rows_.at(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const BlockRef& r, int col) { return r.col < col; });
  if (it != row.end() && it->col == j) return pool_.data() + it->offset;
  const int offset = static_cast<int>(pool_.size());
  pool_.resize(pool_.size() + static_cast<std::size_t>(block_dim_) * block_dim_, 0.0);
  // pool_ may have reallocated; recompute iterator position by index
  const auto idx = it - row.begin();
  row.insert(row.begin() + idx, BlockRef{j, offset});
  return pool_.data() + offset;
}

const double* BlockSparseSym::find_block(int i, int j) const {
  const auto& row = rows_.at(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const BlockRef& r, int col) { return r.col < col; });
  if (it != row.end() && it->col == j) return pool_.data() + it->offset;
  return nullptr;
}

void BlockSparseSym::apply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != dim() || static_cast<int>(y.size()) != dim())
    throw std::invalid_argument("block sparse apply: dimension mismatch");
  const int bd = block_dim_;
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < block_count_; ++i) {
    double* yi = y.data() + static_cast<std::size_t>(i) * bd;
    for (const auto& ref : rows_[i]) {
      const double* b = pool_.data() + ref.offset;
      const double* xj = x.data() + static_cast<std::size_t>(ref.col) * bd;
      for (int r = 0; r < bd; ++r) {
        double s = 0;
        const double* brow = b + r * bd;
        for (int c = 0; c < bd; ++c) s += brow[c] * xj[c];
        yi[r] += s;
      }
    }
  }
}

std::vector<double> BlockSparseSym::apply(std::span<const double> x) const {
  std::vector<double> y(dim());
  apply(x, y);
  return y;
}

bool BlockSparseSym::pattern_symmetric() const {
  for (int i = 0; i < block_count_; ++i) {
    for (const auto& ref : rows_[i]) {
      if (!find_block(ref.col, i)) return false;
    }
  }
  return true;
}

bool BlockSparseSym::finite() const {
  for (double v : pool_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::vector<double> BlockSparseSym::to_dense() const {
  const int n = dim();
  std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
  const int bd = block_dim_;
  for (int i = 0; i < block_count_; ++i) {
    for (const auto& ref : rows_[i]) {
      const double* b = pool_.data() + ref.offset;
      for (int r = 0; r < bd; ++r)
        for (int c = 0; c < bd; ++c)
          dense[static_cast<std::size_t>(i * bd + r) * n + (ref.col * bd + c)] = b[r * bd + c];
    }
  }
  return dense;
}

}  // namespace stampede::linalg
