// Copyright 2026 The privcam Authors.
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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace privcam {

using CellIndex = std::uint32_t;

// Coverage is counted in integer "units": one unit is one covered sample
// point, and a fully covered cell holds units_per_cell = s*s units. All
// sums and squared errors are therefore exact.
using Units = std::int64_t;

struct SparseEntry {
  CellIndex cell = 0;
  Units value = 0;

  bool operator==(const SparseEntry&) const = default;
};

// Sparse integer vector over cell indices. Entries are kept sorted by cell
// and never store zeros.
class SparseVector {
 public:
  SparseVector() = default;

  // Entries must be strictly ascending by cell; zero values are dropped.
  static SparseVector from_sorted(std::vector<SparseEntry> entries);
  static SparseVector from_dense(std::span<const Units> dense);

  // Appends an entry past the current last cell.
  void push_back(CellIndex cell, Units value);

  Units at(CellIndex cell) const;
  Units sum() const;
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::span<const SparseEntry> entries() const { return entries_; }

  // Adds this vector scaled by `sign` into a dense buffer.
  void scatter_into(std::span<Units> dense, Units sign = 1) const;

  SparseVector& operator+=(const SparseVector& other);
  SparseVector& operator-=(const SparseVector& other);
  friend SparseVector operator+(SparseVector a, const SparseVector& b) {
    return a += b;
  }
  friend SparseVector operator-(SparseVector a, const SparseVector& b) {
    return a -= b;
  }

  bool operator==(const SparseVector&) const = default;

 private:
  static std::vector<SparseEntry> merge(const std::vector<SparseEntry>& a,
                                        const std::vector<SparseEntry>& b,
                                        Units sign);

  std::vector<SparseEntry> entries_;
};

// Change in Σ (base_n + delta_n - target_n)^2 caused by adding `delta` to
// `base`. Only the support of `delta` is visited.
Units squared_error_delta(std::span<const Units> base,
                          std::span<const Units> target,
                          const SparseVector& delta);

}  // namespace privcam
