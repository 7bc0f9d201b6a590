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

#include "privcam/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace privcam {

SparseVector SparseVector::from_sorted(std::vector<SparseEntry> entries) {
  SparseVector out;
  out.entries_.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.cell, e.value);
  return out;
}

SparseVector SparseVector::from_dense(std::span<const Units> dense) {
  SparseVector out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0) out.entries_.push_back({static_cast<CellIndex>(i), dense[i]});
  }
  return out;
}

void SparseVector::push_back(CellIndex cell, Units value) {
  if (!entries_.empty() && entries_.back().cell >= cell) {
    throw std::invalid_argument("SparseVector::push_back: cells must ascend");
  }
  if (value != 0) entries_.push_back({cell, value});
}

Units SparseVector::at(CellIndex cell) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), cell,
      [](const SparseEntry& e, CellIndex c) { return e.cell < c; });
  return (it != entries_.end() && it->cell == cell) ? it->value : 0;
}

Units SparseVector::sum() const {
  Units total = 0;
  for (const auto& e : entries_) total += e.value;
  return total;
}

void SparseVector::scatter_into(std::span<Units> dense, Units sign) const {
  for (const auto& e : entries_) dense[e.cell] += sign * e.value;
}

std::vector<SparseEntry> SparseVector::merge(const std::vector<SparseEntry>& a,
                                             const std::vector<SparseEntry>& b,
                                             Units sign) {
  std::vector<SparseEntry> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].cell < b[j].cell)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].cell < a[i].cell) {
      out.push_back({b[j].cell, sign * b[j].value});
      ++j;
    } else {
      const Units v = a[i].value + sign * b[j].value;
      if (v != 0) out.push_back({a[i].cell, v});
      ++i;
      ++j;
    }
  }
  return out;
}

SparseVector& SparseVector::operator+=(const SparseVector& other) {
  if (!other.empty()) entries_ = merge(entries_, other.entries_, 1);
  return *this;
}

SparseVector& SparseVector::operator-=(const SparseVector& other) {
  if (!other.empty()) entries_ = merge(entries_, other.entries_, -1);
  return *this;
}

Units squared_error_delta(std::span<const Units> base,
                          std::span<const Units> target,
                          const SparseVector& delta) {
  Units change = 0;
  for (const auto& e : delta) {
    const Units before = base[e.cell] - target[e.cell];
    const Units after = before + e.value;
    change += after * after - before * before;
  }
  return change;
}

}  // namespace privcam
