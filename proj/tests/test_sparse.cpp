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

#include <doctest.h>

#include <random>
#include <vector>

#include "privcam/sparse.hpp"

using namespace privcam;

TEST_CASE("construction drops zeros and keeps order") {
  const std::vector<Units> dense = {0, 3, 0, 0, 5, 1};
  const SparseVector v = SparseVector::from_dense(dense);
  CHECK(v.size() == 3);
  CHECK(v.at(1) == 3);
  CHECK(v.at(2) == 0);
  CHECK(v.at(99) == 0);
  CHECK(v.sum() == 9);
  CHECK(SparseVector::from_sorted({{1, 3}, {4, 0}, {5, 1}}).size() == 2);
  CHECK_THROWS(SparseVector::from_sorted({{4, 1}, {4, 2}}));
  CHECK_THROWS(SparseVector::from_sorted({{4, 1}, {2, 2}}));
  SparseVector w;
  w.push_back(2, 7);
  CHECK_THROWS(w.push_back(2, 1));
}

TEST_CASE("arithmetic matches dense arithmetic") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> val(-3, 3);
  for (int i = 0; i < 200; ++i) {
    std::vector<Units> a(40), b(40);
    for (auto& x : a) x = rng() % 3 ? 0 : val(rng);
    for (auto& x : b) x = rng() % 3 ? 0 : val(rng);
    const SparseVector sa = SparseVector::from_dense(a), sb = SparseVector::from_dense(b);
    std::vector<Units> sum(40), diff(40);
    for (int n = 0; n < 40; ++n) {
      sum[n] = a[n] + b[n];
      diff[n] = a[n] - b[n];
    }
    CHECK(sa + sb == SparseVector::from_dense(sum));
    CHECK(sa - sb == SparseVector::from_dense(diff));
    CHECK((sa - sa).empty());

    std::vector<Units> buf(40, 0);
    sa.scatter_into(buf);
    sb.scatter_into(buf, -1);
    CHECK(buf == diff);
  }
}

TEST_CASE("squared-error delta equals the difference of full sums") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> val(-16, 16);
  for (int i = 0; i < 200; ++i) {
    std::vector<Units> base(30), target(30), delta(30);
    for (int n = 0; n < 30; ++n) {
      base[n] = val(rng) + 16;
      target[n] = rng() % 2 ? 16 : 0;
      delta[n] = rng() % 4 ? 0 : val(rng);
    }
    Units before = 0, after = 0;
    for (int n = 0; n < 30; ++n) {
      before += (base[n] - target[n]) * (base[n] - target[n]);
      after += (base[n] + delta[n] - target[n]) * (base[n] + delta[n] - target[n]);
    }
    CHECK(squared_error_delta(base, target, SparseVector::from_dense(delta)) == after - before);
  }
}
