// Copyright 2026, The parafis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Deferred directional forgetting. Each conclusion keeps a FIFO of the
// (augmented input, weight) pairs that incremented its correlation matrix;
// once the FIFO exceeds its capacity the oldest pair is removed from C by an
// exact rank-one downdate. The coefficient matrix Pi is never decremented.

#include <cstddef>
#include <deque>

#include "parafis/fis.hpp"

namespace parafis {

struct WindowEntry {
  Vector x_aug;
  double weight = 0.0;  // normalized activation recorded at insertion
};

struct DDFWindow {
  std::size_t capacity = 0;  // ws; 0 disables the window entirely
  std::deque<WindowEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

struct DDFConsequent {
  Consequent consequent;
  DDFWindow window;
  std::size_t skipped_downdates = 0;
};

inline const Consequent& consequent_of(const DDFConsequent& c) {
  return c.consequent;
}
inline Consequent& consequent_of(DDFConsequent& c) { return c.consequent; }

inline DDFConsequent make_ddf_consequent(Consequent c, std::size_t capacity) {
  DDFConsequent out;
  out.consequent = std::move(c);
  out.window.capacity = capacity;
  return out;
}

/// WRLS step followed by the windowed decrement of C. A capacity of 0 means
/// no forgetting: nothing is memorized and this is a plain wrls_update.
inline void ddf_update(DDFConsequent& dc, const Vector& x_aug, double weight,
                       const Vector& target) {
  wrls_update(dc.consequent, x_aug, weight, target);
  if (dc.window.capacity == 0) return;
  dc.window.entries.push_back({x_aug, weight});
  while (dc.window.entries.size() > dc.window.capacity) {
    const WindowEntry& old = dc.window.entries.front();
    if (!sherman_morrison_downdate_inplace(dc.consequent.corr, old.x_aug,
                                           old.weight))
      ++dc.skipped_downdates;
    dc.window.entries.pop_front();
  }
}

/// Replaces dst's conclusion (coefficients, correlation matrix and window)
/// with a deep copy of src's.
inline void window_transfer(const DDFConsequent& src, DDFConsequent& dst) {
  dst = src;
}

/// C^{-1} - omega^{-1} I - sum_window w x x'; zero (up to rounding) while
/// the window identity holds.
inline Matrix window_residual(const DDFConsequent& dc) {
  const Consequent& c = dc.consequent;
  const auto n = c.corr.rows();
  Matrix info = Matrix::Identity(n, n) / c.omega;
  for (const auto& e : dc.window.entries)
    info.noalias() += e.weight * e.x_aug * e.x_aug.transpose();
  const Matrix c_inv = c.corr.ldlt().solve(Matrix::Identity(n, n));
  return c_inv - info;
}

}  // namespace parafis
