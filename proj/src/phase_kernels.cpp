// Copyright 2026 The QHD Authors
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

#include "phase_kernels.hpp"

#include <cmath>
#include <cstddef>

namespace qhd::detail {

void sincos(std::span<const double> phases, std::span<double> cos_out, std::span<double> sin_out) {
  const double* p = phases.data();
  double* c = cos_out.data();
  double* s = sin_out.data();
  const std::size_t n = phases.size();
#pragma omp simd
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = std::cos(p[j]);
    s[j] = std::sin(p[j]);
  }
}

}  // namespace qhd::detail
