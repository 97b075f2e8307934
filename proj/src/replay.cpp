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

#include "qhd/replay.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "qhd/errors.hpp"

namespace qhd {

ReplayBuffer::ReplayBuffer(std::size_t capacity, Rng rng, ShortBatchPolicy policy)
    : capacity_(capacity), policy_(policy), rng_(std::move(rng)) {
  if (capacity_ == 0) throw ConfigError("replay: capacity must be >= 1");
  if (capacity_ > kUnlimited) capacity_ = kUnlimited;
}

void ReplayBuffer::push(Transition t) {
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
    return;
  }
  ring_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= ring_.size()) {
    throw DimensionError("replay: index " + std::to_string(i) + " >= size " +
                         std::to_string(ring_.size()));
  }
  return ring_[(head_ + i) % ring_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch) {
  std::vector<const Transition*> out;
  const std::size_t n = ring_.size();
  if (n == 0 || batch == 0) return out;
  if (n <= batch) {
    if (n < batch && policy_ == ShortBatchPolicy::kWaitFull) return out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(&at(i));
    return out;
  }
  // Floyd's algorithm: batch distinct indices from [0, n).
  std::unordered_set<std::size_t> chosen;
  std::vector<std::size_t> order;
  order.reserve(batch);
  for (std::size_t j = n - batch; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng_);
    const std::size_t idx = chosen.insert(t).second ? t : j;
    if (idx == j) chosen.insert(j);
    order.push_back(idx);
  }
  out.reserve(batch);
  for (std::size_t idx : order) out.push_back(&at(idx));
  return out;
}

}  // namespace qhd
