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

#pragma once

#include <cstddef>
#include <vector>

#include "qhd/hypervector.hpp"

namespace qhd {

/// One step of experience. `terminal` marks a true environment termination
/// (no bootstrap); an episode cut by the step cap is recorded as non-terminal.
struct Transition {
  std::vector<double> state;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;

  bool operator==(const Transition&) const = default;
};

/// What sample() does while the buffer holds fewer entries than the batch.
enum class ShortBatchPolicy {
  kUseAll,    ///< train on every stored entry
  kWaitFull,  ///< return nothing until a full batch is available
};

/// Bounded FIFO experience memory with uniform sampling without replacement.
class ReplayBuffer {
 public:
  /// Stand-in for "unlimited" capacity.
  static constexpr std::size_t kUnlimited = 1'000'000;

  ReplayBuffer(std::size_t capacity, Rng rng, ShortBatchPolicy policy = ShortBatchPolicy::kUseAll);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return ring_.size(); }
  bool empty() const noexcept { return ring_.empty(); }

  void push(Transition t);

  /// Entry i in insertion order, 0 = oldest still stored.
  const Transition& at(std::size_t i) const;

  /// min(batch, size) distinct entries. Empty result means "skip training".
  std::vector<const Transition*> sample(std::size_t batch);

 private:
  std::size_t capacity_;
  ShortBatchPolicy policy_;
  Rng rng_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;  // index of the oldest entry once the ring is full
};

}  // namespace qhd
