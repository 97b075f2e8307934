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
#include <cstdint>
#include <filesystem>
#include <vector>

#include "qhd/encoder.hpp"
#include "qhd/hypervector.hpp"

namespace qhd {

/// Which vector the regression update adds to the model. kState adds S, so
/// that the conjugate inner product used for prediction returns exactly the
/// applied correction; kConjugate adds conj(S).
enum class UpdateConvention { kState, kConjugate };

struct QModelOptions {
  /// Divide inner products by D, making learning rates and Q-value scales
  /// independent of the dimension.
  bool normalize_by_dim = true;
  UpdateConvention convention = UpdateConvention::kState;

  bool operator==(const QModelOptions&) const = default;
};

/// Hyperdimensional regression model: one complex model hypervector per
/// action, all starting at zero. Q(s, a) = Re<M_a, conj(S)> (/ D).
class QModel {
 public:
  QModel(std::size_t dim, std::size_t n_actions, QModelOptions options = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t n_actions() const noexcept { return models_.size(); }
  const QModelOptions& options() const noexcept { return options_; }

  const ComplexAccumulator& model(std::size_t action) const;
  /// Direct access for checkpoint loading and hand-built test models.
  ComplexAccumulator& mutable_model(std::size_t action);

  double predict(const EncodedState& s, std::size_t action) const;
  std::vector<double> predict_all(const EncodedState& s) const;

  /// M_a += beta * (q_true - q_pred) * S. Throws DivergenceError when the
  /// error term is not finite; the model is left untouched in that case.
  void update(const EncodedState& s, std::size_t action, double q_true, double q_pred, double beta);

  QModel clone() const { return *this; }

  bool operator==(const QModel&) const = default;

  /// Binary checkpoint: magic "QHDM", u32 version, u64 dim, u64 n_actions,
  /// u64 encoder seed, u8 normalize flag, u8 convention, then for each
  /// action D real parts followed by D imaginary parts as little-endian
  /// IEEE-754 doubles.
  void save(const std::filesystem::path& path, std::uint64_t encoder_seed) const;
  static QModel load(const std::filesystem::path& path, std::uint64_t* encoder_seed = nullptr);

 private:
  void check_action(std::size_t action) const;
  double inner(const ComplexAccumulator& m, const EncodedState& s) const;

  std::size_t dim_;
  QModelOptions options_;
  std::vector<ComplexAccumulator> models_;
};

}  // namespace qhd
