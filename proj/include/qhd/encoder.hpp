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
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "qhd/hypervector.hpp"

namespace qhd {

/// Affine map of a raw feature onto the encoder's normalized axis:
/// normalized = (raw - center) / half_range, optionally clamped to [-1, 1].
/// Observation bounds map to [-1, 1]; unbounded features (velocities) use a
/// documented cap and clip = true.
struct FeatureScale {
  double center = 0.0;
  double half_range = 1.0;
  bool clip = false;

  double normalize(double raw) const;
  bool operator==(const FeatureScale&) const = default;
};

/// One random position hypervector P_k per state feature. With Gaussian
/// phases of standard deviation sigma_k, sim(P_k^x, P_k^y) concentrates around
/// exp(-sigma_k^2 (x - y)^2 / 2). Phases are re-derived from the seed; only
/// the parameters are serialized.
class PositionBasis {
 public:
  PositionBasis(std::size_t dim, std::vector<double> bandwidths, std::vector<FeatureScale> scales,
                std::uint64_t seed,
                PhaseDistribution::Kind kind = PhaseDistribution::Kind::kGaussian);

  std::size_t features() const noexcept { return bases_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  PhaseDistribution::Kind distribution() const noexcept { return kind_; }
  std::span<const double> bandwidths() const noexcept { return bandwidths_; }
  std::span<const FeatureScale> scales() const noexcept { return scales_; }
  const UnitHypervector& basis(std::size_t k) const { return bases_.at(k); }

  /// Kernel exp(-sigma_k^2 d^2 / 2) between normalized values at distance d.
  /// Only meaningful for Gaussian phases.
  double kernel(std::size_t k, double distance) const;

  nlohmann::json to_json() const;
  static PositionBasis from_json(const nlohmann::json& j);

 private:
  std::size_t dim_;
  std::vector<double> bandwidths_;
  std::vector<FeatureScale> scales_;
  std::uint64_t seed_;
  PhaseDistribution::Kind kind_;
  std::vector<UnitHypervector> bases_;
};

/// An encoded state: the phase hypervector plus its materialized complex
/// elements, which every Q-value prediction consumes.
class EncodedState {
 public:
  EncodedState(UnitHypervector hypervector, std::size_t source_dim);

  const UnitHypervector& hypervector() const noexcept { return hv_; }
  ComplexView view() const noexcept { return {re_, im_}; }
  std::size_t dim() const noexcept { return hv_.dim(); }
  std::size_t source_dim() const noexcept { return source_dim_; }

 private:
  UnitHypervector hv_;
  std::vector<double> re_;
  std::vector<double> im_;
  std::size_t source_dim_;
};

/// H = P_1^{s_1} * ... * P_n^{s_n} with s_k the normalized features.
/// Throws EncodingError for non-finite input and DimensionError for a length
/// mismatch.
EncodedState encode(const PositionBasis& basis, std::span<const double> state);

/// Same as encode() but the state is already on the normalized axis.
EncodedState encode_normalized(const PositionBasis& basis, std::span<const double> normalized);

/// Normalized feature vector as seen by the encoder.
std::vector<double> normalize_state(const PositionBasis& basis, std::span<const double> state);

/// e * P_k^{-delta}: the encoding of the same state with normalized feature k
/// moved by -delta.
EncodedState shift(const EncodedState& e, std::size_t feature, double delta,
                   const PositionBasis& basis);

struct SearchInterval {
  double lo;
  double hi;
};

/// Recovers normalized feature k of e by searching for the shift that makes
/// e match `reference`, the encoding of the remaining features (feature k at
/// 0). A coarse grid over the interval is refined with golden-section search
/// around the best grid point.
double decode_feature(const EncodedState& e, std::size_t feature, const PositionBasis& basis,
                      SearchInterval interval, int grid_points, const UnitHypervector& reference);

/// Reference-free form; exact when feature k is the only non-zero feature.
double decode_feature(const EncodedState& e, std::size_t feature, const PositionBasis& basis,
                      SearchInterval interval, int grid_points);

}  // namespace qhd
