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

#include "qhd/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "phase_kernels.hpp"
#include "qhd/errors.hpp"

namespace qhd {

double FeatureScale::normalize(double raw) const {
  const double v = (raw - center) / half_range;
  return clip ? std::clamp(v, -1.0, 1.0) : v;
}

PositionBasis::PositionBasis(std::size_t dim, std::vector<double> bandwidths,
                             std::vector<FeatureScale> scales, std::uint64_t seed,
                             PhaseDistribution::Kind kind)
    : dim_(dim),
      bandwidths_(std::move(bandwidths)),
      scales_(std::move(scales)),
      seed_(seed),
      kind_(kind) {
  if (dim_ == 0) throw ConfigError("position basis: dim must be >= 1");
  if (bandwidths_.empty()) throw ConfigError("position basis: need at least one feature");
  if (scales_.size() != bandwidths_.size()) {
    throw ConfigError("position basis: " + std::to_string(bandwidths_.size()) +
                      " bandwidths but " + std::to_string(scales_.size()) + " feature scales");
  }
  for (std::size_t k = 0; k < bandwidths_.size(); ++k) {
    if (!(bandwidths_[k] > 0.0) || !std::isfinite(bandwidths_[k])) {
      throw ConfigError("position basis: bandwidth of feature " + std::to_string(k) +
                        " must be positive");
    }
    if (!(scales_[k].half_range > 0.0) || !std::isfinite(scales_[k].half_range) ||
        !std::isfinite(scales_[k].center)) {
      throw ConfigError("position basis: invalid scale for feature " + std::to_string(k));
    }
  }
  Rng rng = make_rng(seed_, 0x6261736973ULL);
  bases_.reserve(bandwidths_.size());
  for (double sigma : bandwidths_) {
    const PhaseDistribution dist = kind_ == PhaseDistribution::Kind::kGaussian
                                       ? PhaseDistribution::Gaussian(sigma)
                                       : PhaseDistribution::Uniform();
    bases_.push_back(random_unit(dim_, dist, rng));
  }
}

double PositionBasis::kernel(std::size_t k, double distance) const {
  const double s = bandwidths_.at(k);
  return std::exp(-0.5 * s * s * distance * distance);
}

nlohmann::json PositionBasis::to_json() const {
  nlohmann::json scales = nlohmann::json::array();
  for (const auto& s : scales_) {
    scales.push_back({{"center", s.center}, {"half_range", s.half_range}, {"clip", s.clip}});
  }
  return {{"seed", seed_},
          {"features", features()},
          {"dim", dim_},
          {"distribution", kind_ == PhaseDistribution::Kind::kGaussian ? "gaussian" : "uniform"},
          {"bandwidths", bandwidths_},
          {"feature_scale", scales}};
}

PositionBasis PositionBasis::from_json(const nlohmann::json& j) {
  try {
    std::vector<FeatureScale> scales;
    for (const auto& s : j.at("feature_scale")) {
      scales.push_back({s.at("center").get<double>(), s.at("half_range").get<double>(),
                        s.value("clip", false)});
    }
    const std::string dist = j.value("distribution", "gaussian");
    if (dist != "gaussian" && dist != "uniform") {
      throw ConfigError("position basis: unknown distribution '" + dist + "'");
    }
    auto bandwidths = j.at("bandwidths").get<std::vector<double>>();
    if (j.contains("features") && j.at("features").get<std::size_t>() != bandwidths.size()) {
      throw ConfigError("position basis: 'features' disagrees with bandwidth count");
    }
    return PositionBasis(j.at("dim").get<std::size_t>(), std::move(bandwidths), std::move(scales),
                         j.at("seed").get<std::uint64_t>(),
                         dist == "gaussian" ? PhaseDistribution::Kind::kGaussian
                                            : PhaseDistribution::Kind::kUniform);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("position basis json: ") + e.what());
  }
}

EncodedState::EncodedState(UnitHypervector hypervector, std::size_t source_dim)
    : hv_(std::move(hypervector)),
      re_(hv_.dim()),
      im_(hv_.dim()),
      source_dim_(source_dim) {
  detail::sincos(hv_.phases(), re_, im_);
}

std::vector<double> normalize_state(const PositionBasis& basis, std::span<const double> state) {
  if (state.size() != basis.features()) {
    throw DimensionError("encode: state has " + std::to_string(state.size()) +
                         " features, basis expects " + std::to_string(basis.features()));
  }
  std::vector<double> out(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) {
    if (!std::isfinite(state[k])) {
      throw EncodingError("encode: feature " + std::to_string(k) + " is not finite");
    }
    out[k] = basis.scales()[k].normalize(state[k]);
  }
  return out;
}

EncodedState encode_normalized(const PositionBasis& basis, std::span<const double> normalized) {
  if (normalized.size() != basis.features()) {
    throw DimensionError("encode: state has " + std::to_string(normalized.size()) +
                         " features, basis expects " + std::to_string(basis.features()));
  }
  std::vector<double> phases(basis.dim(), 0.0);
  for (std::size_t k = 0; k < normalized.size(); ++k) {
    const double s = normalized[k];
    if (!std::isfinite(s)) {
      throw EncodingError("encode: feature " + std::to_string(k) + " is not finite");
    }
    const auto p = basis.basis(k).phases();
    for (std::size_t j = 0; j < phases.size(); ++j) phases[j] += s * p[j];
  }
  return EncodedState(UnitHypervector(std::move(phases)), normalized.size());
}

EncodedState encode(const PositionBasis& basis, std::span<const double> state) {
  const auto normalized = normalize_state(basis, state);
  return encode_normalized(basis, normalized);
}

namespace {

UnitHypervector shifted_phases(const UnitHypervector& h, const UnitHypervector& p, double delta) {
  std::vector<double> phases(h.phases().begin(), h.phases().end());
  for (std::size_t j = 0; j < phases.size(); ++j) phases[j] -= delta * p.phases()[j];
  return UnitHypervector(std::move(phases));
}

}  // namespace

EncodedState shift(const EncodedState& e, std::size_t feature, double delta,
                   const PositionBasis& basis) {
  if (feature >= basis.features()) {
    throw DimensionError("shift: feature index " + std::to_string(feature) + " out of range");
  }
  if (e.dim() != basis.dim()) throw DimensionError("shift: encoding and basis dims differ");
  if (!std::isfinite(delta)) throw DomainError("shift: delta must be finite");
  return EncodedState(shifted_phases(e.hypervector(), basis.basis(feature), delta),
                      e.source_dim());
}

double decode_feature(const EncodedState& e, std::size_t feature, const PositionBasis& basis,
                      SearchInterval interval, int grid_points, const UnitHypervector& reference) {
  if (!(interval.lo < interval.hi)) throw ConfigError("decode: interval must satisfy lo < hi");
  if (grid_points < 2) throw ConfigError("decode: grid_points must be >= 2");
  if (feature >= basis.features()) {
    throw DimensionError("decode: feature index " + std::to_string(feature) + " out of range");
  }
  if (reference.dim() != e.dim() || e.dim() != basis.dim()) {
    throw DimensionError("decode: dimension mismatch");
  }
  const auto& p = basis.basis(feature);
  auto score = [&](double delta) {
    return similarity(shifted_phases(e.hypervector(), p, delta), reference);
  };

  const double step = (interval.hi - interval.lo) / (grid_points - 1);
  double best = interval.lo;
  double best_score = score(best);
  for (int g = 1; g < grid_points; ++g) {
    const double x = g == grid_points - 1 ? interval.hi : interval.lo + g * step;
    const double s = score(x);
    if (s > best_score) {
      best_score = s;
      best = x;
    }
  }

  double a = std::max(interval.lo, best - step);
  double b = std::min(interval.hi, best + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = score(c);
  double fd = score(d);
  while (b - a > 1e-9) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = score(d);
    }
  }
  const double refined = 0.5 * (a + b);
  return score(refined) >= best_score ? refined : best;
}

double decode_feature(const EncodedState& e, std::size_t feature, const PositionBasis& basis,
                      SearchInterval interval, int grid_points) {
  return decode_feature(e, feature, basis, interval, grid_points, UnitHypervector(e.dim()));
}

}  // namespace qhd
