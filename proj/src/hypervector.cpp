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

#include "qhd/hypervector.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phase_kernels.hpp"
#include "qhd/errors.hpp"

namespace qhd {
namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

double squared_norm(ComplexView v) {
  double acc = 0.0;
  for (std::size_t j = 0; j < v.dim(); ++j) acc += v.re[j] * v.re[j] + v.im[j] * v.im[j];
  return acc;
}

double real_inner(ComplexView a, ComplexView b) {
  // Re(a_j * conj(b_j)) = a.re*b.re + a.im*b.im
  double acc = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) acc += a.re[j] * b.re[j] + a.im[j] * b.im[j];
  return acc;
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

UnitHypervector::UnitHypervector(std::size_t dim) : phases_(dim, 0.0) {
  if (dim == 0) throw ConfigError("hypervector dimension must be positive");
}

UnitHypervector::UnitHypervector(std::vector<double> phases) : phases_(std::move(phases)) {
  if (phases_.empty()) throw ConfigError("hypervector dimension must be positive");
}

ComplexAccumulator::ComplexAccumulator(std::size_t dim) : re_(dim, 0.0), im_(dim, 0.0) {
  if (dim == 0) throw ConfigError("accumulator dimension must be positive");
}

ComplexAccumulator ComplexAccumulator::FromUnit(const UnitHypervector& h, double weight) {
  ComplexAccumulator out(h.dim());
  detail::sincos(h.phases(), out.re_, out.im_);
  if (weight != 1.0) out.scale(weight);
  return out;
}

void ComplexAccumulator::add_scaled(ComplexView v, double weight) {
  require_same_dim(dim(), v.dim(), "add_scaled");
  for (std::size_t j = 0; j < re_.size(); ++j) {
    re_[j] += weight * v.re[j];
    im_[j] += weight * v.im[j];
  }
}

void ComplexAccumulator::scale(double factor) {
  for (auto& x : re_) x *= factor;
  for (auto& x : im_) x *= factor;
}

double ComplexAccumulator::norm() const { return std::sqrt(squared_norm(view())); }

bool ComplexAccumulator::is_zero() const {
  for (std::size_t j = 0; j < re_.size(); ++j) {
    if (re_[j] != 0.0 || im_[j] != 0.0) return false;
  }
  return true;
}

UnitHypervector random_unit(std::size_t dim, const PhaseDistribution& dist, Rng& rng) {
  if (dim == 0) throw ConfigError("random_unit: dimension must be positive");
  std::vector<double> phases(dim);
  switch (dist.kind) {
    case PhaseDistribution::Kind::kUniform: {
      std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
      for (auto& p : phases) p = u(rng);
      break;
    }
    case PhaseDistribution::Kind::kGaussian: {
      if (!(dist.sigma > 0.0) || !std::isfinite(dist.sigma)) {
        throw ConfigError("random_unit: gaussian sigma must be positive and finite");
      }
      std::normal_distribution<double> g(0.0, dist.sigma);
      for (auto& p : phases) p = g(rng);
      break;
    }
  }
  return UnitHypervector(std::move(phases));
}

UnitHypervector bind(const UnitHypervector& a, const UnitHypervector& b) {
  require_same_dim(a.dim(), b.dim(), "bind");
  std::vector<double> phases(a.dim());
  for (std::size_t j = 0; j < phases.size(); ++j) phases[j] = a.phases()[j] + b.phases()[j];
  return UnitHypervector(std::move(phases));
}

UnitHypervector power(const UnitHypervector& a, double exponent) {
  if (!std::isfinite(exponent)) throw DomainError("power: exponent must be finite");
  std::vector<double> phases(a.dim());
  for (std::size_t j = 0; j < phases.size(); ++j) phases[j] = exponent * a.phases()[j];
  return UnitHypervector(std::move(phases));
}

void bundle(ComplexAccumulator& acc, const UnitHypervector& h) {
  require_same_dim(acc.dim(), h.dim(), "bundle");
  auto re = acc.re();
  auto im = acc.im();
  for (std::size_t j = 0; j < h.dim(); ++j) {
    re[j] += std::cos(h.phases()[j]);
    im[j] += std::sin(h.phases()[j]);
  }
}

double similarity(ComplexView a, ComplexView b) {
  require_same_dim(a.dim(), b.dim(), "similarity");
  const double na = squared_norm(a);
  const double nb = squared_norm(b);
  if (na == 0.0 || nb == 0.0) throw UndefinedSimilarityError("similarity: zero-norm operand");
  return real_inner(a, b) / std::sqrt(na * nb);
}

double similarity(const UnitHypervector& a, const UnitHypervector& b) {
  require_same_dim(a.dim(), b.dim(), "similarity");
  // Both operands have norm sqrt(D).
  double acc = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) acc += std::cos(a.phases()[j] - b.phases()[j]);
  return acc / static_cast<double>(a.dim());
}

double similarity(const ComplexAccumulator& a, const UnitHypervector& b) {
  require_same_dim(a.dim(), b.dim(), "similarity");
  return similarity(a.view(), ComplexAccumulator::FromUnit(b).view());
}

double similarity(const UnitHypervector& a, const ComplexAccumulator& b) { return similarity(b, a); }

double similarity(const ComplexAccumulator& a, const ComplexAccumulator& b) {
  return similarity(a.view(), b.view());
}

double raw_dot(ComplexView a, ComplexView b) {
  require_same_dim(a.dim(), b.dim(), "raw_dot");
  return real_inner(a, b) / static_cast<double>(a.dim());
}

double raw_dot(const ComplexAccumulator& a, const UnitHypervector& b) {
  require_same_dim(a.dim(), b.dim(), "raw_dot");
  return raw_dot(a.view(), ComplexAccumulator::FromUnit(b).view());
}

}  // namespace qhd
