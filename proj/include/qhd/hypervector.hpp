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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qhd {

/// Random stream used throughout the library. All randomness is drawn from
/// explicitly seeded instances of this engine.
using Rng = std::mt19937_64;

/// Builds an engine from a base seed and a stream tag so that independent
/// consumers (basis, policy, replay, environment) never share a sequence.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Distribution of the phase angles of a random hypervector. Uniform phases
/// give mutually near-orthogonal vectors; Gaussian phases with standard
/// deviation sigma make fractional powers of the vector induce the kernel
/// exp(-sigma^2 d^2 / 2) between exponents.
struct PhaseDistribution {
  enum class Kind { kUniform, kGaussian };

  Kind kind = Kind::kUniform;
  double sigma = 1.0;

  static PhaseDistribution Uniform() { return {Kind::kUniform, 1.0}; }
  static PhaseDistribution Gaussian(double sigma) { return {Kind::kGaussian, sigma}; }
};

/// A D-dimensional vector of unit-modulus complex numbers e^{i theta_j},
/// stored by its phases. Binding is phase addition and a fractional power is
/// phase scaling, so both are exact in this representation.
class UnitHypervector {
 public:
  /// The binding identity: every phase is zero, every element is 1.
  explicit UnitHypervector(std::size_t dim);
  explicit UnitHypervector(std::vector<double> phases);

  std::size_t dim() const noexcept { return phases_.size(); }
  std::span<const double> phases() const noexcept { return phases_; }
  std::complex<double> operator[](std::size_t j) const { return std::polar(1.0, phases_[j]); }

  bool operator==(const UnitHypervector&) const = default;

 private:
  std::vector<double> phases_;
};

/// Read-only split-layout view of a complex vector.
struct ComplexView {
  std::span<const double> re;
  std::span<const double> im;

  std::size_t dim() const noexcept { return re.size(); }
};

/// General complex vector used for bundles and regression models. Updated in
/// place; a default-constructed accumulator of a given dimension is exactly 0.
class ComplexAccumulator {
 public:
  explicit ComplexAccumulator(std::size_t dim);

  /// Materializes the complex elements of a unit hypervector, times weight.
  static ComplexAccumulator FromUnit(const UnitHypervector& h, double weight = 1.0);

  std::size_t dim() const noexcept { return re_.size(); }
  std::span<const double> re() const noexcept { return re_; }
  std::span<const double> im() const noexcept { return im_; }
  std::span<double> re() noexcept { return re_; }
  std::span<double> im() noexcept { return im_; }
  ComplexView view() const noexcept { return {re_, im_}; }
  std::complex<double> operator[](std::size_t j) const { return {re_[j], im_[j]}; }

  /// this += weight * v
  void add_scaled(ComplexView v, double weight);
  void scale(double factor);
  double norm() const;
  bool is_zero() const;

  bool operator==(const ComplexAccumulator&) const = default;

 private:
  std::vector<double> re_;
  std::vector<double> im_;
};

/// Draws dim i.i.d. phases from the given distribution.
UnitHypervector random_unit(std::size_t dim, const PhaseDistribution& dist, Rng& rng);

/// Element-wise complex product (phase addition).
UnitHypervector bind(const UnitHypervector& a, const UnitHypervector& b);

/// Element-wise real power (phase scaling). power(h, -1) is the binding inverse.
UnitHypervector power(const UnitHypervector& a, double exponent);

/// Adds h into acc in place.
void bundle(ComplexAccumulator& acc, const UnitHypervector& h);

/// Cosine similarity Re<a, conj(b)> / (|a||b|).
double similarity(ComplexView a, ComplexView b);
double similarity(const UnitHypervector& a, const UnitHypervector& b);
double similarity(const ComplexAccumulator& a, const UnitHypervector& b);
double similarity(const UnitHypervector& a, const ComplexAccumulator& b);
double similarity(const ComplexAccumulator& a, const ComplexAccumulator& b);

/// Re(sum_j a_j conj(b_j)) / D.
double raw_dot(ComplexView a, ComplexView b);
double raw_dot(const ComplexAccumulator& a, const UnitHypervector& b);

}  // namespace qhd
