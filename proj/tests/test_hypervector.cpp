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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "brute_force.hpp"
#include "qhd/errors.hpp"
#include "qhd/hypervector.hpp"

namespace qhd {
namespace {

constexpr std::size_t kD = 6000;

UnitHypervector uniform(std::uint64_t seed, std::size_t dim = kD) {
  Rng rng = make_rng(seed, 7);
  return random_unit(dim, PhaseDistribution::Uniform(), rng);
}

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

TEST(RandomUnit, DeterministicUnderSeed) {
  EXPECT_EQ(uniform(11), uniform(11));
  EXPECT_NE(uniform(11), uniform(12));
  Rng a = make_rng(3, 0), b = make_rng(3, 0);
  EXPECT_EQ(random_unit(64, PhaseDistribution::Gaussian(2.0), a),
            random_unit(64, PhaseDistribution::Gaussian(2.0), b));
}

TEST(RandomUnit, SingleElementHasUnitModulus) {
  for (auto dist : {PhaseDistribution::Uniform(), PhaseDistribution::Gaussian(0.7)}) {
    Rng rng = make_rng(5, 1);
    const auto h = random_unit(1, dist, rng);
    ASSERT_EQ(h.dim(), 1u);
    EXPECT_NEAR(std::abs(h[0]), 1.0, 1e-15);
  }
}

TEST(RandomUnit, RejectsBadConfiguration) {
  Rng rng = make_rng(0, 0);
  EXPECT_THROW(random_unit(0, PhaseDistribution::Uniform(), rng), ConfigError);
  EXPECT_THROW(random_unit(8, PhaseDistribution::Gaussian(0.0), rng), ConfigError);
  EXPECT_THROW(random_unit(8, PhaseDistribution::Gaussian(-1.0), rng), ConfigError);
}

TEST(RandomUnit, UniformPhasesStayInRange) {
  const auto h = uniform(1);
  for (double p : h.phases()) {
    EXPECT_GE(p, -std::numbers::pi);
    EXPECT_LE(p, std::numbers::pi);
  }
}

TEST(RandomUnit, IndependentDrawsAreNearlyOrthogonal) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    EXPECT_LE(std::abs(similarity(uniform(2 * s), uniform(2 * s + 1))), 0.05) << "pair " << s;
  }
}

// |mean| <= 0.005 and stddev within 20% of 1/sqrt(2D) over 1000 pairs.
TEST(RandomUnit, OrthogonalityStatistic) {
  std::vector<double> sims;
  for (std::uint64_t s = 0; s < 1000; ++s) sims.push_back(similarity(uniform(10'000 + 2 * s), uniform(10'001 + 2 * s)));
  double mean = 0.0;
  for (double v : sims) mean += v;
  mean /= static_cast<double>(sims.size());
  double var = 0.0;
  for (double v : sims) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(sims.size() - 1));
  const double expected = 1.0 / std::sqrt(2.0 * kD);
  EXPECT_LE(std::abs(mean), 0.005);
  EXPECT_NEAR(sd / expected, 1.0, 0.2);
}

TEST(Bind, IdentityAndInverse) {
  const auto h = uniform(21);
  const UnitHypervector identity(kD);
  EXPECT_EQ(bind(h, identity), h);
  const auto cancelled = bind(h, power(h, -1.0));
  for (double p : cancelled.phases()) EXPECT_NEAR(p, 0.0, 1e-12);
}

TEST(Bind, IsIsometryOfSimilarity) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = uniform(100 + s), b = uniform(200 + s), k = uniform(300 + s);
    EXPECT_NEAR(similarity(bind(a, k), bind(b, k)), similarity(a, b), 1e-9);
  }
}

TEST(Bind, DimensionMismatch) {
  EXPECT_THROW(bind(uniform(1, 8), uniform(2, 9)), DimensionError);
  ComplexAccumulator acc(8);
  EXPECT_THROW(bundle(acc, uniform(1, 9)), DimensionError);
  EXPECT_THROW(similarity(uniform(1, 8), uniform(2, 9)), DimensionError);
  EXPECT_THROW(raw_dot(acc, uniform(1, 9)), DimensionError);
}

TEST(Power, ZeroAndOneExponents) {
  const auto h = uniform(31);
  for (double p : power(h, 0.0).phases()) EXPECT_EQ(p, 0.0);
  EXPECT_EQ(power(h, 1.0), h);
}

TEST(Power, RejectsNonFiniteExponent) {
  const auto h = uniform(31, 8);
  EXPECT_THROW(power(h, std::nan("")), DomainError);
  EXPECT_THROW(power(h, INFINITY), DomainError);
}

// Elements of P^a * P^b and P^(a+b) agree for |a|, |b| <= 10^3.
TEST(Power, PhaseAdditivity) {
  Rng rng = make_rng(77, 0);
  std::uniform_real_distribution<double> exps(-500.0, 500.0);
  const auto h = uniform(41, 512);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = exps(rng), b = exps(rng);
    const auto lhs = bind(power(h, a), power(h, b));
    const auto rhs = power(h, a + b);
    for (std::size_t j = 0; j < h.dim(); ++j) {
      EXPECT_LE(std::abs(lhs[j] - rhs[j]), 1e-9);
    }
  }
}

TEST(Bundle, SingletonBundleIsItsComponent) {
  const auto h = uniform(51);
  ComplexAccumulator acc(kD);
  bundle(acc, h);
  EXPECT_NEAR(similarity(acc, h), 1.0, 1e-9);
}

TEST(Bundle, TwoElementBundleResemblesMembersOnly) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto h1 = uniform(600 + s), h2 = uniform(700 + s), h3 = uniform(800 + s);
    ComplexAccumulator r(kD);
    bundle(r, h1);
    bundle(r, h2);
    const double member = similarity(r, h1);
    EXPECT_GE(member, 0.60);
    EXPECT_LE(member, 0.80);
    EXPECT_LE(std::abs(similarity(r, h3)), 0.05);
  }
}

TEST(Similarity, SelfAndSymmetry) {
  const auto h = uniform(61);
  EXPECT_NEAR(similarity(h, h), 1.0, 1e-9);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto a = uniform(900 + s, 256), b = uniform(1900 + s, 256);
    EXPECT_EQ(similarity(a, b), similarity(b, a));
  }
}

TEST(Similarity, ZeroNormIsUndefined) {
  ComplexAccumulator zero(16);
  EXPECT_THROW(similarity(zero, uniform(1, 16)), UndefinedSimilarityError);
  EXPECT_THROW(similarity(zero, zero), UndefinedSimilarityError);
}

// Tiny-D cross-check against std::complex arithmetic, including a vector with
// all phases negated and offset by pi/2.
TEST(Similarity, MatchesBruteForceAtTinyDimension) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto a = uniform(3000 + s, 8);
    std::vector<double> flipped;
    for (double p : a.phases()) flipped.push_back(-p + std::numbers::pi / 2.0);
    const UnitHypervector b(flipped);
    const auto c = uniform(4000 + s, 8);
    for (const auto* other : {&b, &c}) {
      const double expected = testing::similarity(testing::from_phases(to_vec(a.phases())),
                                                  testing::from_phases(to_vec(other->phases())));
      EXPECT_NEAR(similarity(a, *other), expected, 1e-12);
      EXPECT_NEAR(similarity(ComplexAccumulator::FromUnit(a), *other), expected, 1e-12);
    }
  }
}

TEST(RawDot, ZeroAccumulator) {
  EXPECT_EQ(raw_dot(ComplexAccumulator(kD), uniform(71)), 0.0);
}

TEST(RawDot, SelfDotIsOne) {
  const auto h = uniform(72);
  EXPECT_NEAR(raw_dot(ComplexAccumulator::FromUnit(h), h), 1.0, 1e-9);
}

TEST(RawDot, MatchesBruteForceAtTinyDimension) {
  Rng rng = make_rng(9, 9);
  std::normal_distribution<double> n(0.0, 3.0);
  for (std::uint64_t s = 0; s < 100; ++s) {
    ComplexAccumulator acc(8);
    testing::CVec acc_c;
    for (std::size_t j = 0; j < 8; ++j) {
      acc.re()[j] = n(rng);
      acc.im()[j] = n(rng);
      acc_c.emplace_back(acc.re()[j], acc.im()[j]);
    }
    const auto h = uniform(5000 + s, 8);
    EXPECT_NEAR(raw_dot(acc, h), testing::raw_dot(acc_c, testing::from_phases(to_vec(h.phases()))),
                1e-12);
  }
}

TEST(RawDot, IsLinearInTheAccumulator) {
  const auto a = ComplexAccumulator::FromUnit(uniform(81));
  auto b = ComplexAccumulator::FromUnit(uniform(82));
  b.scale(-2.5);
  const auto h = uniform(83);
  const double alpha = 0.37, beta = -4.2;
  ComplexAccumulator combo(kD);
  combo.add_scaled(a.view(), alpha);
  combo.add_scaled(b.view(), beta);
  EXPECT_NEAR(raw_dot(combo, h), alpha * raw_dot(a, h) + beta * raw_dot(b, h), 1e-9);
}

TEST(Holographic, SingleElementChangeMovesSimilarityAtMostTwoOverD) {
  const auto a = uniform(91), b = uniform(92);
  const double base = similarity(a, b);
  for (std::size_t j : {0ul, 17ul, kD - 1}) {
    std::vector<double> phases = to_vec(a.phases());
    phases[j] += std::numbers::pi;
    EXPECT_LE(std::abs(similarity(UnitHypervector(phases), b) - base), 2.0 / kD + 1e-15);
  }
}

}  // namespace
}  // namespace qhd
