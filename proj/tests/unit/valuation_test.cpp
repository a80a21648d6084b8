// Copyright 2026 The diffauction Authors
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

#include <algorithm>
#include <cmath>

#include "diffauction/errors.hpp"
#include "diffauction/valuation.hpp"

namespace diffauction {
namespace {

// The textbook formula, evaluated from cdf and pdf only.
double generic_phi(const ValueDistribution& d, double v) {
  return v - (1.0 - d.cdf(v)) / d.pdf(v);
}

// Root of phi by plain bisection on the generic formula.
double bisect_reserve(const ValueDistribution& d) {
  double lo = d.low(), hi = d.high();
  if (generic_phi(d, lo) >= 0) return lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (generic_phi(d, mid) < 0 ? lo : hi) = mid;
  }
  return lo;
}

TEST(Uniform, VirtualValue) {
  const UniformDistribution u(0, 1);
  EXPECT_DOUBLE_EQ(u.virtual_value(0.75), 0.5);
  EXPECT_DOUBLE_EQ(u.virtual_value(0.5), 0.0);
  EXPECT_DOUBLE_EQ(u.virtual_value(1.0), 1.0);
  EXPECT_THROW(u.virtual_value(1.5), DomainError);
  EXPECT_THROW(u.virtual_value(-0.1), DomainError);
}

TEST(Uniform, AffineFormMatchesGenericFormula) {
  for (auto [lo, hi] : {std::pair{0.0, 1.0}, {0.0, 2.0}, {1.0, 2.0}, {-3.0, 5.0}}) {
    const UniformDistribution u(lo, hi);
    const auto [slope, intercept] = *u.affine_virtual();
    for (int k = 0; k <= 20; ++k) {
      const double v = lo + (hi - lo) * k / 20.0;
      EXPECT_NEAR(slope * v + intercept, generic_phi(u, v), 1e-12);
      EXPECT_NEAR(u.virtual_value(v), generic_phi(u, v), 1e-12);
    }
  }
}

TEST(Uniform, InverseAndReserve) {
  const UniformDistribution u(0, 1);
  EXPECT_DOUBLE_EQ(u.inverse_virtual(0.0), 0.5);
  EXPECT_THROW(u.inverse_virtual(6.0), DomainError);
  EXPECT_DOUBLE_EQ(u.reserve(), 0.5);
  EXPECT_DOUBLE_EQ(UniformDistribution(0, 2).reserve(), 1.0);
  const UniformDistribution u12(1, 2);
  EXPECT_DOUBLE_EQ(u12.reserve(), 1.0);
  EXPECT_NEAR(u12.reserve(), bisect_reserve(u12), 1e-12);
  // Whole support has positive virtual value: everyone clears the reserve.
  EXPECT_DOUBLE_EQ(UniformDistribution(2, 3).reserve(), 2.0);
}

TEST(Uniform, NoSale) {
  // phi(high) = high, so only a support below zero never sells.
  EXPECT_THROW(UniformDistribution(-2, -1).reserve(), DomainError);
}

TEST(PowerLaw, RoundTripAndReserve) {
  const PowerLawDistribution p(0.5, 2.0, 1.0);
  EXPECT_TRUE(p.check_regularity(500));
  Rng rng = make_stream(1, 0);
  for (int t = 0; t < 1000; ++t) {
    const double v = p.low() + (p.high() - p.low()) * uniform01(rng);
    EXPECT_NEAR(p.inverse_virtual(p.virtual_value(v)), v, 1e-10);
    EXPECT_LE(p.virtual_value(v), v);
  }
  EXPECT_NEAR(p.reserve(), bisect_reserve(p), 1e-10);
}

TEST(Uniform, RoundTrip) {
  const UniformDistribution u(0, 1);
  Rng rng = make_stream(2, 0);
  for (int t = 0; t < 1000; ++t) {
    const double v = uniform01(rng);
    EXPECT_NEAR(u.inverse_virtual(u.virtual_value(v)), v, 1e-10);
  }
}

TEST(Regularity, Examples) {
  EXPECT_TRUE(UniformDistribution(0, 1).check_regularity(1000));
  EXPECT_TRUE(UniformDistribution(0, 1).check_regularity(2));
  EXPECT_THROW(UniformDistribution(0, 1).check_regularity(1), PreconditionError);
  // pdf proportional to 1/v^2 on [1, 10]: hazard 1/(v - v^2/10) falls on
  // [1, 5], so the prior is not regular.
  const PowerLawDistribution inverse_square(1, 10, -2);
  EXPECT_FALSE(inverse_square.check_regularity(100));
  EXPECT_NEAR(inverse_square.hazard_rate(2.0), 1.0 / (2.0 - 0.4), 1e-12);
}

TEST(Regularity, PhiIncreasingOnGrid) {
  for (const ValueDistribution* d :
       {static_cast<const ValueDistribution*>(new UniformDistribution(0, 1)),
        static_cast<const ValueDistribution*>(new PowerLawDistribution(0.5, 2, 1))}) {
    double prev = d->virtual_value(d->low());
    for (int k = 1; k <= 1000; ++k) {
      const double v = d->low() + (d->high() - d->low()) * k / 1000.0;
      const double now = d->virtual_value(v);
      EXPECT_GT(now, prev);
      prev = now;
    }
    delete d;
  }
}

double ks_distance(const ValueDistribution& d, std::size_t draws, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  std::vector<double> xs(draws);
  for (auto& x : xs) x = d.sample(rng);
  std::sort(xs.begin(), xs.end());
  double worst = 0;
  for (std::size_t k = 0; k < draws; ++k) {
    const double f = d.cdf(xs[k]);
    worst = std::max({worst, std::abs(f - static_cast<double>(k) / draws),
                      std::abs(f - static_cast<double>(k + 1) / draws)});
  }
  return worst;
}

TEST(Sampling, KolmogorovSmirnov) {
  EXPECT_LT(ks_distance(UniformDistribution(0, 1), 1000000, 3), 0.002);
  EXPECT_LT(ks_distance(PowerLawDistribution(0.5, 2, 1), 1000000, 4), 0.002);
  EXPECT_LT(ks_distance(PowerLawDistribution(1, 10, -1), 200000, 5), 0.004);
}

TEST(Sampling, DeterministicPerStream) {
  const UniformDistribution u(0, 1);
  Rng a = make_stream(9, 3), b = make_stream(9, 3), c = make_stream(9, 4);
  const double x = u.sample(a);
  EXPECT_EQ(x, u.sample(b));
  EXPECT_NE(x, u.sample(c));
}

TEST(Parse, Distribution) {
  const auto d = parse_distribution(R"({"kind":"uniform","low":0.0,"high":1.0})");
  EXPECT_DOUBLE_EQ(d->reserve(), 0.5);
  EXPECT_EQ(parse_distribution(d->to_json())->to_json(), d->to_json());
  const auto p = parse_distribution(R"({"kind":"power","low":1,"high":10,"exponent":-2})");
  EXPECT_DOUBLE_EQ(p->high(), 10.0);
  EXPECT_THROW(parse_distribution(R"({"kind":"uniform","low":1})"), ParseError);
  EXPECT_THROW(parse_distribution(R"({"kind":"cauchy"})"), ParseError);
  EXPECT_THROW(parse_distribution(R"({"kind":"uniform","low":1,"high":0})"), ParseError);
}

TEST(Priors, PerBuyer) {
  auto a = std::make_shared<UniformDistribution>(0, 1);
  auto b = std::make_shared<UniformDistribution>(0, 2);
  const Priors p = Priors::per_buyer({a, b});
  EXPECT_FALSE(p.is_iid());
  EXPECT_DOUBLE_EQ(p.of(BuyerId{2}).reserve(), 1.0);
  EXPECT_THROW(p.common(), PreconditionError);
  EXPECT_THROW(p.check_covers(3), PreconditionError);
  EXPECT_TRUE(Priors::uniform().is_iid());
}

TEST(VirtualBids, Identity) {
  const VirtualBidPrior v;
  EXPECT_EQ(v.virtual_value(7.0), 7.0);
  EXPECT_EQ(v.threshold(6.0), 6.0);
  EXPECT_EQ(v.reserve(), 0.0);
  Rng rng(1);
  EXPECT_THROW(v.sample(rng), PreconditionError);
}

}  // namespace
}  // namespace diffauction
