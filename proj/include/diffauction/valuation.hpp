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

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diffauction/network.hpp"
#include "diffauction/random.hpp"

namespace diffauction {

/// Prior over one buyer's valuation on [low, high]. Implementations are
/// immutable; sampling draws from a caller-owned stream.
///
/// The virtual value is phi(v) = v - (1 - F(v)) / f(v). Distributions are
/// assumed regular, which makes phi strictly increasing, so the inverse and
/// the threshold below are well defined.
class ValueDistribution {
 public:
  ValueDistribution(double low, double high);
  virtual ~ValueDistribution() = default;

  double low() const { return low_; }
  double high() const { return high_; }

  virtual double cdf(double v) const = 0;
  virtual double pdf(double v) const = 0;
  /// Inverse-CDF draw. The default bisects cdf().
  virtual double sample(Rng& rng) const;

  /// Throws DomainError outside the support or where pdf(v) == 0.
  virtual double virtual_value(double v) const;
  /// phi^{-1}(y). Throws DomainError when y lies outside
  /// [phi(low), phi(high)]. Bisection to 1e-12 unless overridden.
  virtual double inverse_virtual(double y) const;
  /// When phi is affine, (slope, intercept). Mechanisms use this to skip
  /// virtual dispatch.
  virtual std::optional<std::pair<double, double>> affine_virtual() const {
    return std::nullopt;
  }

  /// Smallest v in the support with phi(v) >= y: low when phi(low) >= y,
  /// otherwise phi^{-1}(y). This is the price a Myerson winner pays against
  /// virtual competition y.
  double threshold(double y) const;

  /// tau = phi^{-1}(0), clipped to low when phi(low) > 0. Throws DomainError
  /// when phi(high) < 0, i.e. the item can never sell.
  double reserve() const;

  double hazard_rate(double v) const;
  /// True when the hazard rate is non-decreasing (tolerance 1e-9) over
  /// `grid` evenly spaced points spanning the support. grid >= 2.
  bool check_regularity(std::size_t grid) const;

  /// JSON form accepted by parse_distribution.
  virtual std::string to_json() const = 0;

 private:
  double low_;
  double high_;
};

/// U[low, high]: phi(v) = 2v - high, exact affine inverse.
class UniformDistribution final : public ValueDistribution {
 public:
  UniformDistribution(double low, double high);

  double cdf(double v) const override;
  double pdf(double v) const override;
  double sample(Rng& rng) const override;
  double virtual_value(double v) const override;
  double inverse_virtual(double y) const override;
  std::optional<std::pair<double, double>> affine_virtual() const override {
    return std::pair{2.0, -high()};
  }
  std::string to_json() const override;
};

/// Density proportional to v^exponent on [low, high], low > 0 unless
/// exponent >= 0. Not regular for every exponent; use check_regularity.
class PowerLawDistribution final : public ValueDistribution {
 public:
  PowerLawDistribution(double low, double high, double exponent);

  double exponent() const { return exponent_; }
  double cdf(double v) const override;
  double pdf(double v) const override;
  double sample(Rng& rng) const override;
  std::string to_json() const override;

 private:
  double primitive(double v) const;  // antiderivative of v^exponent
  double exponent_;
  double mass_;
};

/// Bids that already are virtual bids: phi is the identity on the whole real
/// line, so payments come out in virtual units. Cannot be sampled.
class VirtualBidPrior final : public ValueDistribution {
 public:
  VirtualBidPrior();

  double cdf(double v) const override;
  double pdf(double v) const override;
  double sample(Rng& rng) const override;
  double virtual_value(double v) const override;
  double inverse_virtual(double y) const override;
  std::optional<std::pair<double, double>> affine_virtual() const override {
    return std::pair{1.0, 0.0};
  }
  std::string to_json() const override;
};

using DistributionPtr = std::shared_ptr<const ValueDistribution>;

/// {"kind":"uniform","low":0,"high":1} or
/// {"kind":"power","low":1,"high":10,"exponent":-2}. Throws ParseError.
DistributionPtr parse_distribution(std::string_view json_text);

/// One prior per buyer, or one shared prior for every buyer.
class Priors {
 public:
  Priors() = default;
  static Priors iid(DistributionPtr dist);
  static Priors per_buyer(std::vector<DistributionPtr> dists);
  static Priors uniform(double low = 0.0, double high = 1.0);

  const ValueDistribution& of(BuyerId i) const;
  const ValueDistribution& of_index(std::size_t i) const;
  bool is_iid() const { return dists_.size() == 1 && !per_buyer_; }
  /// Throws PreconditionError for heterogeneous priors.
  const ValueDistribution& common() const;
  /// Per-buyer priors must cover every buyer of an n-buyer instance.
  void check_covers(std::size_t n) const;

  /// Draws one valuation per buyer, in id order.
  void sample(std::size_t n, Rng& rng, std::vector<double>& out) const;

 private:
  std::vector<DistributionPtr> dists_;
  bool per_buyer_ = false;
};

}  // namespace diffauction
