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

#include "diffauction/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diffauction/errors.hpp"
#include "json.hpp"

namespace diffauction {
namespace {

constexpr double kBisectionTol = 1e-12;

std::string fmt(double x) { return nlohmann::json(x).dump(); }

void require_in_support(const ValueDistribution& d, double v) {
  if (!(v >= d.low() && v <= d.high())) {
    throw DomainError("value " + fmt(v) + " outside support [" + fmt(d.low()) + ", " +
                      fmt(d.high()) + "]");
  }
}

}  // namespace

ValueDistribution::ValueDistribution(double low, double high) : low_(low), high_(high) {
  if (!(low < high)) throw PreconditionError("distribution needs low < high");
}

double ValueDistribution::sample(Rng& rng) const {
  const double u = uniform01(rng);
  double lo = low_, hi = high_;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ValueDistribution::virtual_value(double v) const {
  require_in_support(*this, v);
  const double f = pdf(v);
  if (!(f > 0)) throw DomainError("virtual value undefined where pdf is 0 (v = " + fmt(v) + ")");
  return v - (1.0 - cdf(v)) / f;
}

double ValueDistribution::inverse_virtual(double y) const {
  const double ylo = virtual_value(low_);
  const double yhi = virtual_value(high_);
  if (!(y >= ylo && y <= yhi)) {
    throw DomainError("virtual value " + fmt(y) + " outside range [" + fmt(ylo) + ", " +
                      fmt(yhi) + "]");
  }
  double lo = low_, hi = high_;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    (virtual_value(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ValueDistribution::threshold(double y) const {
  if (virtual_value(low_) >= y) return low_;
  return inverse_virtual(y);
}

double ValueDistribution::reserve() const {
  if (virtual_value(high_) < 0) {
    throw DomainError("virtual values are negative on the whole support; no sale possible");
  }
  return threshold(0.0);
}

double ValueDistribution::hazard_rate(double v) const {
  const double tail = 1.0 - cdf(v);
  if (tail <= 0) return std::numeric_limits<double>::infinity();
  return pdf(v) / tail;
}

bool ValueDistribution::check_regularity(std::size_t grid) const {
  if (grid < 2) throw PreconditionError("regularity grid needs at least 2 points");
  double prev = hazard_rate(low_);
  for (std::size_t k = 1; k < grid; ++k) {
    const double v = low_ + (high_ - low_) * static_cast<double>(k) / static_cast<double>(grid - 1);
    const double h = hazard_rate(v);
    if (h < prev - 1e-9 * std::max(1.0, std::abs(prev))) return false;
    prev = h;
  }
  return true;
}

UniformDistribution::UniformDistribution(double low, double high)
    : ValueDistribution(low, high) {}

double UniformDistribution::cdf(double v) const {
  if (v <= low()) return 0.0;
  if (v >= high()) return 1.0;
  return (v - low()) / (high() - low());
}

double UniformDistribution::pdf(double v) const {
  return (v >= low() && v <= high()) ? 1.0 / (high() - low()) : 0.0;
}

double UniformDistribution::sample(Rng& rng) const {
  return low() + (high() - low()) * uniform01(rng);
}

double UniformDistribution::virtual_value(double v) const {
  require_in_support(*this, v);
  return 2.0 * v - high();
}

double UniformDistribution::inverse_virtual(double y) const {
  const double ylo = 2.0 * low() - high();
  if (!(y >= ylo && y <= high())) {
    throw DomainError("virtual value " + fmt(y) + " outside range [" + fmt(ylo) + ", " +
                      fmt(high()) + "]");
  }
  return 0.5 * (y + high());
}

std::string UniformDistribution::to_json() const {
  return R"({"kind":"uniform","low":)" + fmt(low()) + R"(,"high":)" + fmt(high()) + "}";
}

PowerLawDistribution::PowerLawDistribution(double low, double high, double exponent)
    : ValueDistribution(low, high), exponent_(exponent) {
  if (low < 0 || (low == 0 && exponent < 0)) {
    throw PreconditionError("power-law prior needs low > 0 for a negative exponent");
  }
  mass_ = primitive(high) - primitive(low);
}

double PowerLawDistribution::primitive(double v) const {
  if (exponent_ == -1.0) return std::log(v);
  return std::pow(v, exponent_ + 1.0) / (exponent_ + 1.0);
}

double PowerLawDistribution::cdf(double v) const {
  if (v <= low()) return 0.0;
  if (v >= high()) return 1.0;
  return (primitive(v) - primitive(low())) / mass_;
}

double PowerLawDistribution::pdf(double v) const {
  if (v < low() || v > high()) return 0.0;
  return std::pow(v, exponent_) / mass_;
}

double PowerLawDistribution::sample(Rng& rng) const {
  const double target = primitive(low()) + uniform01(rng) * mass_;
  const double v = exponent_ == -1.0 ? std::exp(target)
                                     : std::pow(target * (exponent_ + 1.0), 1.0 / (exponent_ + 1.0));
  return std::clamp(v, low(), high());
}

std::string PowerLawDistribution::to_json() const {
  return R"({"kind":"power","low":)" + fmt(low()) + R"(,"high":)" + fmt(high()) +
         R"(,"exponent":)" + fmt(exponent_) + "}";
}

VirtualBidPrior::VirtualBidPrior()
    : ValueDistribution(-std::numeric_limits<double>::max(), std::numeric_limits<double>::max()) {}

double VirtualBidPrior::cdf(double) const { return 0.5; }
double VirtualBidPrior::pdf(double) const { return 0.0; }

double VirtualBidPrior::sample(Rng&) const {
  throw PreconditionError("virtual bids cannot be sampled; supply them explicitly");
}

double VirtualBidPrior::virtual_value(double v) const {
  if (!std::isfinite(v)) throw DomainError("virtual bid must be finite");
  return v;
}

double VirtualBidPrior::inverse_virtual(double y) const { return virtual_value(y); }

std::string VirtualBidPrior::to_json() const { return R"({"kind":"virtual"})"; }

DistributionPtr parse_distribution(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, "distribution");
  }
  const auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ParseError("expected a number", 0, std::string("distribution.") + key);
    }
    return j[key].get<double>();
  };
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParseError("expected {\"kind\": ...}", 0, "distribution");
  }
  const std::string kind = j["kind"];
  try {
    if (kind == "uniform") {
      return std::make_shared<UniformDistribution>(number("low"), number("high"));
    }
    if (kind == "power") {
      return std::make_shared<PowerLawDistribution>(number("low"), number("high"),
                                                    number("exponent"));
    }
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), 0, "distribution");
  }
  throw ParseError("unknown distribution kind '" + kind + "'", 0, "distribution.kind");
}

Priors Priors::iid(DistributionPtr dist) {
  if (!dist) throw PreconditionError("null distribution");
  Priors p;
  p.dists_.push_back(std::move(dist));
  return p;
}

Priors Priors::per_buyer(std::vector<DistributionPtr> dists) {
  for (const auto& d : dists) {
    if (!d) throw PreconditionError("null distribution");
  }
  Priors p;
  p.dists_ = std::move(dists);
  p.per_buyer_ = true;
  return p;
}

Priors Priors::uniform(double low, double high) {
  return iid(std::make_shared<UniformDistribution>(low, high));
}

const ValueDistribution& Priors::of_index(std::size_t i) const {
  return per_buyer_ ? *dists_.at(i) : *dists_.at(0);
}

const ValueDistribution& Priors::of(BuyerId i) const { return of_index(i.index()); }

const ValueDistribution& Priors::common() const {
  if (!is_iid()) throw PreconditionError("operation requires identically distributed priors");
  return *dists_[0];
}

void Priors::check_covers(std::size_t n) const {
  if (dists_.empty()) throw PreconditionError("no prior given");
  if (per_buyer_ && dists_.size() < n) {
    throw PreconditionError("per-buyer priors cover " + std::to_string(dists_.size()) +
                            " buyers, instance has " + std::to_string(n));
  }
}

void Priors::sample(std::size_t n, Rng& rng, std::vector<double>& out) const {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = of_index(i).sample(rng);
}

}  // namespace diffauction
