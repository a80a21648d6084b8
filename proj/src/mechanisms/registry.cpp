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

#include <algorithm>
#include <charconv>

#include "diffauction/errors.hpp"
#include "internal.hpp"

namespace diffauction {
namespace {

class SimpleMechanism final : public Mechanism {
 public:
  using Factory = std::unique_ptr<PreparedAuction> (*)(const Network&, const Priors&);
  SimpleMechanism(std::string id, Factory factory) : id_(std::move(id)), factory_(factory) {}

  std::string id() const override { return id_; }
  std::unique_ptr<PreparedAuction> prepare(const Network& declared,
                                           const Priors& priors) const override {
    return factory_(declared, priors);
  }

 private:
  std::string id_;
  Factory factory_;
};

class KpwmMechanism final : public Mechanism {
 public:
  explicit KpwmMechanism(std::size_t k) : k_(k) {}
  std::string id() const override { return "kpwm:" + std::to_string(k_); }
  std::unique_ptr<PreparedAuction> prepare(const Network& declared,
                                           const Priors& priors) const override {
    return detail::prepare_kpwm(declared, priors, k_);
  }

 private:
  std::size_t k_;
};

class CwmFastMechanism final : public Mechanism {
 public:
  std::string id() const override { return "cwm-fast"; }
  std::unique_ptr<PreparedAuction> prepare(const Network& declared,
                                           const Priors& priors) const override {
    return std::make_unique<detail::PreparedCwmFast>(declared, priors);
  }
};

class CwmSrpMechanism final : public Mechanism {
 public:
  CwmSrpMechanism(std::string spec, ShiftingFunction sigma)
      : spec_(std::move(spec)), sigma_(std::move(sigma)) {}

  std::string id() const override { return "cwm-srp:" + spec_; }
  std::unique_ptr<PreparedAuction> prepare(const Network& declared,
                                           const Priors& priors) const override {
    return detail::prepare_cwm_srp(declared, priors, sigma_);
  }
  std::vector<double> breakpoints(const Priors& priors, std::size_t n) const override {
    auto out = Mechanism::breakpoints(priors, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& dist = priors.of_index(i);
      const double tau = detail::PriceRule(dist).reserve();
      for (double s : sigma_.values()) {
        if (tau + s > dist.low() && tau + s < dist.high()) out.push_back(tau + s);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::string spec_;
  ShiftingFunction sigma_;
};

}  // namespace

std::vector<double> Mechanism::breakpoints(const Priors& priors, std::size_t n) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& dist = priors.of_index(i);
    out.push_back(dist.low());
    out.push_back(dist.high());
    const double tau = detail::PriceRule(dist).reserve();
    if (tau > dist.low() && tau < dist.high()) out.push_back(tau);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Outcome Mechanism::run(const ReportProfile& report, const Priors& priors) const {
  if (report.bids.size() != report.buyer_count()) {
    throw PreconditionError("report has " + std::to_string(report.bids.size()) + " bids for " +
                            std::to_string(report.buyer_count()) + " buyers");
  }
  return prepare(report.declared, priors)->allocate(report.bids);
}

MechanismPtr make_mechanism(std::string_view id) {
  if (id == "myerson-rs") {
    return std::make_shared<SimpleMechanism>("myerson-rs", &detail::prepare_myerson_seller);
  }
  if (id == "myerson-all") {
    return std::make_shared<SimpleMechanism>("myerson-all", &detail::prepare_myerson_valid);
  }
  if (id == "cwm") return std::make_shared<SimpleMechanism>("cwm", &detail::prepare_cwm);
  if (id == "cwm-fast") return std::make_shared<CwmFastMechanism>();
  if (id.starts_with("kpwm:")) {
    const std::string_view digits = id.substr(5);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || k == 0) {
      throw ParseError("kpwm needs a positive integer k, got '" + std::string(digits) + "'", 0,
                       "mechanism");
    }
    return std::make_shared<KpwmMechanism>(k);
  }
  if (id.starts_with("cwm-srp:")) {
    const std::string spec(id.substr(8));
    return std::make_shared<CwmSrpMechanism>(spec, ShiftingFunction::parse(spec));
  }
  throw ParseError("unknown mechanism '" + std::string(id) + "'", 0, "mechanism");
}

}  // namespace diffauction
