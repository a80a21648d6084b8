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

#include <cmath>
#include <limits>

#include "diffauction/errors.hpp"
#include "internal.hpp"
#include "json.hpp"

namespace diffauction {
namespace detail {

PriceRule::PriceRule(const ValueDistribution& dist)
    : dist_(&dist), low_(dist.low()), high_(dist.high()) {
  if (auto a = dist.affine_virtual()) {
    affine_ = true;
    slope_ = a->first;
    intercept_ = a->second;
  }
  try {
    reserve_ = dist.reserve();
  } catch (const DomainError&) {
    reserve_ = std::numeric_limits<double>::infinity();
  }
}

void PriceRule::out_of_support(double bid) const {
  throw DomainError("bid " + nlohmann::json(bid).dump() + " outside support [" +
                    nlohmann::json(low_).dump() + ", " + nlohmann::json(high_).dump() + "]");
}

PriceTable::PriceTable(const Priors& priors, std::size_t n) : priors_(priors) {
  priors_.check_covers(n);
  rules_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rules_.emplace_back(priors_.of_index(i));
}

Outcome myerson_indices(std::span<const std::uint32_t> members, std::span<const double> virt,
                        const PriceTable& rules) {
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t best = kNone, second = kNone;
  for (std::uint32_t i : members) {
    if (best == kNone || beats(virt[i], i, virt[best], best)) {
      second = best;
      best = i;
    } else if (second == kNone || beats(virt[i], i, virt[second], second)) {
      second = i;
    }
  }
  if (best == kNone || virt[best] < 0) return {};
  const double level = second == kNone ? 0.0 : std::max(0.0, virt[second]);
  return {BuyerId::from_index(best), rules[best].price(level)};
}

std::vector<double>& scratch_doubles(int slot) {
  thread_local std::vector<double> buffers[4];
  return buffers[slot];
}

std::vector<std::uint32_t>& scratch_indices(int slot) {
  thread_local std::vector<std::uint32_t> buffers[4];
  return buffers[slot];
}

namespace {

class PreparedMyerson final : public PreparedAuction {
 public:
  PreparedMyerson(std::vector<std::uint32_t> members, const Priors& priors, std::size_t n)
      : members_(std::move(members)), rules_(priors, n) {}

  Outcome allocate(std::span<const double> bids) const override {
    auto& virt = scratch_doubles(0);
    virt.resize(rules_.size());
    for (std::uint32_t i : members_) virt[i] = rules_[i].phi(bids[i]);
    return myerson_indices(members_, virt, rules_);
  }

 private:
  std::vector<std::uint32_t> members_;
  PriceTable rules_;
};

std::vector<std::uint32_t> indices(std::span<const BuyerId> ids) {
  std::vector<std::uint32_t> out;
  for (BuyerId b : ids) out.push_back(static_cast<std::uint32_t>(b.index()));
  return out;
}

}  // namespace

std::unique_ptr<PreparedAuction> prepare_myerson_seller(const Network& declared,
                                                        const Priors& priors) {
  return std::make_unique<PreparedMyerson>(indices(declared.seller_neighbors()), priors,
                                           declared.buyer_count());
}

std::unique_ptr<PreparedAuction> prepare_myerson_valid(const Network& declared,
                                                       const Priors& priors) {
  return std::make_unique<PreparedMyerson>(indices(valid_buyers(declared)), priors,
                                           declared.buyer_count());
}

}  // namespace detail

Outcome myerson(std::span<const BuyerId> participants, std::span<const double> bids,
                const Priors& priors) {
  std::size_t n = bids.size();
  for (BuyerId b : participants) {
    if (b.value == 0 || b.index() >= n) throw PreconditionError("participant without a bid");
  }
  const detail::PriceTable rules(priors, n);
  std::vector<double> virt(n, 0.0);
  std::vector<std::uint32_t> members;
  for (BuyerId b : participants) {
    members.push_back(static_cast<std::uint32_t>(b.index()));
    virt[b.index()] = rules[b.index()].phi(bids[b.index()]);
  }
  return detail::myerson_indices(members, virt, rules);
}

}  // namespace diffauction
