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
#include <stdexcept>

#include "diffauction/errors.hpp"
#include "internal.hpp"

namespace diffauction {
namespace detail {
namespace {

constexpr std::size_t kMaxSubsetDegree = 20;

std::vector<std::uint32_t> to_indices(const std::vector<BuyerId>& ids) {
  std::vector<std::uint32_t> out;
  out.reserve(ids.size());
  for (BuyerId b : ids) out.push_back(static_cast<std::uint32_t>(b.index()));
  return out;
}

}  // namespace

PreparedKpwm::PreparedKpwm(const Network& declared, const Priors& priors, std::size_t k)
    : k_(k), rules_(priors, declared.buyer_count()), valid_(to_indices(valid_buyers(declared))) {
  if (k == 0) throw PreconditionError("kpwm needs k >= 1");
  if (valid_.size() <= k) return;
  for (std::uint32_t i : valid_) {
    const BuyerId b = BuyerId::from_index(i);
    const auto declared_set = declared.neighbors(b);
    if (declared_set.size() > kMaxSubsetDegree) {
      throw PreconditionError("kpwm subset enumeration supports at most " +
                              std::to_string(kMaxSubsetDegree) + " declared neighbours (buyer " +
                              std::to_string(b.value) + " has " +
                              std::to_string(declared_set.size()) + ")");
    }
    std::vector<std::vector<std::uint32_t>> found;
    const std::uint32_t subsets = 1u << declared_set.size();
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
      std::vector<BuyerId> kept;
      for (std::size_t t = 0; t < declared_set.size(); ++t) {
        if (mask >> t & 1) kept.push_back(declared_set[t]);
      }
      auto reach = to_indices(valid_buyers(declared.with_neighbors(b, std::move(kept))));
      if (reach.size() != k) continue;
      if (std::find(found.begin(), found.end(), reach) == found.end()) found.push_back(std::move(reach));
    }
    for (auto& set : found) shrinks_.emplace_back(i, std::move(set));
  }
}

std::optional<PartialPotentialWinner> PreparedKpwm::partial_winner(
    std::span<const double> bids) const {
  auto& virt = scratch_doubles(0);
  virt.resize(rules_.size());
  for (std::uint32_t i : valid_) virt[i] = rules_[i].phi(bids[i]);
  std::optional<PartialPotentialWinner> result;
  for (const auto& [i, members] : shrinks_) {
    const Outcome o = myerson_indices(members, virt, rules_);
    if (o.winner != BuyerId::from_index(i)) continue;
    if (result && result->buyer != *o.winner) {
      throw std::logic_error("two k-partial potential winners: " +
                             std::to_string(result->buyer.value) + " and " +
                             std::to_string(o.winner->value));
    }
    if (!result || o.price < result->payment) result = PartialPotentialWinner{*o.winner, o.price};
  }
  return result;
}

Outcome PreparedKpwm::allocate(std::span<const double> bids) const {
  if (valid_.size() < k_) return {};
  if (valid_.size() == k_) {
    auto& virt = scratch_doubles(0);
    virt.resize(rules_.size());
    for (std::uint32_t i : valid_) virt[i] = rules_[i].phi(bids[i]);
    return myerson_indices(valid_, virt, rules_);
  }
  if (auto w = partial_winner(bids)) return {w->buyer, w->payment};
  return {};
}

std::unique_ptr<PreparedAuction> prepare_kpwm(const Network& declared, const Priors& priors,
                                              std::size_t k) {
  return std::make_unique<PreparedKpwm>(declared, priors, k);
}

}  // namespace detail

std::optional<PartialPotentialWinner> k_partial_potential_winner(const ReportProfile& report,
                                                                 const Priors& priors,
                                                                 std::size_t k) {
  const detail::PreparedKpwm prepared(report.declared, priors, k);
  if (prepared.valid_count() <= k) {
    throw PreconditionError("k-partial potential winner needs more than k = " +
                            std::to_string(k) + " valid buyers");
  }
  return prepared.partial_winner(report.bids);
}

Outcome k_pwm(const ReportProfile& report, const Priors& priors, std::size_t k) {
  return detail::PreparedKpwm(report.declared, priors, k).allocate(report.bids);
}

}  // namespace diffauction
