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
#include <span>
#include <vector>

#include "diffauction/mechanisms.hpp"

namespace diffauction::detail {

// phi and its threshold for one buyer, with an inline path for affine
// virtual values (uniform priors, raw virtual bids).
class PriceRule {
 public:
  explicit PriceRule(const ValueDistribution& dist);

  double phi(double bid) const {
    if (affine_) {
      if (!(bid >= low_ && bid <= high_)) out_of_support(bid);
      return slope_ * bid + intercept_;
    }
    return dist_->virtual_value(bid);
  }

  // Price a winner pays against virtual competition `level`.
  double price(double level) const {
    if (affine_) return std::max(low_, (level - intercept_) / slope_);
    return dist_->threshold(level);
  }

  // tau, or +inf when the prior can never sell.
  double reserve() const { return reserve_; }
  double width() const { return high_ - low_; }

 private:
  [[noreturn]] void out_of_support(double bid) const;

  const ValueDistribution* dist_;
  bool affine_ = false;
  double slope_ = 1.0;
  double intercept_ = 0.0;
  double low_;
  double high_;
  double reserve_;
};

// One rule per buyer. Keeps a handle on the priors so rules stay valid.
class PriceTable {
 public:
  PriceTable(const Priors& priors, std::size_t n);
  const PriceRule& operator[](std::size_t i) const { return rules_[i]; }
  std::size_t size() const { return rules_.size(); }

 private:
  Priors priors_;
  std::vector<PriceRule> rules_;
};

// Ordering key for argmax: higher virtual bid first, then smaller id.
inline bool beats(double va, std::uint32_t a, double vb, std::uint32_t b) {
  return va > vb || (va == vb && a < b);
}

// Myerson over buyer indices `members` with precomputed virtual values
// (indexed by buyer index).
Outcome myerson_indices(std::span<const std::uint32_t> members, std::span<const double> virt,
                        const PriceTable& rules);

// Reusable per-thread buffer.
std::vector<double>& scratch_doubles(int slot);
std::vector<std::uint32_t>& scratch_indices(int slot);

struct ChainContext {
  const DiffusionAnalysis* analysis;
  const PriceTable* rules;
};

// Potential-winner chain for the given bids, ordered by depth. Reads only the
// bids of valid buyers.
void compute_chain(const ChainContext& ctx, std::span<const double> bids,
                   PotentialWinnerChain& out);

class PreparedCwmFast final : public PreparedAuction {
 public:
  PreparedCwmFast(const Network& declared, const Priors& priors);
  Outcome allocate(std::span<const double> bids) const override { return run(bids, nullptr); }
  Outcome run(std::span<const double> bids, std::vector<FrontierStep>* trace) const;

 private:
  Network declared_;
  PriceTable rules_;
};

std::unique_ptr<PreparedAuction> prepare_myerson_seller(const Network& declared,
                                                        const Priors& priors);
std::unique_ptr<PreparedAuction> prepare_myerson_valid(const Network& declared,
                                                       const Priors& priors);
std::unique_ptr<PreparedAuction> prepare_cwm(const Network& declared, const Priors& priors);
std::unique_ptr<PreparedAuction> prepare_cwm_srp(const Network& declared, const Priors& priors,
                                                 const ShiftingFunction& sigma);
std::unique_ptr<PreparedAuction> prepare_kpwm(const Network& declared, const Priors& priors,
                                              std::size_t k);

// k-partial potential winner for prepared structural data.
class PreparedKpwm final : public PreparedAuction {
 public:
  PreparedKpwm(const Network& declared, const Priors& priors, std::size_t k);
  Outcome allocate(std::span<const double> bids) const override;
  std::optional<PartialPotentialWinner> partial_winner(std::span<const double> bids) const;
  std::size_t valid_count() const { return valid_.size(); }

 private:
  std::size_t k_;
  PriceTable rules_;
  std::vector<std::uint32_t> valid_;
  // (buyer index, valid set of size k reachable when she withholds some
  // invitations), deduplicated per buyer.
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> shrinks_;
};

}  // namespace diffauction::detail
