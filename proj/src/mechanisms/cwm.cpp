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
#include <limits>
#include <stdexcept>

#include "diffauction/errors.hpp"
#include "internal.hpp"

namespace diffauction {
namespace detail {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

}  // namespace

// Buyer i wins Myerson among V_{-r_i'} iff her key beats every valid buyer
// outside her subtree. With valid buyers in preorder, that is a prefix and a
// suffix of the order, so prefix/suffix argmax arrays answer it in O(1).
void compute_chain(const ChainContext& ctx, std::span<const double> bids,
                   PotentialWinnerChain& out) {
  out.clear();
  const DiffusionAnalysis& a = *ctx.analysis;
  const auto order = a.preorder();
  const std::size_t m = order.size();

  auto& virt = scratch_doubles(1);
  auto& prefix = scratch_indices(1);  // argmax over positions [0, p)
  auto& suffix = scratch_indices(2);  // argmax over positions [p, m)
  virt.resize(m);
  prefix.resize(m + 1);
  suffix.resize(m + 1);
  for (std::size_t p = 0; p < m; ++p) virt[p] = (*ctx.rules)[order[p]].phi(bids[order[p]]);

  const auto better = [&](std::uint32_t p, std::uint32_t q) {
    if (p == kNone) return q;
    if (q == kNone) return p;
    return beats(virt[p], order[p], virt[q], order[q]) ? p : q;
  };
  prefix[0] = kNone;
  for (std::size_t p = 0; p < m; ++p) prefix[p + 1] = better(prefix[p], static_cast<std::uint32_t>(p));
  suffix[m] = kNone;
  for (std::size_t p = m; p-- > 0;) suffix[p] = better(suffix[p + 1], static_cast<std::uint32_t>(p));

  for (std::size_t p = 0; p < m; ++p) {
    if (virt[p] < 0) continue;
    const std::uint32_t i = order[p];
    const std::uint32_t rival = better(prefix[p], suffix[a.subtree_end(i)]);
    if (rival != kNone && better(rival, static_cast<std::uint32_t>(p)) != p) continue;
    const double level = rival == kNone ? 0.0 : std::max(0.0, virt[rival]);
    out.push_back({BuyerId::from_index(i), (*ctx.rules)[i].price(level), level});
  }
  std::sort(out.begin(), out.end(), [&](const PotentialWinner& x, const PotentialWinner& y) {
    return a.depth(x.buyer) < a.depth(y.buyer);
  });
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!a.is_critical_for(out[k - 1].buyer, out[k].buyer)) {
      throw std::logic_error("potential winners " + std::to_string(out[k - 1].buyer.value) +
                             " and " + std::to_string(out[k].buyer.value) +
                             " are not on one critical chain");
    }
  }
}

namespace {

class PreparedCwm final : public PreparedAuction {
 public:
  PreparedCwm(const Network& declared, const Priors& priors)
      : analysis_(declared), rules_(priors, declared.buyer_count()) {}

  Outcome allocate(std::span<const double> bids) const override {
    thread_local PotentialWinnerChain chain;
    compute_chain({&analysis_, &rules_}, bids, chain);
    if (chain.empty()) return {};
    return {chain.front().buyer, chain.front().potential_payment};
  }

 private:
  DiffusionAnalysis analysis_;
  PriceTable rules_;
};

class PreparedCwmSrp final : public PreparedAuction {
 public:
  PreparedCwmSrp(const Network& declared, const Priors& priors, const ShiftingFunction& sigma)
      : analysis_(declared), rules_(priors, declared.buyer_count()), shifted_(declared.buyer_count()) {
    for (std::size_t i = 0; i < declared.buyer_count(); ++i) {
      sigma.check_range(rules_[i].width());
      const BuyerId b = BuyerId::from_index(i);
      if (analysis_.is_valid(b)) shifted_[i] = rules_[i].reserve() + sigma(analysis_.distance(b));
    }
  }

  Outcome allocate(std::span<const double> bids) const override {
    thread_local PotentialWinnerChain chain;
    compute_chain({&analysis_, &rules_}, bids, chain);
    for (const auto& w : chain) {
      const double reserve = shifted_[w.buyer.index()];
      if (bids[w.buyer.index()] >= reserve) {
        return {w.buyer, std::max(w.potential_payment, reserve)};
      }
    }
    return {};
  }

 private:
  DiffusionAnalysis analysis_;
  PriceTable rules_;
  std::vector<double> shifted_;  // tau_i + sigma(d_i)
};

}  // namespace

PreparedCwmFast::PreparedCwmFast(const Network& declared, const Priors& priors)
    : declared_(declared), rules_(priors, declared.buyer_count()) {}

// B grows monotonically, so the best and second-best keys in B are kept
// incrementally. Every member of B except the current winner is expanded
// exactly once.
Outcome PreparedCwmFast::run(std::span<const double> bids,
                             std::vector<FrontierStep>* trace) const {
  const std::size_t n = declared_.buyer_count();
  auto& virt = scratch_doubles(2);
  auto& best_price = scratch_doubles(3);
  auto& in_b = scratch_indices(0);
  auto& pending = scratch_indices(3);
  virt.assign(n, 0.0);
  best_price.assign(n, 0.0);
  in_b.assign(n, 0);
  pending.clear();
  std::vector<std::uint32_t> next;
  std::vector<std::uint32_t> members;  // only filled for tracing

  std::uint32_t best = kNone, second = kNone;
  const auto add = [&](BuyerId b) {
    const std::uint32_t i = static_cast<std::uint32_t>(b.index());
    if (in_b[i]) return false;
    in_b[i] = 1;
    virt[i] = rules_[i].phi(bids[i]);
    if (best == kNone || beats(virt[i], i, virt[best], best)) {
      second = best;
      best = i;
    } else if (second == kNone || beats(virt[i], i, virt[second], second)) {
      second = i;
    }
    next.push_back(i);
    if (trace) members.push_back(i);
    return true;
  };

  for (BuyerId b : declared_.seller_neighbors()) add(b);
  std::uint32_t winner = kNone;
  for (;;) {
    pending.insert(pending.end(), next.begin(), next.end());
    next.clear();
    winner = (best != kNone && virt[best] >= 0) ? best : kNone;
    double level = 0.0, price = 0.0;
    if (winner != kNone) {
      level = second == kNone ? 0.0 : std::max(0.0, virt[second]);
      price = rules_[winner].price(level);
      best_price[winner] = std::max(best_price[winner], price);
    }
    if (trace) {
      FrontierStep step;
      for (std::uint32_t i : members) step.frontier.push_back(BuyerId::from_index(i));
      std::sort(step.frontier.begin(), step.frontier.end());
      if (winner != kNone) step.winner = BuyerId::from_index(winner);
      step.payment = price;
      step.virtual_level = level;
      trace->push_back(std::move(step));
    }
    bool changed = false;
    std::size_t keep = 0;
    for (std::uint32_t j : pending) {
      if (j == winner) {
        pending[keep++] = j;
        continue;
      }
      for (BuyerId nb : declared_.neighbors(BuyerId::from_index(j))) changed |= add(nb);
    }
    pending.resize(keep);
    if (!changed) break;
  }
  if (winner == kNone) return {};
  return {BuyerId::from_index(winner), best_price[winner]};
}

std::unique_ptr<PreparedAuction> prepare_cwm(const Network& declared, const Priors& priors) {
  return std::make_unique<PreparedCwm>(declared, priors);
}

std::unique_ptr<PreparedAuction> prepare_cwm_srp(const Network& declared, const Priors& priors,
                                                 const ShiftingFunction& sigma) {
  return std::make_unique<PreparedCwmSrp>(declared, priors, sigma);
}

}  // namespace detail

PotentialWinnerChain potential_winners(const ReportProfile& report, const Priors& priors) {
  const DiffusionAnalysis analysis(report.declared);
  const detail::PriceTable rules(priors, report.buyer_count());
  PotentialWinnerChain chain;
  detail::compute_chain({&analysis, &rules}, report.bids, chain);
  return chain;
}

Outcome cwm(const ReportProfile& report, const Priors& priors) {
  return detail::prepare_cwm(report.declared, priors)->allocate(report.bids);
}

Outcome cwm_fast(const ReportProfile& report, const Priors& priors,
                 std::vector<FrontierStep>* trace) {
  return detail::PreparedCwmFast(report.declared, priors).run(report.bids, trace);
}

Outcome cwm_srp(const ReportProfile& report, const Priors& priors, const ShiftingFunction& sigma) {
  return detail::prepare_cwm_srp(report.declared, priors, sigma)->allocate(report.bids);
}

}  // namespace diffauction
