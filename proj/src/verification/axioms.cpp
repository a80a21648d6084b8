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

#include <bit>
#include <algorithm>
#include <functional>

#include "diffauction/verification.hpp"

namespace diffauction {
namespace {

bool same_outcome(const Outcome& a, const Outcome& b) {
  return a.winner == b.winner &&
         std::bit_cast<std::uint64_t>(a.price) == std::bit_cast<std::uint64_t>(b.price);
}

std::string describe(const Outcome& o) {
  return o.winner ? "winner " + std::to_string(o.winner->value) + " price " +
                        std::to_string(o.price)
                  : "no winner";
}

std::vector<BuyerId> random_subset(std::span<const BuyerId> of, Rng& rng) {
  std::vector<BuyerId> out;
  for (BuyerId b : of) {
    if (rng() & 1) out.push_back(b);
  }
  return out;
}

// Re-draws every invalid buyer's report a few times and compares outcomes.
void probe(const Mechanism& mechanism, const ReportProfile& report, const Priors& priors,
           const std::function<std::vector<BuyerId>(BuyerId, Rng&)>& redraw_neighbors, Rng& rng,
           std::size_t trial, AxiomReport& out) {
  constexpr int kRedraws = 3;
  const auto valid = valid_buyers(report.declared);
  const std::size_t n = report.buyer_count();
  ++out.trials;
  if (valid.size() == n) return;
  ++out.trials_with_invalid;

  const Outcome base = mechanism.run(report, priors);
  if (base.winner && !std::binary_search(valid.begin(), valid.end(), *base.winner)) {
    out.passed = false;
    out.failures.push_back("trial " + std::to_string(trial) + ": invalid buyer " +
                           std::to_string(base.winner->value) + " wins");
    return;
  }
  for (int r = 0; r < kRedraws; ++r) {
    ReportProfile changed = report;
    for (std::size_t i = 0; i < n; ++i) {
      const BuyerId b = BuyerId::from_index(i);
      if (std::binary_search(valid.begin(), valid.end(), b)) continue;
      changed.bids[i] = priors.of_index(i).sample(rng);
      changed.declared = changed.declared.with_neighbors(b, redraw_neighbors(b, rng));
    }
    const Outcome again = mechanism.run(changed, priors);
    if (!same_outcome(base, again)) {
      out.passed = false;
      out.failures.push_back("trial " + std::to_string(trial) +
                             ": outcome depends on invalid buyers (" + describe(base) + " vs " +
                             describe(again) + ")");
      return;
    }
  }
}

}  // namespace

AxiomReport check_axioms(const Mechanism& mechanism, const StructureProfile& structure,
                         const Priors& priors, std::size_t trials, std::uint64_t seed) {
  AxiomReport out;
  const std::size_t n = structure.buyer_count();
  const auto redraw = [&](BuyerId b, Rng& rng) { return random_subset(structure.neighbors(b), rng); };
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, t);
    std::vector<std::vector<BuyerId>> declared(n);
    for (std::size_t i = 0; i < n; ++i) declared[i] = redraw(BuyerId::from_index(i), rng);
    ReportProfile report{Network({structure.seller_neighbors().begin(),
                                 structure.seller_neighbors().end()},
                                std::move(declared)),
                         {}};
    priors.sample(n, rng, report.bids);
    probe(mechanism, report, priors, redraw, rng, t, out);
  }
  return out;
}

AxiomReport check_axioms(const Mechanism& mechanism, const ReportProfile& report,
                         const Priors& priors, std::size_t trials, std::uint64_t seed) {
  AxiomReport out;
  const std::size_t n = report.buyer_count();
  std::vector<BuyerId> everyone;
  for (std::size_t i = 0; i < n; ++i) everyone.push_back(BuyerId::from_index(i));
  const auto redraw = [&](BuyerId b, Rng& rng) {
    auto s = random_subset(everyone, rng);
    std::erase(s, b);
    return s;
  };
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, t);
    probe(mechanism, report, priors, redraw, rng, t, out);
  }
  return out;
}

}  // namespace diffauction
