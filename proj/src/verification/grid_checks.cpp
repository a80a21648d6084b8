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
#include <cmath>
#include <exception>
#include <limits>

#include "diffauction/errors.hpp"
#include "diffauction/verification.hpp"

namespace diffauction {
namespace {

std::vector<BuyerId> subset(std::span<const BuyerId> of, std::uint64_t mask) {
  std::vector<BuyerId> out;
  for (std::size_t t = 0; t < of.size(); ++t) {
    if (mask >> t & 1) out.push_back(of[t]);
  }
  return out;
}

std::size_t max_degree(const StructureProfile& s) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < s.buyer_count(); ++i) {
    d = std::max(d, s.neighbors(BuyerId::from_index(i)).size());
  }
  return d;
}

std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp--) r *= base;
  return r;
}

// Writes the base-g digits of `code` into the profile, skipping `skip`.
void decode(std::size_t code, std::span<const double> grid, std::size_t skip,
            std::vector<double>& profile) {
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j == skip) continue;
    profile[j] = grid[code % grid.size()];
    code /= grid.size();
  }
}

void check_exhaustive_bounds(const StructureProfile& s, const DeviationGrid& grid) {
  if (s.buyer_count() > grid.buyer_cap || max_degree(s) > grid.degree_cap) {
    throw PreconditionError("exhaustive check limited to n <= " + std::to_string(grid.buyer_cap) +
                            " and degree <= " + std::to_string(grid.degree_cap) +
                            "; use sampled mode");
  }
}

bool violation_less(const Violation& a, const Violation& b) {
  if (a.buyer != b.buyer) return a.buyer < b.buyer;
  if (a.deviation.bid != b.deviation.bid) return a.deviation.bid < b.deviation.bid;
  if (a.deviation.declared != b.deviation.declared) return a.deviation.declared < b.deviation.declared;
  return a.valuations < b.valuations;
}

// Runs body(task, sink) for task in [0, count), collecting violations per
// thread and merging them in a fixed order.
template <typename Body>
std::vector<Violation> run_tasks(std::size_t count, bool parallel, Body body) {
  std::vector<Violation> merged;
  std::exception_ptr failure;
#pragma omp parallel if (parallel)
  {
    std::vector<Violation> local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(count); ++t) {
      try {
        body(static_cast<std::size_t>(t), local);
      } catch (...) {
#pragma omp critical(diffauction_check_error)
        if (!failure) failure = std::current_exception();
      }
    }
#pragma omp critical(diffauction_check_merge)
    merged.insert(merged.end(), local.begin(), local.end());
  }
  if (failure) std::rethrow_exception(failure);
  std::sort(merged.begin(), merged.end(), violation_less);
  return merged;
}

// Every (bid, subset) deviation of one buyer against one profile of the
// others, summarised by the cheapest winning deviation and whether some
// deviation loses outright (utility 0 whatever the valuation).
struct DeviationSummary {
  double min_price = std::numeric_limits<double>::infinity();
  Deviation cheapest;
  bool can_lose = false;
  Deviation losing;
};

}  // namespace

DeviationGrid DeviationGrid::evenly_spaced(const ValueDistribution& dist, std::size_t points) {
  if (points < 2) throw PreconditionError("grid needs at least 2 points");
  DeviationGrid g;
  const double step = (dist.high() - dist.low()) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    g.bids.push_back(k + 1 == points ? dist.high()
                                     : dist.low() + (dist.high() - dist.low()) *
                                                        static_cast<double>(k) /
                                                        static_cast<double>(points - 1));
  }
  try {
    const double tau = dist.reserve();
    for (double x : {tau - step, tau, tau + step}) {
      if (x < dist.low() || x > dist.high()) continue;
      const bool near = std::any_of(g.bids.begin(), g.bids.end(),
                                    [&](double y) { return std::abs(x - y) < 1e-12; });
      if (!near) g.bids.push_back(x);
    }
  } catch (const DomainError&) {
  }
  std::sort(g.bids.begin(), g.bids.end());
  return g;
}

void DeviationGrid::validate(const ValueDistribution& dist) const {
  if (bids.empty()) throw PreconditionError("empty bid grid");
  for (std::size_t k = 0; k < bids.size(); ++k) {
    if (bids[k] < dist.low() || bids[k] > dist.high()) {
      throw PreconditionError("grid point outside the support");
    }
    if (k && !(bids[k - 1] < bids[k])) throw PreconditionError("grid must be sorted and unique");
  }
}

std::vector<Violation> check_ir(const Mechanism& mechanism, const StructureProfile& structure,
                                const Priors& priors, const DeviationGrid& grid,
                                const CheckOptions& options) {
  const std::size_t n = structure.buyer_count();
  for (std::size_t i = 0; i < n; ++i) grid.validate(priors.of_index(i));
  const auto prepared = mechanism.prepare(structure.network(), priors);
  const auto evaluate = [&](const std::vector<double>& v, std::vector<Violation>& sink) {
    const Outcome o = prepared->allocate(v);
    if (!o.winner) return;
    const double u = v[o.winner->index()] - o.price;
    if (u < -kUtilityTolerance) {
      const auto nb = structure.neighbors(*o.winner);
      sink.push_back({Violation::Kind::kIr, *o.winner, u, u,
                      {v[o.winner->index()], {nb.begin(), nb.end()}}, v});
    }
  };

  if (options.mode == CheckOptions::Mode::kExhaustive) {
    check_exhaustive_bounds(structure, grid);
    return run_tasks(power(grid.bids.size(), n), options.parallel,
                     [&](std::size_t code, std::vector<Violation>& sink) {
                       std::vector<double> v(n);
                       decode(code, grid.bids, n, v);
                       evaluate(v, sink);
                     });
  }
  return run_tasks(options.samples, options.parallel,
                   [&](std::size_t t, std::vector<Violation>& sink) {
                     Rng rng = make_stream(options.seed, t);
                     std::vector<double> v(n);
                     for (auto& x : v) x = grid.bids[uniform_below(rng, grid.bids.size())];
                     evaluate(v, sink);
                   });
}

std::vector<Violation> check_ic(const Mechanism& mechanism, const StructureProfile& structure,
                                const Priors& priors, const DeviationGrid& grid,
                                const CheckOptions& options) {
  const std::size_t n = structure.buyer_count();
  const std::size_t g = grid.bids.size();
  for (std::size_t i = 0; i < n; ++i) grid.validate(priors.of_index(i));
  const bool exhaustive = options.mode == CheckOptions::Mode::kExhaustive;
  if (exhaustive) check_exhaustive_bounds(structure, grid);

  std::vector<Violation> all;
  for (std::size_t i = 0; i < n; ++i) {
    const BuyerId buyer = BuyerId::from_index(i);
    const auto truth = structure.neighbors(buyer);
    const std::uint64_t full = (std::uint64_t{1} << truth.size()) - 1;
    const auto truthful = mechanism.prepare(structure.network(), priors);

    // The deviator's own valuation never enters the outcome, so one sweep
    // over deviations serves every candidate valuation at once.
    const auto compare = [&](std::vector<double>& profile, const DeviationSummary& dev,
                             std::span<const double> valuations,
                             std::vector<Violation>& sink) {
      for (double vi : valuations) {
        profile[i] = vi;
        const Outcome o = truthful->allocate(profile);
        const double u_truth = o.winner == buyer ? vi - o.price : 0.0;
        double best = -std::numeric_limits<double>::infinity();
        const Deviation* how = nullptr;
        if (dev.can_lose) {
          best = 0.0;
          how = &dev.losing;
        }
        if (vi - dev.min_price > best) {
          best = vi - dev.min_price;
          how = &dev.cheapest;
        }
        if (how && best > u_truth + kUtilityTolerance) {
          sink.push_back({Violation::Kind::kIc, buyer, u_truth, best, *how, profile});
        }
      }
    };
    const auto consider = [&](DeviationSummary& dev, const Outcome& o, double bid,
                              std::uint64_t mask) {
      if (o.winner == buyer) {
        if (o.price < dev.min_price) dev = {o.price, {bid, subset(truth, mask)}, dev.can_lose, dev.losing};
      } else if (!dev.can_lose) {
        dev.can_lose = true;
        dev.losing = {bid, subset(truth, mask)};
      }
    };

    if (exhaustive) {
      std::vector<std::unique_ptr<PreparedAuction>> by_subset;
      for (std::uint64_t mask = 0; mask <= full; ++mask) {
        by_subset.push_back(mechanism.prepare(
            structure.network().with_neighbors(buyer, subset(truth, mask)), priors));
      }
      auto found = run_tasks(power(g, n - 1), options.parallel,
                             [&](std::size_t code, std::vector<Violation>& sink) {
                               std::vector<double> profile(n);
                               decode(code, grid.bids, i, profile);
                               DeviationSummary dev;
                               for (std::uint64_t mask = 0; mask <= full; ++mask) {
                                 for (double bid : grid.bids) {
                                   profile[i] = bid;
                                   consider(dev, by_subset[mask]->allocate(profile), bid, mask);
                                 }
                               }
                               compare(profile, dev, grid.bids, sink);
                             });
      all.insert(all.end(), found.begin(), found.end());
    } else {
      constexpr std::size_t kDeviationsPerSample = 16;
      auto found = run_tasks(options.samples, options.parallel,
                             [&](std::size_t t, std::vector<Violation>& sink) {
                               Rng rng = make_stream(options.seed, (i << 40) ^ t);
                               std::vector<double> profile(n);
                               for (auto& x : profile) x = grid.bids[uniform_below(rng, g)];
                               DeviationSummary dev;
                               for (std::size_t d = 0; d < kDeviationsPerSample; ++d) {
                                 const double bid = grid.bids[uniform_below(rng, g)];
                                 const std::uint64_t mask = truth.size() >= 64
                                                                ? rng()
                                                                : rng() & full;
                                 const auto prepared = mechanism.prepare(
                                     structure.network().with_neighbors(buyer, subset(truth, mask)),
                                     priors);
                                 profile[i] = bid;
                                 consider(dev, prepared->allocate(profile), bid, mask);
                               }
                               const double vi = grid.bids[uniform_below(rng, g)];
                               compare(profile, dev, std::span(&vi, 1), sink);
                             });
      all.insert(all.end(), found.begin(), found.end());
    }
  }
  std::sort(all.begin(), all.end(), violation_less);
  return all;
}

}  // namespace diffauction
