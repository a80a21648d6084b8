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

#include "diffauction/errors.hpp"
#include "diffauction/experiments.hpp"

namespace diffauction {
namespace {

constexpr std::size_t kBatch = 4096;

// Running means and co-moments of (a, b), mergeable in a fixed order.
struct Moments {
  double count = 0, mean_a = 0, mean_b = 0, m2a = 0, m2b = 0, cab = 0;

  void add(double a, double b) {
    count += 1;
    const double da = a - mean_a;
    mean_a += da / count;
    const double db = b - mean_b;
    mean_b += db / count;
    m2a += da * (a - mean_a);
    m2b += db * (b - mean_b);
    cab += da * (b - mean_b);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    const double n = count + o.count;
    const double da = o.mean_a - mean_a, db = o.mean_b - mean_b;
    const double w = count * o.count / n;
    m2a += o.m2a + da * da * w;
    m2b += o.m2b + db * db * w;
    cab += o.cab + da * db * w;
    mean_a += da * o.count / n;
    mean_b += db * o.count / n;
    count = n;
  }

  double stderr_of(double m2) const {
    return count > 1 ? std::sqrt(m2 / (count - 1) / count) : 0.0;
  }
};

template <typename Visit>
Moments sweep(const StructureProfile& structure, const Priors& priors, std::size_t samples,
              std::uint64_t seed, Execution execution, Visit visit) {
  if (samples == 0) throw PreconditionError("need at least one sample");
  priors.check_covers(structure.buyer_count());
  const std::size_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<Moments> parts(batches);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (execution == Execution::kParallel)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(batches); ++b) {
    try {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(b));
      std::vector<double> v;
      const std::size_t begin = static_cast<std::size_t>(b) * kBatch;
      const std::size_t end = std::min(samples, begin + kBatch);
      Moments m;
      for (std::size_t s = begin; s < end; ++s) {
        priors.sample(structure.buyer_count(), rng, v);
        const auto [x, y] = visit(v);
        m.add(x, y);
      }
      parts[static_cast<std::size_t>(b)] = m;
    } catch (...) {
#pragma omp critical(diffauction_mc_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  Moments total;
  for (const auto& m : parts) total.merge(m);
  return total;
}

}  // namespace

RevenueEstimate monte_carlo_revenue(const Mechanism& mechanism, const StructureProfile& structure,
                                    const Priors& priors, std::size_t samples, std::uint64_t seed,
                                    Execution execution) {
  const auto auction = mechanism.prepare(structure.network(), priors);
  const Moments m = sweep(structure, priors, samples, seed, execution, [&](const auto& v) {
    return std::pair{auction->allocate(v).revenue(), 0.0};
  });
  return {m.mean_a, m.stderr_of(m.m2a), samples, seed, mechanism.id(), {}};
}

PairedEstimate paired_monte_carlo(const Mechanism& first, const Mechanism& second,
                                  const StructureProfile& structure, const Priors& priors,
                                  std::size_t samples, std::uint64_t seed, Execution execution) {
  const auto a = first.prepare(structure.network(), priors);
  const auto b = second.prepare(structure.network(), priors);
  const Moments m = sweep(structure, priors, samples, seed, execution, [&](const auto& v) {
    return std::pair{a->allocate(v).revenue(), b->allocate(v).revenue()};
  });
  PairedEstimate out;
  out.first = {m.mean_a, m.stderr_of(m.m2a), samples, seed, first.id(), {}};
  out.second = {m.mean_b, m.stderr_of(m.m2b), samples, seed, second.id(), {}};
  out.mean_difference = m.mean_a - m.mean_b;
  out.difference_std_error = m.stderr_of(m.m2a + m.m2b - 2 * m.cab);
  if (m.mean_b != 0) {
    out.ratio = m.mean_a / m.mean_b;
    const double r = out.ratio;
    out.ratio_std_error = m.stderr_of(m.m2a - 2 * r * m.cab + r * r * m.m2b) / std::abs(m.mean_b);
  }
  return out;
}

std::vector<double> revenue_trace(const Mechanism& mechanism, const StructureProfile& structure,
                                  const Priors& priors, std::size_t samples, std::uint64_t seed) {
  const auto auction = mechanism.prepare(structure.network(), priors);
  std::vector<double> out;
  out.reserve(samples);
  std::vector<double> v;
  for (std::size_t b = 0; b * kBatch < samples; ++b) {
    Rng rng = make_stream(seed, b);
    for (std::size_t s = b * kBatch; s < std::min(samples, (b + 1) * kBatch); ++s) {
      priors.sample(structure.buyer_count(), rng, v);
      out.push_back(auction->allocate(v).revenue());
    }
  }
  return out;
}

}  // namespace diffauction
