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
#include <numbers>

#include "diffauction/errors.hpp"
#include "diffauction/experiments.hpp"

namespace diffauction {
namespace {

struct Axis {
  std::vector<double> x;
  std::vector<double> w;  // quadrature weight times density
};

// Splits `total` nodes over panels in proportion to length (largest
// remainder), at least one per panel.
std::vector<std::size_t> share_nodes(const std::vector<double>& edges, std::size_t total) {
  const std::size_t panels = edges.size() - 1;
  if (total < panels) {
    throw PreconditionError("need at least " + std::to_string(panels) + " nodes per axis");
  }
  const double span = edges.back() - edges.front();
  std::vector<std::size_t> count(panels, 1);
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t used = panels;
  const std::size_t spare = total - panels;
  for (std::size_t p = 0; p < panels; ++p) {
    const double exact = static_cast<double>(spare) * (edges[p + 1] - edges[p]) / span;
    const auto whole = static_cast<std::size_t>(std::floor(exact));
    count[p] += whole;
    used += whole;
    remainder.emplace_back(-(exact - static_cast<double>(whole)), p);
  }
  std::sort(remainder.begin(), remainder.end());
  for (std::size_t r = 0; used < total; ++r, ++used) ++count[remainder[r].second];
  return count;
}

Axis make_axis(const ValueDistribution& dist, const std::vector<double>& breakpoints,
               std::size_t nodes) {
  std::vector<double> edges{dist.low()};
  for (double b : breakpoints) {
    if (b > dist.low() && b < dist.high()) edges.push_back(b);
  }
  edges.push_back(dist.high());
  const auto count = share_nodes(edges, nodes);
  Axis axis;
  std::vector<double> gx, gw;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    gauss_legendre(count[p], gx, gw);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    const double mid = 0.5 * (edges[p + 1] + edges[p]);
    for (std::size_t k = 0; k < gx.size(); ++k) {
      const double v = mid + half * gx[k];
      axis.x.push_back(v);
      axis.w.push_back(half * gw[k] * dist.pdf(v));
    }
  }
  return axis;
}

double integrate(const PreparedAuction& auction, const std::vector<Axis>& axes, double nudge,
                 Execution execution) {
  const std::size_t n = axes.size();
  const std::size_t outer = axes[0].x.size();
  std::vector<double> partial(outer, 0.0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (execution == Execution::kParallel)
  for (std::ptrdiff_t k0 = 0; k0 < static_cast<std::ptrdiff_t>(outer); ++k0) {
    try {
      std::vector<std::size_t> idx(n, 0);
      idx[0] = static_cast<std::size_t>(k0);
      std::vector<double> v(n), shifted(n);
      double sum = 0.0;
      for (;;) {
        double weight = 1.0;
        bool tie = false;
        for (std::size_t a = 0; a < n; ++a) {
          v[a] = axes[a].x[idx[a]];
          weight *= axes[a].w[idx[a]];
          for (std::size_t b = 0; b < a && !tie; ++b) tie = v[a] == v[b];
        }
        double f;
        if (!tie) {
          f = auction.allocate(v).revenue();
        } else {
          // Resolve the tie once in each direction.
          for (std::size_t a = 0; a < n; ++a) shifted[a] = v[a] + nudge * static_cast<double>(a);
          f = auction.allocate(shifted).revenue();
          for (std::size_t a = 0; a < n; ++a) shifted[a] = v[a] - nudge * static_cast<double>(a);
          f = 0.5 * (f + auction.allocate(shifted).revenue());
        }
        sum += weight * f;
        std::size_t a = n;
        while (--a > 0) {
          if (++idx[a] < axes[a].x.size()) break;
          idx[a] = 0;
        }
        if (a == 0) break;
      }
      partial[static_cast<std::size_t>(k0)] = sum;
    } catch (...) {
#pragma omp critical(diffauction_quad_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double quadrature(const Mechanism& mechanism, const StructureProfile& structure,
                  const Priors& priors, std::size_t nodes, Execution execution) {
  const std::size_t n = structure.buyer_count();
  const auto breakpoints = mechanism.breakpoints(priors, n);
  std::vector<Axis> axes;
  double nudge = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& dist = priors.of_index(i);
    axes.push_back(make_axis(dist, breakpoints, nodes));
    nudge = std::min(nudge, 1e-10 * (dist.high() - dist.low()));
  }
  const auto auction = mechanism.prepare(structure.network(), priors);
  return integrate(*auction, axes, nudge, execution);
}

}  // namespace

void gauss_legendre(std::size_t order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order == 0) throw PreconditionError("Gauss-Legendre order must be positive");
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2 * kk - 1) * x * p1 - (kk - 1) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    weights[i] = weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureEstimate exact_revenue_small(const Mechanism& mechanism,
                                       const StructureProfile& structure, const Priors& priors,
                                       const QuadratureOptions& options) {
  const std::size_t n = structure.buyer_count();
  if (n == 0 || n > kMaxQuadratureBuyers) {
    throw PreconditionError("quadrature supports 1.." + std::to_string(kMaxQuadratureBuyers) +
                            " buyers, instance has " + std::to_string(n) +
                            "; use Monte Carlo");
  }
  priors.check_covers(n);
  QuadratureEstimate out;
  out.nodes_per_dim = options.nodes_per_dim;
  out.value = quadrature(mechanism, structure, priors, options.nodes_per_dim, options.execution);
  out.error_estimate = std::numeric_limits<double>::quiet_NaN();
  if (options.check_nodes) {
    out.error_estimate = std::abs(
        out.value - quadrature(mechanism, structure, priors, options.check_nodes, options.execution));
  }
  return out;
}

}  // namespace diffauction
