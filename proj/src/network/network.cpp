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

#include "diffauction/network.hpp"

#include <algorithm>
#include <string>

#include "diffauction/errors.hpp"

namespace diffauction {
namespace {

void normalize(std::vector<BuyerId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

void check_range(BuyerId id, std::size_t n, const char* where) {
  if (id.value == 0 || id.value > n) {
    throw PreconditionError(std::string(where) + ": buyer id " +
                            std::to_string(id.value) + " outside 1.." +
                            std::to_string(n));
  }
}

// Breadth-first reachability from the seller. Buyer `muted` is reached as
// usual but her declared edges are not followed; buyer `removed` is never
// entered.
std::vector<std::uint8_t> reach(const Network& net,
                                std::size_t muted = DiffusionAnalysis::kNone,
                                std::size_t removed = DiffusionAnalysis::kNone) {
  const std::size_t n = net.buyer_count();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint32_t> queue;
  queue.reserve(n);
  for (BuyerId b : net.seller_neighbors()) {
    if (b.index() != removed && !seen[b.index()]) {
      seen[b.index()] = 1;
      queue.push_back(static_cast<std::uint32_t>(b.index()));
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    if (u == muted) continue;
    for (BuyerId w : net.neighbors(BuyerId::from_index(u))) {
      if (w.index() != removed && !seen[w.index()]) {
        seen[w.index()] = 1;
        queue.push_back(static_cast<std::uint32_t>(w.index()));
      }
    }
  }
  return seen;
}

std::vector<BuyerId> to_ids(const std::vector<std::uint8_t>& mask) {
  std::vector<BuyerId> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(BuyerId::from_index(i));
  }
  return out;
}

void require_valid(const std::vector<std::uint8_t>& valid, BuyerId i,
                   const char* op) {
  if (i.value == 0 || i.index() >= valid.size() || !valid[i.index()]) {
    throw PreconditionError(std::string(op) + ": buyer " +
                            std::to_string(i.value) + " is not a valid buyer");
  }
}

}  // namespace

Network::Network(std::size_t buyer_count) : neighbors_(buyer_count) {}

Network::Network(std::vector<BuyerId> seller_neighbors,
                 std::vector<std::vector<BuyerId>> neighbors)
    : seller_neighbors_(std::move(seller_neighbors)),
      neighbors_(std::move(neighbors)) {
  const std::size_t n = neighbors_.size();
  normalize(seller_neighbors_);
  for (BuyerId b : seller_neighbors_) check_range(b, n, "seller neighbours");
  for (std::size_t i = 0; i < n; ++i) {
    normalize(neighbors_[i]);
    for (BuyerId b : neighbors_[i]) {
      check_range(b, n, "neighbour list");
      if (b.index() == i) {
        throw PreconditionError("buyer " + std::to_string(i + 1) +
                                " lists herself as a neighbour");
      }
    }
  }
}

Network Network::with_neighbors(BuyerId i,
                                std::vector<BuyerId> replacement) const {
  Network copy = *this;
  normalize(replacement);
  for (BuyerId b : replacement) check_range(b, buyer_count(), "neighbour list");
  copy.neighbors_[i.index()] = std::move(replacement);
  return copy;
}

StructureProfile::StructureProfile(Network network) : network_(std::move(network)) {
  if (network_.seller_neighbors().empty()) {
    throw PreconditionError("structure: the seller has no neighbours");
  }
  const std::size_t n = network_.buyer_count();
  for (std::size_t i = 0; i < n; ++i) {
    const BuyerId a = BuyerId::from_index(i);
    for (BuyerId b : network_.neighbors(a)) {
      auto back = network_.neighbors(b);
      if (!std::binary_search(back.begin(), back.end(), a)) {
        throw PreconditionError("structure: buyer " + std::to_string(a.value) +
                                " lists " + std::to_string(b.value) +
                                " but not the reverse");
      }
    }
  }
}

StructureProfile StructureProfile::from_edges(std::size_t buyer_count,
                                              std::vector<BuyerId> seller_neighbors,
                                              std::span<const Edge> buyer_edges) {
  std::vector<std::vector<BuyerId>> adj(buyer_count);
  for (const auto& [a, b] : buyer_edges) {
    check_range(a, buyer_count, "edge");
    check_range(b, buyer_count, "edge");
    adj[a.index()].push_back(b);
    adj[b.index()].push_back(a);
  }
  return StructureProfile(Network(std::move(seller_neighbors), std::move(adj)));
}

std::vector<Edge> StructureProfile::buyer_edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < buyer_count(); ++i) {
    const BuyerId a = BuyerId::from_index(i);
    for (BuyerId b : neighbors(a)) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

ReportProfile ReportProfile::truthful(const StructureProfile& structure,
                                      std::vector<double> valuations) {
  if (valuations.size() != structure.buyer_count()) {
    throw PreconditionError("truthful report: expected " +
                            std::to_string(structure.buyer_count()) +
                            " valuations, got " +
                            std::to_string(valuations.size()));
  }
  return ReportProfile{structure.network(), std::move(valuations)};
}

std::vector<BuyerId> valid_buyers(const Network& declared) {
  return to_ids(reach(declared));
}

std::vector<BuyerId> valid_without_diffusion(const Network& declared, BuyerId i) {
  return to_ids(reach(declared, i.index()));
}

std::vector<BuyerId> valid_without_buyer(const Network& declared, BuyerId i) {
  auto out = valid_without_diffusion(declared, i);
  std::erase(out, i);
  return out;
}

std::vector<BuyerId> critical_buyers(const Network& declared, BuyerId i) {
  const auto valid = reach(declared);
  require_valid(valid, i, "critical_buyers");
  std::vector<BuyerId> out;
  for (std::size_t j = 0; j < valid.size(); ++j) {
    if (!valid[j] || j == i.index()) continue;
    if (!reach(declared, DiffusionAnalysis::kNone, j)[i.index()]) {
      out.push_back(BuyerId::from_index(j));
    }
  }
  return out;
}

int diffusion_distance(const Network& declared, BuyerId i) {
  const std::size_t n = declared.buyer_count();
  if (i.value == 0 || i.index() >= n) {
    throw PreconditionError("diffusion_distance: unknown buyer " +
                            std::to_string(i.value));
  }
  std::vector<int> dist(n, 0);
  std::vector<std::uint32_t> queue;
  for (BuyerId b : declared.seller_neighbors()) {
    if (!dist[b.index()]) {
      dist[b.index()] = 1;
      queue.push_back(static_cast<std::uint32_t>(b.index()));
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    for (BuyerId w : declared.neighbors(BuyerId::from_index(u))) {
      if (!dist[w.index()]) {
        dist[w.index()] = dist[u] + 1;
        queue.push_back(static_cast<std::uint32_t>(w.index()));
      }
    }
  }
  if (!dist[i.index()]) {
    throw PreconditionError("diffusion_distance: buyer " +
                            std::to_string(i.value) + " is not a valid buyer");
  }
  return dist[i.index()];
}

StructureProfile chain_structure(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    edges.emplace_back(BuyerId::from_index(i - 1), BuyerId::from_index(i));
  }
  return StructureProfile::from_edges(n, {BuyerId{1}}, edges);
}

StructureProfile star_structure(std::size_t n) {
  std::vector<BuyerId> rs;
  for (std::size_t i = 0; i < n; ++i) rs.push_back(BuyerId::from_index(i));
  return StructureProfile::from_edges(n, std::move(rs), {});
}

StructureProfile broom_structure(std::size_t k) {
  std::vector<Edge> edges;
  for (std::size_t j = 3; j < k + 3; ++j) edges.emplace_back(BuyerId{1}, BuyerId::from_index(j - 1));
  return StructureProfile::from_edges(k + 2, {BuyerId{1}, BuyerId{2}}, edges);
}

}  // namespace diffauction
