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
#include <set>
#include <string>

#include "diffauction/errors.hpp"
#include "diffauction/network.hpp"
#include "diffauction/random.hpp"

namespace diffauction {
namespace {

constexpr int kMaxAttempts = 1000;

// Ring lattice over `nodes` vertices, each joined to degree/2 successors, then
// every lattice edge (u, u+j) rewired to (u, w) with probability p. Same edge
// order and rewiring rule as networkx.watts_strogatz_graph.
std::vector<std::set<std::uint32_t>> watts_strogatz(std::size_t nodes,
                                                    std::size_t degree, double p,
                                                    Rng& rng) {
  std::vector<std::set<std::uint32_t>> adj(nodes);
  const auto at = [nodes](std::size_t u, std::size_t j) {
    return static_cast<std::uint32_t>((u + j) % nodes);
  };
  for (std::size_t j = 1; j <= degree / 2; ++j) {
    for (std::size_t u = 0; u < nodes; ++u) {
      adj[u].insert(at(u, j));
      adj[at(u, j)].insert(static_cast<std::uint32_t>(u));
    }
  }
  for (std::size_t j = 1; j <= degree / 2; ++j) {
    for (std::size_t u = 0; u < nodes; ++u) {
      if (uniform01(rng) >= p) continue;
      const std::uint32_t v = at(u, j);
      if (!adj[u].count(v)) continue;  // already rewired away
      if (adj[u].size() >= nodes - 1) continue;
      std::uint32_t w;
      do {
        w = static_cast<std::uint32_t>(uniform_below(rng, nodes));
      } while (w == u || adj[u].count(w));
      adj[u].erase(v);
      adj[v].erase(static_cast<std::uint32_t>(u));
      adj[u].insert(w);
      adj[w].insert(static_cast<std::uint32_t>(u));
    }
  }
  return adj;
}

bool all_reachable(const Network& net) {
  return valid_buyers(net).size() == net.buyer_count();
}

}  // namespace

StructureProfile generate_small_world(std::size_t n, std::size_t initial_degree,
                                      double rewire_prob, std::uint64_t seed,
                                      SellerAttachment attachment) {
  const bool designated =
      attachment.kind == SellerAttachment::Kind::kDesignatedNode;
  const std::size_t nodes = designated ? n + 1 : n;
  if (n < 3) throw PreconditionError("small world: need n >= 3");
  if (initial_degree < 2 || initial_degree % 2 != 0 || initial_degree >= n) {
    throw PreconditionError("small world: initial degree must be even, >= 2 and < n");
  }
  if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) {
    throw PreconditionError("small world: rewire probability must lie in [0, 1]");
  }
  if (!designated && (attachment.random_links == 0 || attachment.random_links > n)) {
    throw PreconditionError("small world: seller links must lie in 1..n");
  }

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = make_stream(seed + static_cast<std::uint64_t>(attempt), 0);
    const auto adj = watts_strogatz(nodes, initial_degree, rewire_prob, rng);

    std::vector<BuyerId> seller;
    std::vector<std::vector<BuyerId>> buyers(n);
    if (designated) {
      for (std::uint32_t w : adj[0]) seller.push_back(BuyerId{w});
      for (std::size_t u = 1; u < nodes; ++u) {
        for (std::uint32_t w : adj[u]) {
          if (w != 0) buyers[u - 1].push_back(BuyerId{w});
        }
      }
    } else {
      for (std::size_t u = 0; u < nodes; ++u) {
        for (std::uint32_t w : adj[u]) buyers[u].push_back(BuyerId::from_index(w));
      }
      std::vector<std::uint32_t> pool(n);
      for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
      for (std::size_t k = 0; k < attachment.random_links; ++k) {
        const std::size_t pick = k + uniform_below(rng, n - k);
        std::swap(pool[k], pool[pick]);
        seller.push_back(BuyerId::from_index(pool[k]));
      }
    }
    if (seller.empty()) continue;
    Network net(std::move(seller), std::move(buyers));
    if (all_reachable(net)) return StructureProfile(std::move(net));
  }
  throw PreconditionError("small world: no connected graph after " +
                          std::to_string(kMaxAttempts) + " seed offsets");
}

StructureProfile generate_random_structure(std::size_t n, double extra_edge_prob,
                                           std::uint64_t seed) {
  if (n == 0) throw PreconditionError("random structure: need n >= 1");
  if (!(extra_edge_prob >= 0.0 && extra_edge_prob <= 1.0)) {
    throw PreconditionError("random structure: edge probability must lie in [0, 1]");
  }
  Rng rng = make_stream(seed, 1);
  // Vertex 0 is the seller, buyer i is vertex i.
  std::vector<std::vector<std::uint8_t>> joined(n + 1, std::vector<std::uint8_t>(n + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t parent = uniform_below(rng, i);
    joined[i][parent] = joined[parent][i] = 1;
  }
  for (std::size_t a = 0; a <= n; ++a) {
    for (std::size_t b = a + 1; b <= n; ++b) {
      if (!joined[a][b] && uniform01(rng) < extra_edge_prob) {
        joined[a][b] = joined[b][a] = 1;
      }
    }
  }
  std::vector<BuyerId> seller;
  std::vector<Edge> edges;
  for (std::size_t b = 1; b <= n; ++b) {
    if (joined[0][b]) seller.push_back(BuyerId{static_cast<std::uint32_t>(b)});
    for (std::size_t c = b + 1; c <= n; ++c) {
      if (joined[b][c]) {
        edges.emplace_back(BuyerId{static_cast<std::uint32_t>(b)},
                           BuyerId{static_cast<std::uint32_t>(c)});
      }
    }
  }
  return StructureProfile::from_edges(n, std::move(seller), edges);
}

}  // namespace diffauction
