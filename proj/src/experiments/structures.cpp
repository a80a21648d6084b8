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
#include <map>
#include <numeric>
#include <set>

#include "diffauction/errors.hpp"
#include "diffauction/experiments.hpp"

namespace diffauction {
namespace {

constexpr std::size_t kMaxCanonicalBuyers = 8;

// Bit layout: seller adjacency for buyers 0..n-1, then the upper triangle of
// the buyer adjacency matrix row by row.
std::vector<std::uint8_t> encode(std::size_t n, const std::vector<std::uint8_t>& seller,
                                 const std::vector<std::vector<std::uint8_t>>& adj,
                                 const std::vector<std::size_t>& perm) {
  // perm[new] = old
  std::vector<std::uint8_t> code;
  code.reserve(n + n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) code.push_back(seller[perm[i]]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) code.push_back(adj[perm[i]][perm[j]]);
  }
  return code;
}

StructureProfile decode(std::size_t n, const std::vector<std::uint8_t>& code) {
  std::vector<BuyerId> seller;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    if (code[i]) seller.push_back(BuyerId::from_index(i));
  }
  std::size_t at = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (code[at++]) edges.emplace_back(BuyerId::from_index(i), BuyerId::from_index(j));
    }
  }
  return StructureProfile::from_edges(n, std::move(seller), edges);
}

// Canonical codes put seller neighbours first and dense edges early, so the
// lexicographically largest code is taken as the representative.
std::vector<std::uint8_t> canonical(std::size_t n, const std::vector<std::uint8_t>& seller,
                                    const std::vector<std::vector<std::uint8_t>>& adj) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint8_t> best;
  do {
    auto code = encode(n, seller, adj, perm);
    if (code > best) best = std::move(code);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

NamedStructure entry(std::string id, std::vector<std::string> aliases, std::size_t n,
                     std::vector<std::uint32_t> seller,
                     std::vector<std::pair<std::uint32_t, std::uint32_t>> solid,
                     std::vector<std::pair<std::uint32_t, std::uint32_t>> dashed) {
  const auto to_edges = [](const auto& pairs) {
    std::vector<Edge> out;
    for (auto [a, b] : pairs) out.emplace_back(BuyerId{a}, BuyerId{b});
    return out;
  };
  std::vector<BuyerId> rs;
  for (auto s : seller) rs.push_back(BuyerId{s});
  const auto edges = to_edges(solid);
  return {std::move(id), std::move(aliases), StructureProfile::from_edges(n, rs, edges),
          to_edges(dashed)};
}

}  // namespace

std::vector<std::uint8_t> canonical_code(const StructureProfile& structure) {
  const std::size_t n = structure.buyer_count();
  if (n > kMaxCanonicalBuyers) {
    throw PreconditionError("canonical form supports at most " +
                            std::to_string(kMaxCanonicalBuyers) + " buyers");
  }
  std::vector<std::uint8_t> seller(n, 0);
  std::vector<std::vector<std::uint8_t>> adj(n, std::vector<std::uint8_t>(n, 0));
  for (BuyerId b : structure.seller_neighbors()) seller[b.index()] = 1;
  for (const auto& [a, b] : structure.buyer_edges()) adj[a.index()][b.index()] = adj[b.index()][a.index()] = 1;
  return canonical(n, seller, adj);
}

std::vector<StructureProfile> enumerate_structures(std::size_t n) {
  if (n == 0 || n > kMaxQuadratureBuyers) {
    throw PreconditionError("structure enumeration supports 1.." +
                            std::to_string(kMaxQuadratureBuyers) + " buyers");
  }
  const std::size_t pairs = n * (n - 1) / 2;
  std::set<std::vector<std::uint8_t>, std::greater<>> classes;
  for (std::uint32_t smask = 1; smask < (1u << n); ++smask) {
    for (std::uint32_t emask = 0; emask < (1u << pairs); ++emask) {
      std::vector<std::uint8_t> seller(n);
      std::vector<std::vector<std::uint8_t>> adj(n, std::vector<std::uint8_t>(n, 0));
      for (std::size_t i = 0; i < n; ++i) seller[i] = smask >> i & 1;
      std::size_t bit = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++bit) adj[i][j] = adj[j][i] = emask >> bit & 1;
      }
      // Connected: every buyer reachable from the seller.
      std::vector<std::uint8_t> seen = seller;
      for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (!seen[i]) continue;
          for (std::size_t j = 0; j < n; ++j) {
            if (adj[i][j] && !seen[j]) seen[j] = 1, grew = true;
          }
        }
      }
      if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n)) continue;
      classes.insert(canonical(n, seller, adj));
    }
  }
  std::vector<StructureProfile> out;
  for (const auto& code : classes) out.push_back(decode(n, code));
  return out;
}

std::vector<StructureProfile> NamedStructure::variants() const {
  std::vector<StructureProfile> out;
  const auto base = structure.buyer_edges();
  for (std::uint32_t mask = 0; mask < (1u << optional_edges.size()); ++mask) {
    auto edges = base;
    for (std::size_t t = 0; t < optional_edges.size(); ++t) {
      if (mask >> t & 1) edges.push_back(optional_edges[t]);
    }
    out.push_back(StructureProfile::from_edges(
        structure.buyer_count(),
        {structure.seller_neighbors().begin(), structure.seller_neighbors().end()}, edges));
  }
  return out;
}

const std::vector<NamedStructure>& structure_catalog() {
  static const std::vector<NamedStructure> catalog = {
      entry("n3-1", {"star-triangle", "star-3"}, 3, {1, 2, 3}, {}, {{1, 2}, {2, 3}, {1, 3}}),
      entry("n3-2", {"pendant-3"}, 3, {1, 2}, {{2, 3}}, {{1, 2}}),
      entry("n3-3", {"cycle-4"}, 3, {1, 2}, {{2, 3}, {1, 3}}, {{1, 2}}),
      entry("n3-4", {"fork-3"}, 3, {1}, {{1, 2}, {1, 3}}, {{2, 3}}),
      entry("n3-5", {"chain-3"}, 3, {1}, {{1, 2}, {2, 3}}, {}),

      entry("n4-a1", {"star-4"}, 4, {1, 2, 3, 4}, {}, {{1, 3}, {2, 4}}),
      entry("n4-a2", {}, 4, {1, 2, 3}, {{3, 4}}, {{1, 2}, {2, 3}, {1, 3}}),
      entry("n4-a3", {}, 4, {1, 2, 3}, {{3, 4}, {1, 4}}, {{1, 2}, {2, 3}, {1, 3}, {2, 4}}),
      entry("n4-a4", {}, 4, {1, 2}, {{1, 3}, {3, 4}}, {{1, 2}}),
      entry("n4-a5", {}, 4, {1, 2}, {{1, 4}, {1, 3}}, {{1, 2}, {3, 4}}),
      entry("n4-b1", {}, 4, {1, 2}, {{1, 3}, {2, 4}}, {{1, 2}}),
      entry("n4-b2", {}, 4, {1, 2}, {{1, 4}, {1, 3}, {2, 4}}, {{1, 2}}),
      entry("n4-b3", {}, 4, {1, 2}, {{1, 3}, {2, 4}, {3, 4}}, {{1, 2}, {1, 4}}),
      entry("n4-b4", {}, 4, {1, 2}, {{1, 4}, {1, 3}, {2, 3}, {2, 4}}, {{3, 4}, {1, 2}}),
      entry("n4-b5", {}, 4, {1, 2}, {{1, 3}, {2, 3}, {3, 4}}, {{1, 2}}),
      entry("n4-c1", {}, 4, {1}, {{1, 2}, {1, 3}, {1, 4}}, {{2, 3}, {3, 4}, {2, 4}}),
      entry("n4-c2", {}, 4, {1}, {{1, 2}, {1, 3}, {3, 4}}, {{2, 3}}),
      entry("n4-c3", {}, 4, {1}, {{1, 3}, {3, 4}, {4, 2}, {2, 1}}, {{2, 3}}),
      entry("n4-c4", {}, 4, {1}, {{1, 2}, {2, 3}, {2, 4}}, {{3, 4}}),
      entry("n4-c5", {"chain-4"}, 4, {1}, {{1, 2}, {2, 3}, {3, 4}}, {}),
  };
  return catalog;
}

const NamedStructure* find_structure(std::string_view name) {
  for (const auto& e : structure_catalog()) {
    if (e.id == name || std::find(e.aliases.begin(), e.aliases.end(), name) != e.aliases.end()) {
      return &e;
    }
  }
  return nullptr;
}

}  // namespace diffauction
