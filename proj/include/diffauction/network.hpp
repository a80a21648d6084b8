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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace diffauction {

/// Buyer identifier. Values are dense and 1-based; the seller is not a buyer
/// and has no id. Id order is the lexicographic tie-break order.
struct BuyerId {
  std::uint32_t value = 0;

  constexpr std::size_t index() const { return value - 1; }
  static constexpr BuyerId from_index(std::size_t i) {
    return BuyerId{static_cast<std::uint32_t>(i + 1)};
  }
  constexpr auto operator<=>(const BuyerId&) const = default;
};

using Edge = std::pair<BuyerId, BuyerId>;

/// Seller-rooted adjacency: the seller's neighbour set plus one neighbour set
/// per buyer. Used both for true structures and for declared reports, so it
/// does not require symmetry. Neighbour lists are kept sorted and unique.
class Network {
 public:
  Network() = default;
  explicit Network(std::size_t buyer_count);
  Network(std::vector<BuyerId> seller_neighbors,
          std::vector<std::vector<BuyerId>> neighbors);

  std::size_t buyer_count() const { return neighbors_.size(); }
  std::span<const BuyerId> seller_neighbors() const { return seller_neighbors_; }
  std::span<const BuyerId> neighbors(BuyerId i) const {
    return neighbors_[i.index()];
  }

  /// Copy with buyer i's neighbour set replaced.
  Network with_neighbors(BuyerId i, std::vector<BuyerId> replacement) const;

  bool operator==(const Network&) const = default;

 private:
  std::vector<BuyerId> seller_neighbors_;
  std::vector<std::vector<BuyerId>> neighbors_;
};

/// The true social network. Symmetric, loop-free, and the seller has at least
/// one neighbour.
class StructureProfile {
 public:
  StructureProfile() = default;
  explicit StructureProfile(Network network);

  static StructureProfile from_edges(std::size_t buyer_count,
                                     std::vector<BuyerId> seller_neighbors,
                                     std::span<const Edge> buyer_edges);

  const Network& network() const { return network_; }
  std::size_t buyer_count() const { return network_.buyer_count(); }
  std::span<const BuyerId> seller_neighbors() const {
    return network_.seller_neighbors();
  }
  std::span<const BuyerId> neighbors(BuyerId i) const {
    return network_.neighbors(i);
  }

  /// Buyer-buyer edges with first < second, sorted.
  std::vector<Edge> buyer_edges() const;

  bool operator==(const StructureProfile&) const = default;

 private:
  Network network_;
};

/// What the mechanism observes: declared neighbour sets plus one bid per
/// buyer (indexed by BuyerId::index()).
struct ReportProfile {
  Network declared;
  std::vector<double> bids;

  static ReportProfile truthful(const StructureProfile& structure,
                                std::vector<double> valuations);

  std::size_t buyer_count() const { return declared.buyer_count(); }
  double bid(BuyerId i) const { return bids[i.index()]; }
};

// ---------------------------------------------------------------------------
// Reachability semantics of diffusion.

/// V(t'): buyers reachable from the seller along declared edges. Sorted.
std::vector<BuyerId> valid_buyers(const Network& declared);

/// V_{-r_i'}(t'): valid buyers once buyer i's declared set is emptied.
/// Contains i whenever i is valid. Sorted.
std::vector<BuyerId> valid_without_diffusion(const Network& declared, BuyerId i);

/// V_{-i}(t') = V_{-r_i'}(t') without i itself.
std::vector<BuyerId> valid_without_buyer(const Network& declared, BuyerId i);

/// C(i) without i: valid buyers lying on every path from the seller to i.
/// Vertex-removal reachability test, O(n (n + m)). Throws PreconditionError
/// when i is not valid.
std::vector<BuyerId> critical_buyers(const Network& declared, BuyerId i);

/// Hop count of the shortest declared path from the seller; seller
/// neighbours are at distance 1. Throws PreconditionError when i is invalid.
int diffusion_distance(const Network& declared, BuyerId i);

/// Structural facts a mechanism needs about one declared network, computed
/// once and reused across bid vectors.
///
/// Critical-buyer relations are stored as a tree: the parent of a valid buyer
/// is her deepest critical buyer (the seller when C(i) is empty). Buyer j lies
/// in the subtree of i exactly when i ∈ C(j), so V_{-i}(t') is every valid
/// buyer outside i's subtree. Valid buyers are laid out in tree preorder,
/// making each subtree a contiguous range of that order.
class DiffusionAnalysis {
 public:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  explicit DiffusionAnalysis(const Network& declared);

  std::size_t buyer_count() const { return valid_.size(); }
  std::size_t valid_count() const { return preorder_.size(); }
  bool is_valid(BuyerId i) const { return valid_[i.index()] != 0; }
  std::vector<BuyerId> valid_buyers() const;

  /// Shortest declared distance; 0 for invalid buyers.
  int distance(BuyerId i) const { return distance_[i.index()]; }
  /// |C(i)|.
  int depth(BuyerId i) const { return depth_[i.index()]; }
  /// Deepest critical buyer, or nullopt when C(i) is empty.
  std::optional<BuyerId> parent(BuyerId i) const;
  /// True when a ∈ C(b), a != b.
  bool is_critical_for(BuyerId a, BuyerId b) const;
  std::vector<BuyerId> critical_buyers(BuyerId i) const;

  /// Buyer indices of valid buyers in tree preorder (children by id).
  std::span<const std::uint32_t> preorder() const { return preorder_; }
  /// Subtree of buyer index i occupies preorder positions [begin, end).
  std::uint32_t subtree_begin(std::size_t i) const { return begin_[i]; }
  std::uint32_t subtree_end(std::size_t i) const { return end_[i]; }

 private:
  std::vector<std::uint8_t> valid_;
  std::vector<int> distance_;
  std::vector<int> depth_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> preorder_;
  std::vector<std::uint32_t> begin_;
  std::vector<std::uint32_t> end_;
};

// ---------------------------------------------------------------------------
// Generators.

/// How the seller is embedded in a generated small-world graph.
struct SellerAttachment {
  enum class Kind {
    kDesignatedNode,  // generate n + 1 nodes, node 0 becomes the seller
    kRandomBuyers,    // generate n buyer nodes, link seller to k of them
  };
  Kind kind = Kind::kDesignatedNode;
  std::size_t random_links = 1;
};

/// Watts-Strogatz ring lattice with rewiring, with n buyers. Graphs in which
/// some buyer is unreachable from the seller are discarded and regenerated
/// with the next seed offset. Deterministic in the seed.
StructureProfile generate_small_world(std::size_t n, std::size_t initial_degree,
                                      double rewire_prob, std::uint64_t seed,
                                      SellerAttachment attachment = {});

/// Random connected structure: a random recursive tree rooted at the seller
/// plus each remaining pair (seller-buyer or buyer-buyer) joined with
/// probability extra_edge_prob.
StructureProfile generate_random_structure(std::size_t n, double extra_edge_prob,
                                           std::uint64_t seed);

/// s -> 1 -> 2 -> ... -> n.
StructureProfile chain_structure(std::size_t n);
/// Every buyer adjacent to the seller only.
StructureProfile star_structure(std::size_t n);
/// Seller adjacent to buyers 1 and 2; buyer 1 adjacent to buyers 3..k+2.
StructureProfile broom_structure(std::size_t k);

}  // namespace diffauction

template <>
struct std::hash<diffauction::BuyerId> {
  std::size_t operator()(diffauction::BuyerId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
