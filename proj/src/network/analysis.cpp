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

#include "diffauction/network.hpp"

namespace diffauction {
namespace {

class Bfs {
 public:
  explicit Bfs(const Network& net) : net_(net), seen_(net.buyer_count(), 0) {
    queue_.reserve(net.buyer_count());
  }

  // Marks every buyer reachable from the seller without following the
  // declared edges of `muted`. Returns the visit stamp used in seen().
  std::uint32_t run(std::uint32_t muted) {
    ++stamp_;
    queue_.clear();
    for (BuyerId b : net_.seller_neighbors()) visit(static_cast<std::uint32_t>(b.index()));
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const std::uint32_t u = queue_[head];
      if (u == muted) continue;
      for (BuyerId w : net_.neighbors(BuyerId::from_index(u))) {
        visit(static_cast<std::uint32_t>(w.index()));
      }
    }
    return stamp_;
  }

  bool reached(std::uint32_t i) const { return seen_[i] == stamp_; }
  std::size_t reached_count() const { return queue_.size(); }

 private:
  void visit(std::uint32_t i) {
    if (seen_[i] != stamp_) {
      seen_[i] = stamp_;
      queue_.push_back(i);
    }
  }

  const Network& net_;
  std::vector<std::uint32_t> seen_;
  std::vector<std::uint32_t> queue_;
  std::uint32_t stamp_ = 0;
};

}  // namespace

DiffusionAnalysis::DiffusionAnalysis(const Network& declared) {
  const std::size_t n = declared.buyer_count();
  valid_.assign(n, 0);
  distance_.assign(n, 0);
  depth_.assign(n, 0);
  parent_.assign(n, kNone);
  begin_.assign(n, 0);
  end_.assign(n, 0);

  std::vector<std::uint32_t> order;
  order.reserve(n);
  for (BuyerId b : declared.seller_neighbors()) {
    if (!distance_[b.index()]) {
      distance_[b.index()] = 1;
      order.push_back(static_cast<std::uint32_t>(b.index()));
    }
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    const std::uint32_t u = order[head];
    for (BuyerId w : declared.neighbors(BuyerId::from_index(u))) {
      if (!distance_[w.index()]) {
        distance_[w.index()] = distance_[u] + 1;
        order.push_back(static_cast<std::uint32_t>(w.index()));
      }
    }
  }
  for (std::uint32_t u : order) valid_[u] = 1;
  std::sort(order.begin(), order.end());
  const std::size_t m = order.size();

  // Pass 1: how many valid buyers each buyer cuts off by withholding.
  Bfs bfs(declared);
  std::vector<std::size_t> cut_size(n, 0);
  for (std::uint32_t i : order) {
    if (declared.neighbors(BuyerId::from_index(i)).empty()) continue;
    bfs.run(i);
    cut_size[i] = m - bfs.reached_count();
  }
  // Pass 2: the deepest critical buyer of j is the one cutting off the
  // fewest buyers among those that cut off j.
  for (std::uint32_t i : order) {
    if (cut_size[i] == 0) continue;
    bfs.run(i);
    for (std::uint32_t j : order) {
      if (bfs.reached(j)) continue;
      if (parent_[j] == kNone || cut_size[i] < cut_size[parent_[j]]) {
        parent_[j] = i;
      }
    }
  }

  // Preorder layout. `order` is sorted, so children come out sorted by id.
  std::vector<std::vector<std::uint32_t>> children(n);
  std::vector<std::uint32_t> roots;
  for (std::uint32_t j : order) {
    (parent_[j] == kNone ? roots : children[parent_[j]]).push_back(j);
  }
  preorder_.reserve(m);
  std::vector<std::pair<std::uint32_t, std::size_t>> stack;
  for (std::uint32_t root : roots) {
    stack.emplace_back(root, 0);
    begin_[root] = static_cast<std::uint32_t>(preorder_.size());
    preorder_.push_back(root);
    depth_[root] = 0;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < children[u].size()) {
        const std::uint32_t c = children[u][next++];
        depth_[c] = depth_[u] + 1;
        begin_[c] = static_cast<std::uint32_t>(preorder_.size());
        preorder_.push_back(c);
        stack.emplace_back(c, 0);
      } else {
        end_[u] = static_cast<std::uint32_t>(preorder_.size());
        stack.pop_back();
      }
    }
  }
}

std::vector<BuyerId> DiffusionAnalysis::valid_buyers() const {
  std::vector<BuyerId> out;
  for (std::size_t i = 0; i < valid_.size(); ++i) {
    if (valid_[i]) out.push_back(BuyerId::from_index(i));
  }
  return out;
}

std::optional<BuyerId> DiffusionAnalysis::parent(BuyerId i) const {
  const std::uint32_t p = parent_[i.index()];
  if (p == kNone) return std::nullopt;
  return BuyerId::from_index(p);
}

bool DiffusionAnalysis::is_critical_for(BuyerId a, BuyerId b) const {
  const std::size_t ai = a.index(), bi = b.index();
  if (ai == bi || !valid_[ai] || !valid_[bi]) return false;
  return begin_[ai] < begin_[bi] && begin_[bi] < end_[ai];
}

std::vector<BuyerId> DiffusionAnalysis::critical_buyers(BuyerId i) const {
  std::vector<BuyerId> out;
  for (std::uint32_t p = parent_[i.index()]; p != kNone; p = parent_[p]) {
    out.push_back(BuyerId::from_index(p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace diffauction
