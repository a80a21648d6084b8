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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffauction/network.hpp"

namespace diffauction {

/// A parsed instance file: the structure plus valuations when the file
/// carries one for every buyer.
struct Instance {
  StructureProfile structure;
  std::optional<std::vector<double>> valuations;
  /// Original node label of each buyer (edge lists only; empty for JSON).
  std::vector<std::string> labels;
};

/// {"seller_neighbors":[ids], "buyers":[{"id":int, "neighbors":[ids],
/// "valuation": optional real}]}. Ids must be exactly 1..n.
Instance parse_instance_json(std::string_view text);
std::string serialize_instance_json(
    const StructureProfile& structure,
    const std::optional<std::vector<double>>& valuations = std::nullopt);

struct EdgeListOptions {
  /// Node label to treat as the seller, in addition to the literal token "s".
  std::optional<std::string> seller_node;
};

/// One "u v" pair per line, "s" for the seller, '#' starts a comment. Numeric
/// labels are mapped to dense ids in ascending numeric order. A line with a
/// single label declares an isolated buyer.
Instance parse_edge_list(std::string_view text, const EdgeListOptions& options = {});
std::string serialize_edge_list(const StructureProfile& structure);

/// Dispatches on content: a leading '{' means JSON, anything else an edge list.
Instance parse_instance(std::string_view text, const EdgeListOptions& options = {});
Instance load_instance(const std::filesystem::path& path,
                       const EdgeListOptions& options = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace diffauction
