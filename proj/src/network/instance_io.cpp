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

#include "diffauction/instance_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "diffauction/errors.hpp"
#include "json.hpp"

namespace diffauction {
namespace {

using nlohmann::json;

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

std::uint32_t read_id(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw ParseError("expected a positive integer buyer id", 0, field);
  }
  return static_cast<std::uint32_t>(j.get<long long>());
}

std::vector<BuyerId> read_ids(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError("expected an array of buyer ids", 0, field);
  std::vector<BuyerId> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(BuyerId{read_id(j[k], field + "[" + std::to_string(k) + "]")});
  }
  return out;
}

bool parse_label(std::string_view token, unsigned long long& out) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::string field)
    : std::runtime_error([&] {
        std::string where;
        if (line) where += "line " + std::to_string(line);
        if (!field.empty()) where += (where.empty() ? "" : ", ") + std::string("field ") + field;
        return where.empty() ? message : where + ": " + message;
      }()),
      line_(line),
      field_(std::move(field)) {}

Instance parse_instance_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of(text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("instance must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "seller_neighbors" && key != "buyers") {
      throw ParseError("unknown key", 0, key);
    }
  }
  if (!doc.contains("seller_neighbors")) throw ParseError("missing", 0, "seller_neighbors");
  if (!doc.contains("buyers") || !doc["buyers"].is_array()) {
    throw ParseError("expected an array", 0, "buyers");
  }
  const json& buyers = doc["buyers"];
  const std::size_t n = buyers.size();
  std::vector<std::vector<BuyerId>> adj(n);
  std::vector<std::optional<double>> values(n);
  std::vector<std::uint8_t> seen(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::string at = "buyers[" + std::to_string(k) + "]";
    const json& b = buyers[k];
    if (!b.is_object() || !b.contains("id")) throw ParseError("expected {\"id\": ...}", 0, at);
    const std::uint32_t id = read_id(b["id"], at + ".id");
    if (id > n) {
      throw ParseError("id " + std::to_string(id) + " outside 1.." + std::to_string(n), 0,
                       at + ".id");
    }
    if (seen[id - 1]) throw ParseError("duplicate buyer id " + std::to_string(id), 0, at + ".id");
    seen[id - 1] = 1;
    if (b.contains("neighbors")) adj[id - 1] = read_ids(b["neighbors"], at + ".neighbors");
    if (b.contains("valuation") && !b["valuation"].is_null()) {
      if (!b["valuation"].is_number()) throw ParseError("expected a number", 0, at + ".valuation");
      values[id - 1] = b["valuation"].get<double>();
    }
  }
  Instance out;
  try {
    out.structure = StructureProfile(
        Network(read_ids(doc["seller_neighbors"], "seller_neighbors"), std::move(adj)));
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  }
  const auto given = std::count_if(values.begin(), values.end(),
                                   [](const auto& v) { return v.has_value(); });
  if (given == static_cast<long>(n) && n > 0) {
    std::vector<double> vals;
    for (const auto& v : values) vals.push_back(*v);
    out.valuations = std::move(vals);
  } else if (given != 0) {
    throw ParseError("valuation given for some buyers but not all", 0, "buyers");
  }
  return out;
}

std::string serialize_instance_json(const StructureProfile& structure,
                                    const std::optional<std::vector<double>>& valuations) {
  std::ostringstream os;
  const auto ids = [&os](std::span<const BuyerId> list) {
    os << '[';
    for (std::size_t k = 0; k < list.size(); ++k) os << (k ? "," : "") << list[k].value;
    os << ']';
  };
  os << "{\"seller_neighbors\":";
  ids(structure.seller_neighbors());
  os << ",\"buyers\":[";
  for (std::size_t i = 0; i < structure.buyer_count(); ++i) {
    const BuyerId b = BuyerId::from_index(i);
    os << (i ? ",\n  " : "\n  ") << "{\"id\":" << b.value << ",\"neighbors\":";
    ids(structure.neighbors(b));
    if (valuations) os << ",\"valuation\":" << json((*valuations)[i]).dump();
    os << '}';
  }
  os << "\n]}\n";
  return os.str();
}

Instance parse_edge_list(std::string_view text, const EdgeListOptions& options) {
  struct Row {
    std::string a, b;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::set<unsigned long long> labels;
  const auto is_seller = [&](const std::string& t) {
    return t == "s" || (options.seller_node && t == *options.seller_node);
  };

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens.size() > 2) throw ParseError("expected \"u v\"", line_no);
    for (const auto& t : tokens) {
      if (is_seller(t)) continue;
      unsigned long long label;
      if (!parse_label(t, label)) {
        throw ParseError("bad node label '" + t + "'", line_no);
      }
      labels.insert(label);
    }
    if (tokens.size() == 1) {
      if (is_seller(tokens[0])) throw ParseError("seller cannot be declared alone", line_no);
      continue;
    }
    if (tokens[0] == tokens[1] || (is_seller(tokens[0]) && is_seller(tokens[1]))) {
      throw ParseError("self-loop", line_no);
    }
    rows.push_back({tokens[0], tokens[1], line_no});
  }

  std::map<unsigned long long, std::uint32_t> dense;
  Instance out;
  for (unsigned long long label : labels) {
    dense.emplace(label, static_cast<std::uint32_t>(dense.size() + 1));
    out.labels.push_back(std::to_string(label));
  }
  const auto id_of = [&](const std::string& t) {
    unsigned long long label;
    parse_label(t, label);
    return BuyerId{dense.at(label)};
  };
  std::vector<BuyerId> seller;
  std::vector<Edge> edges;
  for (const auto& row : rows) {
    if (is_seller(row.a)) {
      seller.push_back(id_of(row.b));
    } else if (is_seller(row.b)) {
      seller.push_back(id_of(row.a));
    } else {
      edges.emplace_back(id_of(row.a), id_of(row.b));
    }
  }
  if (seller.empty()) {
    throw ParseError(options.seller_node
                         ? "seller node " + *options.seller_node + " has no edges"
                         : "no seller edges (use 's' or designate a seller node)");
  }
  try {
    out.structure = StructureProfile::from_edges(dense.size(), std::move(seller), edges);
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  }
  return out;
}

std::string serialize_edge_list(const StructureProfile& structure) {
  std::ostringstream os;
  std::vector<std::uint8_t> mentioned(structure.buyer_count(), 0);
  for (BuyerId b : structure.seller_neighbors()) {
    os << "s " << b.value << '\n';
    mentioned[b.index()] = 1;
  }
  for (const auto& [a, b] : structure.buyer_edges()) {
    os << a.value << ' ' << b.value << '\n';
    mentioned[a.index()] = mentioned[b.index()] = 1;
  }
  for (std::size_t i = 0; i < mentioned.size(); ++i) {
    if (!mentioned[i]) os << i + 1 << '\n';
  }
  return os.str();
}

Instance parse_instance(std::string_view text, const EdgeListOptions& options) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_instance_json(text);
  return parse_edge_list(text, options);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << text;
}

Instance load_instance(const std::filesystem::path& path, const EdgeListOptions& options) {
  return parse_instance(read_text_file(path), options);
}

}  // namespace diffauction
